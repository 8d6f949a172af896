"""Formula ASTs, the sentence grammar, and the query/structure bridges.

Grammar (whitespace-insensitive, '#' starts a comment)::

    formula := 'exists' VAR '.' formula | 'forall' VAR '.' formula
             | 'not' formula | disj
    disj    := conj ('|' conj)*
    conj    := unit ('&' unit)*
    unit    := NAME '(' VAR (',' VAR)* ')' | VAR '=' VAR | '(' formula ')'

'&' binds tighter than '|'; quantifier and 'not' scope extends maximally to
the right.  Identifiers are runs of letters, digits, and ``_ ^ @ '`` that
are not the keywords exists/forall/not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EpqError, FragmentError, ParseError
from .structures import RelationSymbol, Signature, Structure


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class Equality:
    left: str
    right: str


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class Exists:
    var: str
    child: object


@dataclass(frozen=True)
class Forall:
    var: str
    child: object


def conj(parts):
    """N-ary conjunction; nested conjunctions are flattened, singletons collapse."""
    flat = []
    for part in parts:
        if isinstance(part, And):
            flat.extend(part.children)
        else:
            flat.append(part)
    if not flat:
        raise EpqError("empty conjunction")
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(parts):
    """N-ary disjunction; nested disjunctions are flattened, singletons collapse."""
    flat = []
    for part in parts:
        if isinstance(part, Or):
            flat.extend(part.children)
        else:
            flat.append(part)
    if not flat:
        raise EpqError("empty disjunction")
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def variable_names(f):
    """Every variable token occurring anywhere in the formula."""
    names = set()

    def walk(g):
        if isinstance(g, Atom):
            names.update(g.args)
        elif isinstance(g, Equality):
            names.add(g.left)
            names.add(g.right)
        elif isinstance(g, (And, Or)):
            for c in g.children:
                walk(c)
        elif isinstance(g, Not):
            walk(g.child)
        elif isinstance(g, (Exists, Forall)):
            names.add(g.var)
            walk(g.child)
        else:
            raise EpqError(f"not a formula node: {g!r}")

    walk(f)
    return names


def free_variables(f):
    """Variables with at least one occurrence not bound by a quantifier."""
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Equality):
        return frozenset((f.left, f.right))
    if isinstance(f, (And, Or)):
        out = frozenset()
        for c in f.children:
            out |= free_variables(c)
        return out
    if isinstance(f, Not):
        return free_variables(f.child)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.child) - {f.var}
    raise EpqError(f"not a formula node: {f!r}")


@dataclass(frozen=True)
class FormulaInfo:
    fragment: str  # "PP", "EP", or "FO"
    variables: int
    equality_free: bool
    closed: bool


def classify(f):
    """Fragment membership, distinct-variable count, equality and closedness flags."""
    flags = {"or": False, "not": False, "forall": False, "eq": False}

    def walk(g):
        if isinstance(g, Atom):
            return
        if isinstance(g, Equality):
            flags["eq"] = True
        elif isinstance(g, And):
            for c in g.children:
                walk(c)
        elif isinstance(g, Or):
            flags["or"] = True
            for c in g.children:
                walk(c)
        elif isinstance(g, Not):
            flags["not"] = True
            walk(g.child)
        elif isinstance(g, Exists):
            walk(g.child)
        elif isinstance(g, Forall):
            flags["forall"] = True
            walk(g.child)
        else:
            raise EpqError(f"not a formula node: {g!r}")

    walk(f)
    if flags["not"] or flags["forall"]:
        fragment = "FO"
    elif flags["or"]:
        fragment = "EP"
    else:
        fragment = "PP"
    return FormulaInfo(
        fragment=fragment,
        variables=len(variable_names(f)),
        equality_free=not flags["eq"],
        closed=not free_variables(f),
    )


_IDENT_RE = re.compile(r"[A-Za-z0-9_^@']+")
_KEYWORDS = frozenset({"exists", "forall", "not"})
_PUNCT = "(),.=&|"


def _tokenize(text):
    tokens = []
    lineno = 1
    for lineno, raw in enumerate(text.splitlines() or [""], start=1):
        line = raw.split("#", 1)[0]
        col = 0
        while col < len(line):
            ch = line[col]
            if ch.isspace():
                col += 1
                continue
            m = _IDENT_RE.match(line, col)
            if m:
                tokens.append(("ident", m.group(), lineno, col + 1))
                col = m.end()
                continue
            if ch in _PUNCT:
                tokens.append((ch, ch, lineno, col + 1))
                col += 1
                continue
            raise ParseError(f"unexpected character {ch!r}", lineno, col + 1)
    tokens.append(("end", "", lineno, 1))
    return tokens


class _Parser:
    def __init__(self, tokens, signature):
        self.tokens = tokens
        self.pos = 0
        self.signature = signature

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def identifier(self, role):
        tok = self.take()
        if tok[0] != "ident":
            raise ParseError(f"expected a {role} name, found {tok[1]!r}", tok[2], tok[3])
        if tok[1] in _KEYWORDS:
            raise ParseError(f"keyword {tok[1]!r} cannot be used as a {role} name", tok[2], tok[3])
        return tok[1]

    def formula(self):
        kind, value, _, _ = self.peek()
        if kind == "ident" and value in ("exists", "forall"):
            self.take()
            var = self.identifier("variable")
            self.expect(".")
            body = self.formula()
            return Exists(var, body) if value == "exists" else Forall(var, body)
        if kind == "ident" and value == "not":
            self.take()
            return Not(self.formula())
        return self.disjunction()

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek()[0] == "|":
            self.take()
            parts.append(self.conjunction())
        return disj(parts)

    def conjunction(self):
        parts = [self.unit()]
        while self.peek()[0] == "&":
            self.take()
            parts.append(self.unit())
        return conj(parts)

    def unit(self):
        kind, value, line, col = self.peek()
        if kind == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        name = self.identifier("predicate or variable")
        kind = self.peek()[0]
        if kind == "(":
            self.take()
            args = [self.identifier("variable")]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.identifier("variable"))
            self.expect(")")
            if self.signature is not None:
                if name not in self.signature:
                    raise ParseError(f"unknown relation symbol {name!r}", line, col)
                if self.signature.arity(name) != len(args):
                    raise ParseError(
                        f"symbol {name!r} has arity {self.signature.arity(name)}, got {len(args)} arguments",
                        line,
                        col,
                    )
            return Atom(name, tuple(args))
        if kind == "=":
            self.take()
            right = self.identifier("variable")
            return Equality(name, right)
        tok = self.peek()
        raise ParseError(f"expected '(' or '=' after {name!r}", tok[2], tok[3])


def parse_formula(text, signature=None):
    """Parse a formula in the module grammar; raises ParseError with position."""
    parser = _Parser(_tokenize(text), signature)
    formula = parser.formula()
    trailing = parser.peek()
    if trailing[0] != "end":
        raise ParseError(f"unexpected trailing input {trailing[1]!r}", trailing[2], trailing[3])
    return formula


def _unit_text(f):
    text = render(f)
    return text if isinstance(f, (Atom, Equality)) else f"({text})"


def render(f):
    """Canonical text for a formula; parse(render(f)) is structurally f."""
    if isinstance(f, Atom):
        return f"{f.symbol}({','.join(f.args)})"
    if isinstance(f, Equality):
        return f"{f.left} = {f.right}"
    if isinstance(f, Exists):
        return f"exists {f.var} . {render(f.child)}"
    if isinstance(f, Forall):
        return f"forall {f.var} . {render(f.child)}"
    if isinstance(f, Not):
        inner = render(f.child)
        if isinstance(f.child, (Atom, Equality)):
            return f"not {inner}"
        return f"not ({inner})"
    if isinstance(f, And):
        return " & ".join(_unit_text(c) for c in f.children)
    if isinstance(f, Or):
        return " | ".join(_unit_text(c) for c in f.children)
    raise EpqError(f"not a formula node: {f!r}")


_VAR_SAFE = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_^'"
)


def query_variable(element):
    """Variable token standing for a universe element in generated queries.

    The fixed prefix keeps generated names apart from user-chosen variables.
    Characters the sentence grammar cannot carry (notably '|' in product
    element names) are escaped through '@', injectively.
    """
    out = ["q_"]
    for ch in element:
        if ch == "@":
            out.append("@@")
        elif ch == "|":
            out.append("@p")
        elif ch in _VAR_SAFE:
            out.append(ch)
        else:
            out.append("@%02x" % ord(ch))
    return "".join(out)


def canonical_query(a):
    """The sentence asserting "this structure maps homomorphically into here".

    One existential variable per universe element, one atom per tuple; when
    the structure has no tuples at all a reflexive equality keeps the body
    non-empty.
    """
    if not a.universe:
        raise EpqError("canonical query needs a non-empty universe")
    atoms = []
    for sym in a.signature:
        for t in sorted(a.relations[sym.name]):
            atoms.append(Atom(sym.name, tuple(query_variable(e) for e in t)))
    if atoms:
        body = conj(atoms)
    else:
        v = query_variable(a.universe[0])
        body = Equality(v, v)
    out = body
    for elem in reversed(a.universe):
        out = Exists(query_variable(elem), out)
    return out


def formula_signature(f):
    """Signature inferred from the predicate atoms of a formula."""
    arities = {}

    def walk(g):
        if isinstance(g, Atom):
            seen = arities.get(g.symbol)
            if seen is None:
                arities[g.symbol] = len(g.args)
            elif seen != len(g.args):
                raise EpqError(f"symbol {g.symbol!r} used with arities {seen} and {len(g.args)}")
        elif isinstance(g, (And, Or)):
            for c in g.children:
                walk(c)
        elif isinstance(g, Not):
            walk(g.child)
        elif isinstance(g, (Exists, Forall)):
            walk(g.child)

    walk(f)
    return Signature([RelationSymbol(name, arity) for name, arity in arities.items()])


def _fresh_name(base, taken):
    i = 2
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def _alpha_rename(f):
    """Give every quantifier occurrence its own variable name, scope-aware."""
    taken = set(variable_names(f))
    bound_seen = set()

    def walk(g, env):
        if isinstance(g, Atom):
            try:
                return Atom(g.symbol, tuple(env[x] for x in g.args))
            except KeyError as exc:
                raise FragmentError(f"free variable {exc.args[0]!r} in a sentence") from None
        if isinstance(g, Equality):
            try:
                return Equality(env[g.left], env[g.right])
            except KeyError as exc:
                raise FragmentError(f"free variable {exc.args[0]!r} in a sentence") from None
        if isinstance(g, And):
            return And(tuple(walk(c, env) for c in g.children))
        if isinstance(g, Or):
            return Or(tuple(walk(c, env) for c in g.children))
        if isinstance(g, Not):
            return Not(walk(g.child, env))
        if isinstance(g, (Exists, Forall)):
            if g.var in bound_seen:
                new = _fresh_name(g.var, taken)
                taken.add(new)
            else:
                new = g.var
            bound_seen.add(new)
            child = walk(g.child, {**env, g.var: new})
            return type(g)(new, child)
        raise EpqError(f"not a formula node: {g!r}")

    return walk(f, {})


def structure_of_pp(psi, signature=None):
    """Structure induced by a primitive positive sentence.

    Equalities are eliminated by merging variables (lexicographically least
    name wins); the universe keeps one element per surviving quantified
    variable, in quantifier-prefix order.
    """
    info = classify(psi)
    if info.fragment != "PP":
        raise FragmentError("a primitive positive sentence is required")
    if not info.closed:
        raise FragmentError("a closed sentence is required")
    renamed = _alpha_rename(psi)

    quantified = []
    atoms = []
    equalities = []

    def walk(g):
        if isinstance(g, Exists):
            quantified.append(g.var)
            walk(g.child)
        elif isinstance(g, And):
            for c in g.children:
                walk(c)
        elif isinstance(g, Atom):
            atoms.append(g)
        elif isinstance(g, Equality):
            equalities.append((g.left, g.right))
        else:
            raise FragmentError("a primitive positive sentence is required")

    walk(renamed)

    parent = {v: v for v in quantified}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for x, y in equalities:
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        root = min(rx, ry)
        parent[rx] = root
        parent[ry] = root

    universe = []
    seen = set()
    for v in quantified:
        r = find(v)
        if r not in seen:
            seen.add(r)
            universe.append(r)

    if signature is None:
        signature = formula_signature(psi)
    relations = {}
    for atom in atoms:
        if atom.symbol not in signature:
            raise EpqError(f"symbol {atom.symbol!r} is not in the supplied signature")
        if signature.arity(atom.symbol) != len(atom.args):
            raise EpqError(f"arity mismatch for symbol {atom.symbol!r}")
        relations.setdefault(atom.symbol, set()).add(tuple(find(x) for x in atom.args))
    return Structure(signature, tuple(universe), relations)


def joint_signature(*formulas):
    """Common signature of several formulas; arities must agree."""
    arities = {}
    for f in formulas:
        for sym in formula_signature(f):
            seen = arities.get(sym.name)
            if seen is None:
                arities[sym.name] = sym.arity
            elif seen != sym.arity:
                raise EpqError(f"symbol {sym.name!r} used with arities {seen} and {sym.arity}")
    return Signature([RelationSymbol(n, a) for n, a in arities.items()])


def pp_entails(psi, psi_prime, *, signature=None, max_nodes=10_000_000, stats=None):
    """Entailment between primitive positive sentences via homomorphism.

    ``psi`` entails ``psi_prime`` exactly when the structure of ``psi_prime``
    maps homomorphically into the structure of ``psi``.
    """
    from .homomorphism import find_homomorphism

    if signature is None:
        signature = joint_signature(psi, psi_prime)
    left = structure_of_pp(psi, signature)
    right = structure_of_pp(psi_prime, signature)
    return find_homomorphism(right, left, max_nodes=max_nodes, stats=stats) is not None


def replace_atoms(f, fn):
    """Rebuild a formula with every predicate atom passed through ``fn``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Equality):
        return f
    if isinstance(f, And):
        return And(tuple(replace_atoms(c, fn) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(replace_atoms(c, fn) for c in f.children))
    if isinstance(f, Not):
        return Not(replace_atoms(f.child, fn))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, replace_atoms(f.child, fn))
    raise EpqError(f"not a formula node: {f!r}")
