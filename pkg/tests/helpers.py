"""Shared builders and independent brute-force oracles for the test suite.

The oracles here deliberately avoid the library's search code paths:
homomorphism existence is decided by enumerating every map, treewidth by
enumerating every elimination order, satisfiability by enumerating every
assignment.
"""

import itertools

import epquery as q

E2 = q.digraph_signature()


def digraph(universe, edges):
    return q.Structure(E2, tuple(universe), {"E": set(edges)})


def cycle_digraph(n, prefix="c"):
    names = [f"{prefix}{i}" for i in range(n)]
    edges = {(names[i], names[(i + 1) % n]) for i in range(n)}
    return digraph(names, edges)


def clique_digraph(n, prefix="k"):
    names = [f"{prefix}{i}" for i in range(n)]
    edges = {(x, y) for x in names for y in names if x != y}
    return digraph(names, edges)


def path_digraph(n, prefix="p"):
    names = [f"{prefix}{i}" for i in range(n)]
    edges = {(names[i], names[i + 1]) for i in range(n - 1)}
    return digraph(names, edges)


def brute_hom_exists(a, b):
    """Oracle: enumerate all |B| ** |A| maps and test preservation directly."""
    for values in itertools.product(b.universe, repeat=len(a.universe)):
        mapping = dict(zip(a.universe, values))
        if all(
            tuple(mapping[x] for x in t) in b.relations[sym.name]
            for sym in a.signature
            for t in a.relations[sym.name]
        ):
            return True
    return False


def brute_iso_exists(a, b):
    """Oracle: enumerate all bijections and check preservation both ways."""
    if len(a.universe) != len(b.universe):
        return False
    for values in itertools.permutations(b.universe):
        mapping = dict(zip(a.universe, values))
        inverse = {v: k for k, v in mapping.items()}
        forward = all(
            tuple(mapping[x] for x in t) in b.relations[sym.name]
            for sym in a.signature
            for t in a.relations[sym.name]
        )
        backward = all(
            tuple(inverse[x] for x in t) in a.relations[sym.name]
            for sym in a.signature
            for t in b.relations[sym.name]
        )
        if forward and backward:
            return True
    return False


def all_structures(signature, universe):
    """Every structure over the signature on a fixed, named universe."""
    universe = tuple(universe)
    names = []
    choice_lists = []
    for sym in signature:
        tuples = list(itertools.product(universe, repeat=sym.arity))
        subsets = [
            {tuples[i] for i in range(len(tuples)) if mask >> i & 1}
            for mask in range(1 << len(tuples))
        ]
        names.append(sym.name)
        choice_lists.append(subsets)
    for combo in itertools.product(*choice_lists):
        yield q.Structure(signature, universe, dict(zip(names, combo)))


def random_structure(rng, signature, max_size, density=0.5, prefix="e"):
    n = rng.randint(1, max_size)
    universe = tuple(f"{prefix}{i}" for i in range(n))
    relations = {}
    for sym in signature:
        relations[sym.name] = {
            t
            for t in itertools.product(universe, repeat=sym.arity)
            if rng.random() < density
        }
    return q.Structure(signature, universe, relations)


def random_ep_formula(rng, signature, max_vars=4, max_depth=4):
    """A closed existential positive sentence; atoms only use in-scope variables."""
    pool = [f"w{i}" for i in range(1, max_vars + 1)]
    symbols = list(signature)

    def atom(scope):
        sym = rng.choice(symbols)
        return q.Atom(sym.name, tuple(rng.choice(scope) for _ in range(sym.arity)))

    def gen(depth, scope):
        if depth <= 0:
            if scope:
                return atom(scope)
            v = rng.choice(pool)
            return q.Exists(v, atom([v]))
        roll = rng.random()
        if not scope or roll < 0.35:
            v = rng.choice(pool)
            return q.Exists(v, gen(depth - 1, sorted(set(scope) | {v})))
        if roll < 0.6:
            return q.conj([gen(depth - 1, scope) for _ in range(2)])
        if roll < 0.85:
            return q.disj([gen(depth - 1, scope) for _ in range(2)])
        return atom(scope)

    sentence = gen(max_depth, [])
    for v in sorted(q.free_variables(sentence)):
        sentence = q.Exists(v, sentence)
    return sentence


def random_pp_formula(rng, signature, max_vars=3, max_depth=3):
    """A closed primitive positive sentence, occasionally with equality atoms."""
    pool = [f"w{i}" for i in range(1, max_vars + 1)]
    symbols = list(signature)

    def atom(scope):
        if symbols and rng.random() < 0.8:
            sym = rng.choice(symbols)
            return q.Atom(sym.name, tuple(rng.choice(scope) for _ in range(sym.arity)))
        return q.Equality(rng.choice(scope), rng.choice(scope))

    def gen(depth, scope):
        if depth <= 0:
            if scope:
                return atom(scope)
            v = rng.choice(pool)
            return q.Exists(v, atom([v]))
        roll = rng.random()
        if not scope or roll < 0.4:
            v = rng.choice(pool)
            return q.Exists(v, gen(depth - 1, sorted(set(scope) | {v})))
        if roll < 0.75:
            return q.conj([gen(depth - 1, scope) for _ in range(2)])
        return atom(scope)

    sentence = gen(max_depth, [])
    for v in sorted(q.free_variables(sentence)):
        sentence = q.Exists(v, sentence)
    return sentence


def random_labelled_digraph(rng, labels, max_size, prefix="b"):
    sig = q.labelled_signature(labels)
    n = rng.randint(1, max_size)
    universe = tuple(f"{prefix}{i}" for i in range(n))
    relations = {
        "E": {t for t in itertools.product(universe, repeat=2) if rng.random() < 0.5}
    }
    for i in range(1, labels + 1):
        relations[f"L{i}"] = {(v,) for v in universe if rng.random() < 0.5}
    return q.Structure(sig, universe, relations)


def elimination_width(a, order):
    """Width of the decomposition induced by one elimination order."""
    adj = {e: set(ns) for e, ns in q.gaifman_adjacency(a).items()}
    width = 0
    for v in order:
        neigh = adj[v]
        width = max(width, len(neigh))
        for u in neigh:
            adj[u].update(neigh - {u})
            adj[u].discard(v)
        del adj[v]
    return width


def exhaustive_treewidth(a):
    """Oracle: minimum elimination width over every vertex ordering."""
    return min(elimination_width(a, order) for order in itertools.permutations(a.universe))


def cnf_satisfiable(cnf):
    """Oracle: enumerate every assignment."""
    for bits in itertools.product((False, True), repeat=cnf.variables):
        def lit_true(lit):
            value = bits[abs(lit) - 1]
            return value if lit > 0 else not value

        if all(any(lit_true(lit) for lit in clause) for clause in cnf.clauses):
            return True
    return False


def random_cnf(rng, max_vars=3, max_clauses=3):
    n = rng.randint(1, max_vars)
    literals = [v for i in range(1, n + 1) for v in (i, -i)]
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        size = rng.randint(1, min(3, len(literals)))
        clauses.append(frozenset(rng.sample(literals, size)))
    return q.CnfFormula(n, tuple(clauses))


def all_two_vertex_digraphs():
    names = ("a", "b")
    pairs = [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    for mask in range(16):
        yield digraph(names, {pairs[i] for i in range(4) if mask >> i & 1})
