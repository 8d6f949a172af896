"""Rewriting existential positive sentences into unions of primitive positive ones.

``to_pp_disjunction`` applies the two distribution rules (pulling
disjunction out of existential quantification and out of conjunction) bottom
up; ``m_normalize`` then drops every disjunct that strictly entails another
one, keeping a single representative per logical-equivalence class, so the
surviving disjuncts are pairwise non-entailing while their disjunction stays
equivalent to the input.
"""

from __future__ import annotations

import itertools

from .errors import FragmentError, LimitExceeded
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    Or,
    classify,
    conj,
    disj,
    formula_signature,
    structure_of_pp,
)
from .homomorphism import find_homomorphism, hom_equivalent


def to_pp_disjunction(phi, *, max_disjuncts=10_000):
    """Flatten an existential positive sentence into primitive positive disjuncts.

    The rewrite keeps the set of variable names unchanged and emits disjuncts
    in left-to-right generation order.
    """
    info = classify(phi)
    if info.fragment not in ("PP", "EP"):
        raise FragmentError("an existential positive sentence is required")
    if not info.closed:
        raise FragmentError("a closed sentence is required")

    def dnf(f):
        if isinstance(f, (Atom, Equality)):
            return [f]
        if isinstance(f, Or):
            out = []
            for c in f.children:
                out.extend(dnf(c))
                if len(out) > max_disjuncts:
                    raise LimitExceeded("disjunct count", max_disjuncts)
            return out
        if isinstance(f, And):
            lists = [dnf(c) for c in f.children]
            count = 1
            for lst in lists:
                count *= len(lst)
                if count > max_disjuncts:
                    raise LimitExceeded("disjunct count", max_disjuncts)
            return [conj(list(combo)) for combo in itertools.product(*lists)]
        if isinstance(f, Exists):
            return [Exists(f.var, d) for d in dnf(f.child)]
        raise FragmentError("an existential positive sentence is required")

    return dnf(phi)


def m_normalize(phi, *, signature=None, max_disjuncts=10_000, max_nodes=10_000_000, stats=None):
    """One primitive positive representative per extremal equivalence class.

    Disjuncts are grouped by logical equivalence (homomorphic equivalence of
    their induced structures); a class survives when none of its members
    entails a disjunct outside the class.  Every dropped disjunct entails
    some kept representative, so the disjunction of the result is equivalent
    to the input, and distinct representatives never entail each other.
    """
    disjuncts = to_pp_disjunction(phi, max_disjuncts=max_disjuncts)
    if signature is None:
        signature = formula_signature(phi)
    structs = [structure_of_pp(d, signature) for d in disjuncts]

    class_reps = []  # index of the first-generated member of each class
    for i, struct in enumerate(structs):
        for rep in class_reps:
            if hom_equivalent(struct, structs[rep], max_nodes=max_nodes, stats=stats):
                break
        else:
            class_reps.append(i)

    hom_cache = {}

    def entails(i, j):
        # disjunct i entails disjunct j iff struct(j) maps into struct(i)
        key = (i, j)
        if key not in hom_cache:
            hom_cache[key] = (
                find_homomorphism(structs[j], structs[i], max_nodes=max_nodes, stats=stats)
                is not None
            )
        return hom_cache[key]

    kept = []
    for rep in class_reps:
        if all(other == rep or not entails(rep, other) for other in class_reps):
            kept.append(disjuncts[rep])
    return kept


def _little_sentence(symbols):
    """One-variable sentence asserting an element carrying all given unary symbols."""
    if not symbols:
        return Exists("v", Equality("v", "v"))
    return Exists("v", conj([Atom(name, ("v",)) for name in sorted(symbols)]))


def compile_unary(phi, *, signature=None, max_disjuncts=10_000, max_nodes=10_000_000):
    """Equivalent one-variable sentence for inputs over an all-unary signature.

    Each primitive positive disjunct collapses, per universe element of its
    induced structure, into a conjunction of one-variable sentences (each
    determined by a subset of the signature); redundant disjuncts are then
    removed with the same extremal filtering as :func:`m_normalize`.  The
    number of distinct one-variable building blocks is bounded by the subset
    count of the signature alone, independent of the input length.
    """
    if signature is None:
        signature = formula_signature(phi)
    if any(sym.arity != 1 for sym in signature):
        raise FragmentError("compilation needs an all-unary signature")

    disjuncts = to_pp_disjunction(phi, max_disjuncts=max_disjuncts)
    conjunction_sets = []
    seen = set()
    for d in disjuncts:
        struct = structure_of_pp(d, signature)
        subsets = set()
        for elem in struct.universe:
            carried = frozenset(
                name for name in signature.names if (elem,) in struct.relations[name]
            )
            if carried:
                subsets.add(carried)
        if not subsets:
            # a disjunct with only unconstrained elements is always true
            return _little_sentence(frozenset())
        key = frozenset(subsets)
        if key not in seen:
            seen.add(key)
            conjunction_sets.append(key)

    sentences = [
        conj([_little_sentence(s) for s in sorted(subsets, key=sorted)])
        for subsets in conjunction_sets
    ]
    kept = m_normalize(disj(sentences), signature=signature, max_nodes=max_nodes)
    return disj(kept)
