#!/usr/bin/env python3
"""Reduction constructions, certified against brute-force oracles.

Two families: satisfiability instances become model-checking instances over
tiny two-element structures, and directed Hamiltonicity becomes model
checking of a fixed sentence family over gadget encodings.  Everything here
is small enough to confirm by exhaustive search.
"""

import itertools

import epquery as q

# --- satisfiability ---------------------------------------------------------

cnf = q.CnfFormula(3, (frozenset({1, -2}), frozenset({2, 3}), frozenset({-1, -3})))


def satisfiable_by_enumeration(cnf):
    for bits in itertools.product((False, True), repeat=cnf.variables):
        if all(
            any((bits[abs(l) - 1]) == (l > 0) for l in clause) for clause in cnf.clauses
        ):
            return True
    return False


expected = satisfiable_by_enumeration(cnf)
print("assignment enumeration says satisfiable:", expected)
for mode, arity in (("two-symbols", 2), ("single-symbol", 3), ("unary", 2)):
    instance = q.reduce_sat(cnf, mode=mode, arity=arity)
    verdict = q.eval_naive(instance.sentence, instance.structure)
    print(f"  {mode:14s} instance evaluates:", verdict)
    assert verdict == expected

# The two-symbols sentences are secretly one-variable sentences: every
# normalized disjunct passes the k=1 expressibility test.
instance = q.reduce_sat(cnf, mode="two-symbols", arity=2)
print("two-symbols disjuncts expressible with one variable:",
      all(q.decide_ppk(d, 1) for d in q.m_normalize(instance.sentence)))

# --- Hamiltonian circuits ---------------------------------------------------

sig = q.digraph_signature()


def digraph(universe, edges):
    return q.Structure(sig, tuple(universe), {"E": set(edges)})


# The gadget encoding preserves homomorphism existence in both directions.
labelled = q.unique_label_digraph(digraph("ab", {("a", "b"), ("b", "a")}))
star = q.gadget_star(labelled)
print("\ngadget encoding of a labelled 2-cycle:", len(star.universe), "vertices,",
      len(star.relations["E"]), "edges")

# The sentence family: existentially quantify one gadget per vertex and
# pick a successor for each.
h2 = q.hamiltonian_sentence(2)
print("sentence for 2 vertices uses", q.classify(h2).variables, "variables")

# Its six-variable form routes each successor pattern through an explicit
# width-5 tree decomposition of its gadget encoding.
ep6 = q.hamiltonian_sentence_ep6(2)
print("six-variable form uses", q.classify(ep6).variables, "variables,",
      len(ep6.children), "disjuncts")

# End to end on every digraph with two vertices: the reduced instance is
# true exactly when a directed Hamiltonian circuit exists.
pairs = [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
agreements = 0
for mask in range(16):
    g = digraph("ab", {pairs[i] for i in range(4) if mask >> i & 1})
    instance = q.reduce_hamiltonian(g)
    reduced = q.eval_dnf_hom(instance.sentence, instance.structure)
    assert reduced == q.brute_force_hamiltonian(g)
    assert reduced == q.eval_kvar(ep6, instance.structure, 6)
    agreements += 1
print(f"reduction agrees with brute force on all {agreements} two-vertex digraphs")

# A three-vertex example, plus the arity-3 lift of the same instance.
g3 = digraph("abc", {("a", "b"), ("b", "c"), ("c", "a")})
instance = q.reduce_hamiltonian(g3)
print("3-cycle instance evaluates:", q.eval_dnf_hom(instance.sentence, instance.structure))
lifted = q.reduce_hamiltonian(g3, lift_arity=3)
print("arity-3 lifted instance evaluates:",
      q.eval_dnf_hom(lifted.sentence, lifted.structure))
