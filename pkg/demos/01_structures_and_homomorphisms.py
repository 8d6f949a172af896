#!/usr/bin/env python3
"""Structures, products, and the homomorphism engine.

Builds a few small digraphs, checks their invariants, multiplies them,
searches for homomorphisms and retractions, and shrinks a structure to its
core.
"""

import epquery as q

# A structure is a signature, an ordered universe, and one tuple set per
# relation symbol.  Here: plain digraphs over a single binary symbol E.
sig = q.digraph_signature()
edge = q.Structure(sig, ("a", "b"), {"E": {("a", "b")}})
loop = q.Structure(sig, ("z",), {"E": {("z", "z")}})
print("validation report for the edge:", q.validate(edge) or "clean")

# The product pairs universes and keeps a tuple exactly when both
# projections are tuples of the factors.
two_cycle = q.Structure(sig, ("0", "1"), {"E": {("0", "1"), ("1", "0")}})
three_cycle = q.Structure(
    sig, ("0", "1", "2"), {"E": {("0", "1"), ("1", "2"), ("2", "0")}}
)
combined = q.product(two_cycle, three_cycle)
print("2-cycle x 3-cycle:", len(combined.universe), "elements,",
      len(combined.relations["E"]), "edges (a 6-cycle in disguise)")

# Homomorphism search: an edge maps onto a loop by collapsing both ends...
witness = q.find_homomorphism(edge, loop)
print("edge -> loop:", witness.mapping)
print("witness verifies:", q.verify_homomorphism(witness))

# ...but a loop never maps into a loop-free edge.
print("loop -> edge:", q.find_homomorphism(loop, edge))

# Directed cycles wrap onto each other only when lengths divide.
six_cycle = q.product(two_cycle, three_cycle)
print("6-cycle -> 3-cycle exists:", q.find_homomorphism(six_cycle, three_cycle) is not None)
print("3-cycle -> 6-cycle exists:", q.find_homomorphism(three_cycle, six_cycle) is not None)

# A retraction fixes the chosen substructure pointwise.
tail = q.Structure(sig, ("a", "b"), {"E": {("a", "b"), ("b", "b")}})
retraction = q.find_retraction(tail, {"b"})
print("retraction of edge-into-loop onto its loop:", retraction.mapping)

# The core is the smallest homomorphically equivalent substructure.  Note
# the disjoint 2-cycle + 6-cycle: no single element can be dropped by a
# retraction, yet the core is just the 2-cycle.
both = q.Structure(
    sig,
    two_cycle.universe + tuple("c" + x for x in six_cycle.universe),
    {"E": set(two_cycle.relations["E"])
         | {("c" + x, "c" + y) for x, y in six_cycle.relations["E"]}},
)
small = q.core(both)
print("core of 2-cycle + 6-cycle has", len(small.universe), "elements")
print("core is hom-equivalent to the original:", q.hom_equivalent(both, small))

# Structures round-trip through a canonical text format.
print("\ncanonical serialization of the tail structure:")
print(q.format_structure(tail))
