#!/usr/bin/env python3
"""Union-of-boxes relations: a succinct representation with cheap products.

A relation is a union of blocks, each block a Cartesian product of one
element subset per coordinate.  Explicit relations translate in with one
singleton block per tuple; products multiply blocks pairwise, so the output
length is linear in the second factor once the first is fixed.
"""

import epquery as q

# One block can cover many tuples.
rel = q.GdnfRelation(
    2,
    ("a", "b", "c"),
    ((frozenset({"a", "b"}), frozenset({"c"})),),
)
print("block {a b} x {c} expands to:", sorted(q.gdnf_to_explicit(rel)))
print("membership without expansion:", q.gdnf_member(rel, ("b", "c")))

# Explicit tuples round-trip through singleton blocks.
explicit = {("a", "a"), ("b", "b")}
encoded = q.gdnf_from_explicit(explicit, ("a", "b"), 2)
print("singleton blocks:", len(encoded.blocks))
assert q.gdnf_to_explicit(encoded) == explicit

# The product of an m-block and an n-block relation has exactly m*n blocks,
# and expanding it matches the explicit product.
other = q.GdnfRelation(
    2,
    ("x", "y"),
    ((frozenset({"x"}), frozenset({"x", "y"})), (frozenset({"y"}), frozenset({"y"}))),
)
combined = q.gdnf_product(rel, other)
print("\nblock counts:", len(rel.blocks), "x", len(other.blocks), "->", len(combined.blocks))
expected = {
    tuple(q.pair_token(s, t) for s, t in zip(ta, tb))
    for ta in q.gdnf_to_explicit(rel)
    for tb in q.gdnf_to_explicit(other)
}
assert q.gdnf_to_explicit(combined) == expected
print("product expands to", len(expected), "tuples, as the explicit product does")

# Length contract: with the left factor fixed, doubling the right factor's
# representation doubles the product's representation.
doubled = q.GdnfRelation(other.arity, other.universe, other.blocks + other.blocks)
print("length with h:", q.gdnf_length(q.gdnf_product(rel, other)),
      "| with h twice:", q.gdnf_length(q.gdnf_product(rel, doubled)))

# Whole structures can stay in block form through a product.
sig = q.digraph_signature()
left = q.Structure(sig, ("0", "1"), {"E": {("0", "1"), ("1", "0")}})
right = q.Structure(sig, ("0", "1", "2"), {"E": {("0", "1"), ("1", "2"), ("2", "0")}})
block_form = q.gdnf_structure_product(
    q.gdnf_structure_from(left), q.gdnf_structure_from(right)
)
back = q.gdnf_structure_to(block_form)
assert back.relations == q.product(left, right).relations
print("\nstructure-level product in block form matches the explicit product")

# The text format: one 'block' line per box.
print("\nserialized:")
print(q.format_gdnf(rel))
