#!/usr/bin/env python3
"""Disjunct normal forms and one-variable compilation over unary signatures.

An existential positive sentence flattens into primitive positive
disjuncts; dropping every disjunct that strictly entails another leaves a
pairwise non-entailing set with the same meaning.  Over an all-unary
signature the whole sentence collapses further, into boolean combinations
of one-variable building blocks.
"""

import epquery as q

# Distribution produces the full disjunct list, in generation order.
phi = q.parse_formula("exists x . ((P(x) | Q(x)) & (P(x) | R(x)))")
for d in q.to_pp_disjunction(phi):
    print("disjunct:", q.render(d))

# The loop disjunct below entails the edge disjunct, so normalization keeps
# only the weaker, more general one.
mixed = q.parse_formula("exists x . (E(x,x) | (exists y . E(x,y)))")
print("\nnormalized:", [q.render(m) for m in q.m_normalize(mixed)])

# Incomparable disjuncts both survive.
both = q.parse_formula("exists x . (P(x) | Q(x))")
print("normalized:", [q.render(m) for m in q.m_normalize(both)])

# Surviving disjuncts never entail each other.
kept = q.m_normalize(mixed)
for left in kept:
    for right in kept:
        if left is not right:
            assert not q.pp_entails(left, right)

# Over unary signatures, sentences compile to a single variable name; the
# number of distinct one-variable blocks depends only on the signature.
stronger = q.parse_formula("(exists x . (P(x) & Q(x))) | (exists x . P(x))")
print("\ncompiled:", q.render(q.compile_unary(stronger)))

split = q.parse_formula("exists x . exists y . (P(x) & Q(y))")
print("compiled:", q.render(q.compile_unary(split)))

# Equivalence is preserved; spot-check on every two-element world.
sig = q.Signature([q.RelationSymbol("P", 1), q.RelationSymbol("Q", 1)])
compiled = q.compile_unary(split)
universe = ("m0", "m1")
agree = 0
for p_mask in range(4):
    for q_mask in range(4):
        world = q.Structure(
            sig,
            universe,
            {
                "P": {(universe[i],) for i in range(2) if p_mask >> i & 1},
                "Q": {(universe[i],) for i in range(2) if q_mask >> i & 1},
            },
        )
        assert q.eval_naive(split, world) == q.eval_naive(compiled, world)
        agree += 1
print(f"agrees with the original on all {agree} two-element worlds")
