import itertools
import random

import pytest

import epquery as q
from helpers import all_structures, random_ep_formula

EPQ_SIG = q.Signature(
    [q.RelationSymbol("E", 2), q.RelationSymbol("P", 1), q.RelationSymbol("Q", 1)]
)
PQR_SIG = q.Signature(
    [q.RelationSymbol("P", 1), q.RelationSymbol("Q", 1), q.RelationSymbol("R", 1)]
)
PQ_SIG = q.Signature([q.RelationSymbol("P", 1), q.RelationSymbol("Q", 1)])


def _equivalent_on(sig, sizes, left, right, rng=None, sample=None):
    worlds = []
    for size in sizes:
        worlds.extend(all_structures(sig, tuple(f"m{i}" for i in range(size))))
    if sample is not None:
        worlds = rng.sample(worlds, sample)
    return all(q.eval_naive(left, b) == q.eval_naive(right, b) for b in worlds)


def test_to_pp_disjunction_single_rule():
    f = q.parse_formula("exists x . (P(x) | Q(x))")
    out = q.to_pp_disjunction(f)
    assert out == [
        q.parse_formula("exists x . P(x)"),
        q.parse_formula("exists x . Q(x)"),
    ]


def test_to_pp_disjunction_identity_on_pp():
    psi = q.parse_formula("exists x . exists y . (E(x,y) & P(x))")
    assert q.to_pp_disjunction(psi) == [psi]


def test_to_pp_disjunction_distribution():
    f = q.parse_formula("exists x . ((P(x) | Q(x)) & (P(x) | R(x)))")
    out = q.to_pp_disjunction(f)
    assert len(out) == 4
    for disjunct in out:
        assert q.classify(disjunct).fragment == "PP"
    # left-to-right generation order: the left conjunct's choice is outermost
    assert out == [
        q.parse_formula(f"exists x . ({left}(x) & {right}(x))")
        for left in ("P", "Q")
        for right in ("P", "R")
    ]
    assert _equivalent_on(PQR_SIG, (1, 2), f, q.disj(out))


def test_to_pp_disjunction_keeps_variable_names():
    rng = random.Random(43)
    for _ in range(40):
        f = random_ep_formula(rng, EPQ_SIG)
        for disjunct in q.to_pp_disjunction(f):
            assert q.variable_names(disjunct) <= q.variable_names(f)


def test_to_pp_disjunction_rejects_non_ep():
    with pytest.raises(q.FragmentError):
        q.to_pp_disjunction(q.parse_formula("not P(x)"))
    with pytest.raises(q.FragmentError):
        q.to_pp_disjunction(q.parse_formula("P(x)"))


def test_to_pp_disjunction_limit():
    # (P|Q) conjoined five times: 32 disjuncts
    base = q.parse_formula("exists x . ((P(x) | Q(x)) & (P(x) | Q(x)) & (P(x) | Q(x)) & (P(x) | Q(x)) & (P(x) | Q(x)))")
    assert len(q.to_pp_disjunction(base)) == 32
    with pytest.raises(q.LimitExceeded):
        q.to_pp_disjunction(base, max_disjuncts=16)


def test_m_normalize_absorbs_stronger_disjunct():
    f = q.parse_formula("exists x . (E(x,x) | (exists y . E(x,y)))")
    out = q.m_normalize(f)
    assert out == [q.parse_formula("exists x . exists y . E(x,y)")]
    assert _equivalent_on(
        q.Signature([q.RelationSymbol("E", 2)]), (1, 2), f, q.disj(out)
    )


def test_m_normalize_keeps_incomparable_disjuncts():
    f = q.parse_formula("exists x . (P(x) | Q(x))")
    out = q.m_normalize(f)
    assert len(out) == 2


def test_m_normalize_pp_passthrough():
    psi = q.parse_formula("exists x . E(x,x)")
    assert q.m_normalize(psi) == [psi]


def test_m_normalize_properties_random():
    rng = random.Random(47)
    for _ in range(60):
        f = random_ep_formula(rng, EPQ_SIG)
        kept = q.m_normalize(f)
        assert kept
        assert _equivalent_on(EPQ_SIG, (1, 2), f, q.disj(kept), rng=rng, sample=40)
        for left, right in itertools.combinations(kept, 2):
            assert not q.pp_entails(left, right, signature=EPQ_SIG)
            assert not q.pp_entails(right, left, signature=EPQ_SIG)
        # absorption: every dropped disjunct entails some kept representative
        for disjunct in q.to_pp_disjunction(f):
            assert any(
                q.pp_entails(disjunct, keeper, signature=EPQ_SIG) for keeper in kept
            )


def test_compile_unary_single_atom():
    f = q.parse_formula("exists x . P(x)")
    out = q.compile_unary(f)
    assert out == q.parse_formula("exists v . P(v)")


def test_compile_unary_absorbs_stronger_disjunct():
    f = q.parse_formula("(exists x . (P(x) & Q(x))) | (exists x . P(x))")
    out = q.compile_unary(f)
    assert out == q.parse_formula("exists v . P(v)")
    assert _equivalent_on(PQ_SIG, (1, 2), f, out)


def test_compile_unary_splits_independent_variables():
    f = q.parse_formula("exists x . exists y . (P(x) & Q(y))")
    out = q.compile_unary(f)
    assert out == q.parse_formula("(exists v . P(v)) & (exists v . Q(v))")
    assert _equivalent_on(PQ_SIG, (1, 2), f, out)


def test_compile_unary_handles_trivial_disjunct():
    f = q.parse_formula("(exists x . P(x)) | (exists y . y = y)")
    out = q.compile_unary(f, signature=PQ_SIG)
    assert _equivalent_on(PQ_SIG, (1, 2), f, out)
    assert q.classify(out).variables == 1


def test_compile_unary_rejects_non_unary_signature():
    with pytest.raises(q.FragmentError):
        q.compile_unary(q.parse_formula("exists x . E(x,x)"))


def _little_sentences(f):
    out = set()

    def walk(g):
        if isinstance(g, q.Exists):
            out.add(g)
            return
        if isinstance(g, (q.And, q.Or)):
            for c in g.children:
                walk(c)

    walk(f)
    return out


def test_compile_unary_random_properties():
    rng = random.Random(53)
    for _ in range(60):
        f = random_ep_formula(rng, PQ_SIG, max_vars=3, max_depth=3)
        out = q.compile_unary(f, signature=PQ_SIG)
        info = q.classify(out)
        assert info.fragment in ("PP", "EP")
        assert info.variables == 1
        assert len(_little_sentences(out)) <= 2 ** len(PQ_SIG)
        assert _equivalent_on(PQ_SIG, (1, 2), f, out)
