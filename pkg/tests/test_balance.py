from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from picard_strata.balance import (
    BalanceClass, Multidegree, basic_bounds, classify, classify_many, enumerate_balanced,
    reflect_twist, twist,
)
from picard_strata.dual_graph import DualGraph, StabilityClass, Subcurve
from picard_strata.errors import ValidationError
from picard_strata.oracle import (
    CorpusSpec, QUASISTABLE, brute_balanced, brute_classify, generate_corpus, multidegrees_in,
    search_box,
)

B = BalanceClass


def _md(graph, *degs):
    return Multidegree(graph, degs)


def test_basic_bounds_examples(vine111, vine003):
    b = basic_bounds(Subcurve(vine111, {"C1"}), 1)
    assert (b.m_doubled, b.M_doubled, b.scale) == (0, 4, 4)
    assert (b.lower, b.upper) == (0, 1)
    assert list(b.integer_range()) == [0, 1]
    b = basic_bounds(Subcurve(vine003, {"C1"}), 1)
    assert (b.lower, b.upper) == (-1, 2)
    for graph in (vine111, vine003):
        b = basic_bounds(Subcurve(graph, {"C2"}), 0)
        k = graph.boundary(0b10)
        assert (b.lower, b.upper) == (Fraction(-k, 2), Fraction(k, 2))
        assert b.M_doubled - b.m_doubled == b.scale * k
    with pytest.raises(ValidationError, match="proper"):
        basic_bounds(Subcurve(vine111, {"C1", "C2"}), 1)


def test_basic_bounds_rejects_low_genus():
    g = DualGraph((("a", 0), ("b", 1)), (("a", "b"),))
    with pytest.raises(ValidationError, match="genus"):
        basic_bounds(Subcurve(g, {"a"}), 0)


def test_classify_examples(vine111):
    assert classify(_md(vine111, 1, 1)) is B.STABLY_BALANCED
    assert classify(_md(vine111, 1, 0)) is B.BALANCED_NOT_STABLY
    assert classify(_md(vine111, 2, -1)) is B.NOT_SEMIBALANCED


def test_classify_exceptional_pinning():
    chain = DualGraph((("v1", 1), ("e", 0), ("v2", 1)), (("v1", "e"), ("e", "v2")))
    # d = 1: Z = {v1} attains m = 0 for (0, 1, 0); (1, 0, 0) leaves E at degree 0
    assert classify(_md(chain, 0, 1, 0)) is B.BALANCED_NOT_STABLY
    assert brute_classify(_md(chain, 0, 1, 0)) is B.BALANCED_NOT_STABLY
    assert classify(_md(chain, 1, 0, 0)) is B.SEMIBALANCED_NOT_BALANCED
    assert brute_classify(_md(chain, 1, 0, 0)) is B.SEMIBALANCED_NOT_BALANCED


def test_classify_rejects_unstable_input():
    tail = DualGraph((("u", 2), ("t", 0)), (("u", "t"),))
    with pytest.raises(ValidationError, match="semistable"):
        classify(_md(tail, 1, 0))
    with pytest.raises(ValidationError, match="entries"):
        _md(tail, 1)


def test_enumerate_examples(vine111, vine003):
    assert [m.degrees for m in enumerate_balanced(vine111, 1)] == [(0, 1), (1, 0)]
    assert [m.degrees for m in enumerate_balanced(vine003, 1)] == [(-1, 2), (0, 1), (1, 0), (2, -1)]
    assert [m.degrees for m in enumerate_balanced(vine003, 1, stably_only=True)] == [(0, 1), (1, 0)]
    assert [m.degrees for m in enumerate_balanced(DualGraph((("x", 3),)), 5)] == [(5,)]


@pytest.mark.parametrize("g1,g2", [(1, 1), (1, 2), (2, 3), (4, 4)])
def test_compact_type_vine_in_degree_g_minus_one(g1, g2):
    graph = DualGraph.vine(g1, g2, 1)
    g = g1 + g2
    assert [m.degrees for m in enumerate_balanced(graph, g - 1)] == sorted([(g1, g2 - 1), (g1 - 1, g2)])


def test_enumerate_matches_brute_force_on_quasistable_corpus():
    for graph in generate_corpus(CorpusSpec(3, 3, stability=QUASISTABLE)):
        for d in range(-2, 2 * graph.genus + 1):
            got = {m.degrees: classify(m) for m in enumerate_balanced(graph, d)}
            assert got == brute_balanced(graph, d), (graph, d)


def test_not_quasistable_has_no_balanced_multidegree(caplog):
    cycle = DualGraph((("u", 1), ("a", 0), ("b", 0)), (("u", "a"), ("a", "b"), ("b", "u")))
    for d in range(-3, 6):
        assert enumerate_balanced(cycle, d) == []
        assert brute_balanced(cycle, d) == {}
    assert "not quasistable" in caplog.text
    semistable = generate_corpus(CorpusSpec(4, 3, stability=frozenset({StabilityClass.SEMISTABLE_NOT_QUASISTABLE})))
    assert semistable
    for graph in semistable:
        assert all(enumerate_balanced(graph, d) == [] for d in range(0, 2 * graph.genus - 2))


def test_classify_many_checks_total(vine111):
    assert classify_many(vine111, [(1, 1), (0, 2)], 2) == [B.STABLY_BALANCED, B.NOT_SEMIBALANCED]
    with pytest.raises(ValidationError):
        classify_many(vine111, [(1, 1), (0, 1)], 2)


def test_classify_agrees_with_brute_force_on_stable_corpus():
    for graph in generate_corpus(CorpusSpec(4, 4)):
        for d in range(0, 2 * graph.genus - 2):
            rows = list(multidegrees_in(graph, search_box(graph, d, margin=1), d))
            fast = classify_many(graph, [m.degrees for m in rows], d)
            assert fast == [brute_classify(m) for m in rows], (graph, d)


def test_complementarity_of_bounds():
    for graph in generate_corpus(CorpusSpec(4, 4, stability=QUASISTABLE)):
        for d in (-3, 0, 1, 5):
            for mask in range(1, graph.full_mask):
                z = Subcurve.from_mask(graph, mask)
                assert basic_bounds(z.complement(), d).upper == d - basic_bounds(z, d).lower


def test_twist_examples(vine111, vine003):
    assert twist(_md(vine111, 1, 1), 1).degrees == (2, 2)
    md = _md(vine003, 2, -1)
    assert twist(md, 0) == md
    b1 = {m.degrees for m in enumerate_balanced(vine111, 1)}
    assert {reflect_twist(Multidegree(vine111, x), 1).degrees for x in b1} == b1


def test_twist_bijection_on_quasistable_corpus():
    for graph in generate_corpus(CorpusSpec(3, 4, stability=QUASISTABLE)):
        g = graph.genus
        for d in range(0, 2 * g - 2):
            base = {m.degrees: classify(m) for m in enumerate_balanced(graph, d)}
            for n in range(-2, 3):
                moved = {twist(Multidegree(graph, x), n).degrees: c for x, c in base.items()}
                target = {m.degrees: classify(m) for m in enumerate_balanced(graph, d + n * (2 * g - 2))}
                assert moved == target


def test_reflect_twist_on_stable_corpus():
    for graph in generate_corpus(CorpusSpec(3, 4)):
        g = graph.genus
        for d in range(0, 2 * g - 2):
            base = {m.degrees: classify(m) for m in enumerate_balanced(graph, d)}
            for n in (0, 1, 2):
                moved = {reflect_twist(Multidegree(graph, x), n).degrees: c for x, c in base.items()}
                target = {m.degrees: classify(m) for m in enumerate_balanced(graph, n * (2 * g - 2) - d)}
                assert moved == target


def test_reflect_twist_breaks_exceptional_pinning():
    chain = DualGraph((("v1", 1), ("e", 0), ("v2", 1)), (("v1", "e"), ("e", "v2")))
    md = _md(chain, 0, 1, 0)
    assert classify(md).is_balanced
    assert reflect_twist(md, 1).degrees[1] == -1
    assert classify(reflect_twist(md, 1)) is B.SEMIBALANCED_NOT_BALANCED
    assert brute_classify(reflect_twist(md, 1)) is B.SEMIBALANCED_NOT_BALANCED


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(generate_corpus(CorpusSpec(3, 5, stability=QUASISTABLE))), st.data())
def test_classify_matches_brute_on_random_multidegrees(graph, data):
    degs = data.draw(st.lists(st.integers(-6, 8), min_size=graph.n, max_size=graph.n))
    md = Multidegree(graph, tuple(degs))
    assert classify(md) is brute_classify(md)


def test_stably_balanced_means_no_lower_bound_attained():
    # on stable graphs, stably balanced means no connected proper Z attains its lower bound
    for graph in generate_corpus(CorpusSpec(3, 4)):
        for d in range(0, 2 * graph.genus - 2):
            for m in enumerate_balanced(graph, d):
                attains = any(basic_bounds(Subcurve.from_mask(graph, z), d).lower == m.on(z)
                              for z in graph.connected_proper_masks)
                assert (classify(m) is B.STABLY_BALANCED) == (not attains)
