import pytest

from picard_strata.balance import BalanceClass, Multidegree, classify
from picard_strata.dual_graph import DualGraph, StabilityClass
from picard_strata.errors import ValidationError
from picard_strata.oracle import (
    QUASISTABLE, CorpusSpec, brute_classify, brute_d_general, canonical_form,
    generate_corpus, generate_multigraphs, multidegrees_in, search_box, verify,
)


def _keys(graphs):
    return {canonical_form(g.n, g.genera, g.multiplicity) for g in graphs}


def test_corpus_single_vertex_genus_two():
    got = generate_corpus(CorpusSpec(1, 2))
    assert sorted((g.genera, g.loops) for g in got) == [((0,), (2,)), ((1,), (1,)), ((2,), (0,))]


def test_corpus_two_vertex_genus_two_contains_vines():
    got = generate_corpus(CorpusSpec(2, 2, min_genus=2))
    keys = _keys(got)
    for vine in (DualGraph.vine(1, 1, 1), DualGraph.vine(0, 0, 3)):
        assert canonical_form(vine.n, vine.genera, vine.multiplicity) in keys


def test_corpus_empty_bounds():
    assert generate_corpus(CorpusSpec(0, 4)) == []


def test_corpus_refuses_large_bounds():
    with pytest.raises(ValidationError, match="too large"):
        generate_corpus(CorpusSpec(6, 3))
    with pytest.raises(ValidationError, match="too large"):
        generate_multigraphs(3, 11)


@pytest.mark.parametrize("g,count", [(2, 7), (3, 42)])
def test_stable_graph_counts_match_known_values(g, count):
    # every stable graph of genus g has at most 2g - 2 <= 4 vertices
    assert len(generate_corpus(CorpusSpec(4, g, min_genus=g))) == count


def test_corpus_is_deduplicated_and_deterministic():
    spec = CorpusSpec(4, 4, stability=QUASISTABLE)
    a = generate_corpus(spec)
    assert len(_keys(a)) == len(a)
    assert all(g.is_quasistable for g in a)
    assert a == generate_corpus(CorpusSpec(4, 4, stability=QUASISTABLE))


def test_canonical_form_is_relabelling_invariant():
    from itertools import permutations
    base = DualGraph.from_data([1, 0, 0, 2], [(0, 1), (1, 2), (2, 3), (1, 3), (0, 0), (2, 2)])
    key = canonical_form(base.n, base.genera, base.multiplicity)
    for perm in permutations(range(4)):
        relabelled = DualGraph.from_data([base.genera[perm.index(i)] for i in range(4)],
                                         [(perm[a], perm[b]) for a, b in base.edge_indices])
        assert canonical_form(4, relabelled.genera, relabelled.multiplicity) == key


def test_loopless_multigraph_counts():
    # connected multigraphs without loops: 1 on one vertex, one per edge count on two
    graphs = generate_multigraphs(2, 4, loops=False)
    assert sorted(len(g.edges) for g in graphs) == [0, 1, 2, 3, 4]


def test_brute_classify_examples(vine003, vine111):
    for md in multidegrees_in(vine003, search_box(vine003, 1, margin=2), 1):
        assert brute_classify(md) is classify(md)
    assert brute_classify(Multidegree(vine111, (1, 1))) is BalanceClass.STABLY_BALANCED
    assert brute_classify(Multidegree(vine111, (2, -1))) is BalanceClass.NOT_SEMIBALANCED


def test_brute_d_general_examples(vine111):
    assert brute_d_general(vine111, 1) is False
    assert brute_d_general(DualGraph((("x", 3),)), 0) is True
    assert brute_d_general(vine111, 2) is True


def test_verify_small_corpora():
    assert verify(generate_corpus(CorpusSpec(3, 4))) is None
    assert verify(generate_corpus(CorpusSpec(3, 3, stability=QUASISTABLE))) is None


def test_verify_with_process_pool():
    assert verify(generate_corpus(CorpusSpec(2, 4)), workers=2) is None


def test_corpus_stability_filter():
    spec = CorpusSpec(3, 3, stability=frozenset({StabilityClass.QUASISTABLE_NOT_STABLE}))
    graphs = generate_corpus(spec)
    assert graphs and all(g.stability is StabilityClass.QUASISTABLE_NOT_STABLE for g in graphs)
