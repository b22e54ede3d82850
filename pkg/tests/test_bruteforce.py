# -*- coding: utf-8 -*-
import networkx as nx
import pytest

from stc_bruteforce import (generic_rank_mc, hall_bruteforce, matching_bruteforce,
                            target_rank_mc, term_rank_bruteforce)
from stc_decision import decide
from stc_graph import BipartiteView, StructuredPattern, TargetSet, bipartite_view, build_system_digraph
from stc_structural import max_matching, term_rank


def networkx_matching_size(view):
    graph = nx.Graph()
    left = [('l', v) for v in view.left]
    right = [('r', v) for v in view.right]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from(right, bipartite=1)
    graph.add_edges_from((('l', l), ('r', r)) for l, r in view.edges)
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    return len(matching) // 2


def test_hall_bruteforce_example(example_pattern):
    view = bipartite_view(build_system_digraph(example_pattern), range(10))
    ok, smallest = hall_bruteforce(view)
    assert not ok
    assert smallest == frozenset({7, 9})


def test_hall_bruteforce_satisfied(example_pattern, example_targets):
    view = bipartite_view(build_system_digraph(example_pattern), example_targets.indices)
    assert hall_bruteforce(view) == (True, None)


def test_hall_bruteforce_size_guard():
    view = BipartiteView((0,), tuple(range(1, 22)), frozenset())
    with pytest.raises(ValueError):
        hall_bruteforce(view)


def test_matching_bruteforce_agrees(rng):
    for _ in range(60):
        nl, nr = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        left = tuple(range(nl))
        right = tuple(range(10, 10 + nr))
        edges = frozenset((l, r) for l in left for r in right if rng.random() < 0.3)
        view = BipartiteView(left, right, edges)
        size = matching_bruteforce(view)
        assert size == max_matching(view).size
        assert size == networkx_matching_size(view)


def test_matching_bruteforce_size_guard():
    edges = frozenset((l, r) for l in range(5) for r in range(10, 15))
    with pytest.raises(ValueError):
        matching_bruteforce(BipartiteView(tuple(range(5)), tuple(range(10, 15)), edges))


def test_term_rank_bruteforce_guards(example_pattern):
    with pytest.raises(ValueError):
        term_rank_bruteforce(example_pattern, 'B')
    big = StructuredPattern.from_pairs(11, 0, [(i, i) for i in range(11)], [])
    with pytest.raises(ValueError):
        term_rank_bruteforce(big)


def test_generic_rank_matches_term_rank(example_pattern):
    assert generic_rank_mc(example_pattern, trials=10) == term_rank(example_pattern) == 9
    assert generic_rank_mc(example_pattern, trials=10, which='AB') == 9


def test_generic_rank_of_selected_rows(example_pattern, example_targets):
    assert generic_rank_mc(example_pattern, trials=20, targets=example_targets) == 3


def test_target_rank_mc_example(example_pattern, example_targets):
    assert target_rank_mc(example_pattern, example_targets) == (True, 3)
    reached, observed = target_rank_mc(example_pattern)
    assert not reached
    assert observed == 9


def test_target_rank_mc_agrees_with_decision(make_pattern, make_targets, rng):
    for _ in range(40):
        n = int(rng.integers(1, 7))
        pattern = make_pattern(rng, n, 1, density=0.3, input_density=0.3)
        targets = make_targets(rng, n)
        reached, observed = target_rank_mc(pattern, targets, trials=5)
        assert reached is decide(pattern, targets).decision
        assert observed <= targets.k


def test_rank_helpers_reject_zero_trials(example_pattern):
    with pytest.raises(ValueError):
        generic_rank_mc(example_pattern, trials=0)
    with pytest.raises(ValueError):
        target_rank_mc(example_pattern, TargetSet.full(10), trials=0)
