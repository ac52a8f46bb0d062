import json

import pytest
from hypothesis import given, settings, strategies as st

from lgsg.errors import CapExceeded, InvalidGraph
from lgsg.graph import (LayeredGraph, chain_graph, complete_layers, count_paths, enumerate_paths, first_path,
                        live_edges, longest_path, validate)
from lgsg.scenarios import random_layered_graph

from conftest import D, DD, DU, U, UD, UU


def test_example1_graphs_valid(ex1_bin):
    assert validate(ex1_bin.attacker) == []
    assert validate(ex1_bin.defender) == []


def test_skip_layer_reported():
    g = LayeredGraph([1, 1, 1], [(0, 2)])
    assert any(p.startswith("edge skips layer") for p in validate(g))


def test_first_layer_singleton_reported():
    g = LayeredGraph([2, 1], [(0, 2), (1, 2)])
    assert any(p.startswith("first layer not singleton") for p in validate(g))


def test_backward_edge_and_duplicate_reported():
    g = LayeredGraph([1, 1, 1], [(0, 1), (1, 2), (1, 2), (2, 1)])
    problems = validate(g)
    assert any(p.startswith("duplicate edge") for p in problems)
    assert any(p.startswith("edge not forward") for p in problems)


def test_parallel_edges_with_distinct_labels_allowed():
    g = LayeredGraph([1, 1], [(0, 1), (0, 1)], edge_labels=["a", "b"])
    assert validate(g) == []
    assert count_paths(g) == 2


def test_unknown_vertex_rejected():
    with pytest.raises(InvalidGraph):
        LayeredGraph([1, 1], [(0, 5)])


def test_count_paths_example1(ex1_bin):
    assert count_paths(ex1_bin.attacker) == 4
    assert count_paths(ex1_bin.defender) == 2
    assert count_paths(chain_graph(7)) == 1


def test_enumerate_example1(ex1_bin):
    assert enumerate_paths(ex1_bin.defender, 10) == [U, D]
    assert enumerate_paths(ex1_bin.attacker, 10) == [UU, UD, DU, DD]
    assert enumerate_paths(chain_graph(4), 1) == [(0, 1, 2)]
    with pytest.raises(CapExceeded):
        enumerate_paths(ex1_bin.attacker, 3)


@pytest.mark.parametrize("w", range(1, 7))
@pytest.mark.parametrize("depth", range(1, 7))
def test_complete_layers_closed_form(w, depth):
    assert count_paths(complete_layers(w, depth)) == w ** depth


def test_counts_exceed_64_bits():
    g = complete_layers(6, 40)
    assert count_paths(g) == 6 ** 40 > 2 ** 64


def test_unreachable_vertices_kept():
    # vertex 2 in layer 1 has no in-edge
    g = LayeredGraph([1, 2, 1], [(0, 1), (1, 3), (2, 3)])
    assert validate(g) == []
    assert count_paths(g) == 1
    assert list(live_edges(g)) == [True, True, False]


def test_longest_path_ties_and_sign():
    g = LayeredGraph([1, 2, 1], [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert longest_path(g, [1, 1, 0, 0]) == (1.0, (0, 2))
    assert longest_path(g, [1, 2, 0, 0], maximize=False) == (1.0, (0, 2))
    assert longest_path(g, [1, 2, 0, 0]) == (2.0, (1, 3))


def test_json_roundtrip(ex1_bin):
    g = ex1_bin.attacker
    back = LayeredGraph.from_dict(json.loads(json.dumps(g.to_dict())))
    assert back == g and back.labels == g.labels


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), layers=st.integers(2, 6), width=st.integers(1, 4))
def test_enumeration_matches_count(seed, layers, width):
    g = random_layered_graph(seed, layers, width)
    assert validate(g) == []
    paths = enumerate_paths(g, 10**4)
    assert len(paths) == count_paths(g)
    assert len(set(paths)) == len(paths)
    assert paths == sorted(paths)
    assert all(g.is_path(p) for p in paths)
    assert first_path(g) == paths[0]
