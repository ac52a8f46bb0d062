import itertools
import json

import numpy as np
import pytest

from lgsg.errors import EmptyFormula, EmptyStartSet, NoExit, SetupTooLong
from lgsg.game import EDGE_EQUALITY, MixedStrategy, expected_utility, payoff_matrix, utility
from lgsg.graph import count_paths, forward_counts, enumerate_paths, validate
from lgsg.lp import solve_zero_sum
from lgsg.oracles import best_response, build_defender_model
from lgsg.scenarios import (AT, CNF, LI, PhysicalGraph, UnrollSpec, build_3sat_game, build_maxsat_br_fixture,
                            grid_index, grid_world, habitat_values, random_cnf, random_layered_graph,
                            random_values, unroll, unroll_at, unroll_li, unroll_pe)
from lgsg.verify import max_satisfiable, satisfiable


def undirected_count(edges):
    return len({tuple(sorted(e)) for e in edges})


def test_grid_counts():
    g = grid_world(2, 0, 0, seed=1)
    assert g.n == 4 and undirected_count(g.edges_d) == 4 and undirected_count(g.edges_a) == 4
    g = grid_world(5, 0, 0, seed=1)
    assert g.n == 25 and len(g.edges_d) == 40 and len(g.edges_a) == 40
    g = grid_world(5, 0, 1, seed=1)
    assert g.edges_a == [] and len(g.edges_d) == 40
    assert g.labels[grid_index(5, 2, 3)] == "23"


def test_grid_is_deterministic_under_seed():
    a = grid_world(5, 0.3, 0.3, seed=42)
    b = grid_world(5, 0.3, 0.3, seed=42)
    assert a.edges_d == b.edges_d and a.edges_a == b.edges_a
    assert random_values(a, 3) == random_values(b, 3)
    vals = random_values(a, 3)
    assert all(1 <= v <= 10 for v in vals.values())
    with pytest.raises(ValueError):
        grid_world(1)
    with pytest.raises(ValueError):
        grid_world(3, 1.5)


def triangle_physical():
    # triangle A, B, C; the defender alone may stay at A; no other waiting
    tri = [(0, 1), (1, 2), (0, 2)]
    return PhysicalGraph(labels=["A", "B", "C"], edges_d=tri + [(0, 0)], edges_a=tri, starts_d=[0], starts_a=[1])


def test_pe_triangle_shapes():
    game = unroll_pe(triangle_physical(), UnrollSpec(horizon=3, allow_waiting=False))
    g_d, g_a = game.defender, game.attacker
    assert g_d.layer_sizes == (1, 3, 3, 3) == g_a.layer_sizes
    assert g_d.n_edges == 1 + 2 * 7 and g_a.n_edges == 1 + 2 * 6
    assert (1, 4) in g_d.edges and (4, 7) in g_d.edges          # stay edges A -> A
    assert not any(g_a.labels[t] == g_a.labels[h] for t, h in g_a.edges[1:])
    # unreachable copies in the first physical layer are present but idle
    reach_d = {h for t, h in g_d.edges if t == 0}
    assert reach_d == {1}
    assert {h for t, h in g_a.edges if t == 0} == {2}
    assert count_paths(g_d) == 3 + 2 + 2 and count_paths(g_a) == 2 * 2
    assert validate(g_d) == [] and validate(g_a) == []


def test_pe_small_grid_defender():
    game = unroll_pe(grid_world(2, 0, 0, seed=0), UnrollSpec(horizon=4))
    g = game.defender
    assert g.layer_sizes == (1, 4, 4, 4, 4)
    assert g.n_edges == 1 + 3 * 12
    assert g.labels[g.heads[0]] == "11"
    assert count_paths(g) == 27


def test_pe_single_step():
    game = unroll_pe(grid_world(2, 0, 0, seed=0), UnrollSpec(horizon=1))
    assert game.defender.layer_sizes == (1, 4)
    assert game.defender.n_edges == 1 and game.attacker.n_edges == 1
    M, _, _ = payoff_matrix(game)
    assert M.tolist() == [[1.0]]      # different start corners, no interdiction


def test_empty_start_set():
    with pytest.raises(EmptyStartSet):
        PhysicalGraph(labels=["a"], edges_d=[], edges_a=[], starts_d=[], starts_a=[0])


def at_semantics(game, phys, ts, p_d, p_a):
    """Independent co-location rule: caught when sharing a location before the plant completes."""
    n = phys.n
    g_d, g_a = game.defender, game.attacker
    W = ts + 1
    def_locs = [(int(g_d.heads[e]) - 1) % n for e in p_d]
    att = [divmod((int(g_a.heads[e]) - 1) % (n * W), n) for e in p_a]   # (w, v)
    done_before = False
    for k, ((w, v), dv) in enumerate(zip(att, def_locs)):
        if dv == v and not done_before:
            return 0.0
        done_before = ts >= 1 and w == ts
    w_last, v_last = att[-1]
    return phys.value(v_last) if w_last == ts else 0.0


@pytest.mark.parametrize("ts", [0, 1, 2])
def test_at_matches_colocation_rule(ts):
    phys = grid_world(2, 0, 0, seed=0)
    game = unroll_at(phys, UnrollSpec(horizon=3, domain=AT, t_setup=ts))
    assert validate(game.attacker) == []
    for p_d in enumerate_paths(game.defender, 10**4):
        for p_a in enumerate_paths(game.attacker, 10**4):
            assert utility(game, p_d, p_a) == at_semantics(game, phys, ts, p_d, p_a)


def test_at_small_grid_and_invariants():
    phys = grid_world(2, 0, 0, seed=0)
    game = unroll_at(phys, UnrollSpec(horizon=3, domain=AT, t_setup=1))
    g_a = game.attacker
    assert g_a.layer_sizes == (1, 8, 8, 8)
    assert game.defender.layer_sizes == (1, 4, 4, 4)
    assert not any("~w" in lab for lab in game.defender.labels)
    for t, h in g_a.edges[1:]:
        wt = 1 if "~w1" in g_a.labels[t] else 0
        wh = 1 if "~w1" in g_a.labels[h] else 0
        assert 0 <= wh - wt <= 1
    assert all("~w1" in g_a.labels[v] for v, r in enumerate(game.target_values) if r > 0)


def test_at_zero_setup_is_pe():
    phys = grid_world(3, 0.2, 0.2, seed=5)
    spec = UnrollSpec(horizon=3)
    a = payoff_matrix(unroll_at(phys, UnrollSpec(horizon=3, domain=AT, t_setup=0)))[0]
    b = payoff_matrix(unroll_pe(phys, spec))[0]
    np.testing.assert_array_equal(a, b)


def test_at_setup_too_long():
    with pytest.raises(SetupTooLong):
        unroll_at(grid_world(2), UnrollSpec(horizon=2, domain=AT, t_setup=2))


def li_phys(S=2, exits=None):
    phys = grid_world(S, 0, 0, seed=0)
    phys.exits = exits if exits is not None else [grid_index(S, S, S)]
    phys.starts_a = [0]
    phys.starts_d = [grid_index(S, S, 1)]
    return phys


def test_li_sink_chains():
    game = unroll_li(li_phys(), UnrollSpec(horizon=4, domain=LI, gamma=0.9))
    g_a = game.attacker
    last = [g_a.labels[v] for v in g_a.terminals]
    assert sorted(l for l in last if l.startswith("sink")) == ["sink:t0", "sink:t1", "sink:t2"]
    assert not any(l.startswith("sink") for l in game.defender.labels)
    for v in range(g_a.n_vertices):
        if g_a.labels[v].startswith("sink") and v not in g_a.terminals:
            outs = g_a.out_edges[v]
            assert len(outs) == 1 and g_a.labels[g_a.heads[outs[0]]] == g_a.labels[v]
    assert validate(g_a) == []


def test_li_targets():
    game = unroll_li(li_phys(), UnrollSpec(horizon=4, domain=LI, gamma=1.0))
    sinks = {game.attacker.labels[v]: game.target_values[v] for v in game.attacker.terminals
             if game.attacker.labels[v].startswith("sink")}
    assert sinks and all(r == pytest.approx(10.0) for r in sinks.values())
    game = unroll_li(li_phys(), UnrollSpec(horizon=4, domain=LI, gamma=0.5))
    sinks = {game.attacker.labels[v]: game.target_values[v] for v in game.attacker.terminals
             if game.attacker.labels[v].startswith("sink")}
    # earliest exit from (1,1) to (2,2) takes two moves
    assert sinks["sink:t2"] == pytest.approx(10.0)
    reach = forward_counts(game.attacker)
    assert max(game.target_values[v] for v in game.attacker.terminals if reach[v]) == pytest.approx(10.0)
    phys = li_phys()
    phys.starts_a = [grid_index(2, 1, 2)]         # one move from the exit
    game = unroll_li(phys, UnrollSpec(horizon=4, domain=LI, gamma=0.5))
    sinks = {game.attacker.labels[v]: game.target_values[v] for v in game.attacker.terminals
             if game.attacker.labels[v].startswith("sink")}
    assert sinks["sink:t1"] == pytest.approx(10.0)
    assert sinks["sink:t1"] / sinks["sink:t2"] == pytest.approx(2.0)
    with pytest.raises(NoExit):
        unroll_li(li_phys(exits=[]), UnrollSpec(horizon=3, domain=LI))


def test_unroll_dispatch_and_habitats():
    phys = li_phys(3)
    assert unroll(phys, UnrollSpec(horizon=3)).name.startswith("pe")
    assert unroll(phys, UnrollSpec(horizon=3, domain=AT, t_setup=1)).name.startswith("at")
    assert unroll(phys, UnrollSpec(horizon=3, domain=LI)).name.startswith("li")
    vals = habitat_values(phys, [((1.0, 1.0), 2.0)], "LIN")
    assert vals[0] == pytest.approx(2.0)                  # singular point clamped to the score
    assert vals[1] == pytest.approx(2.0)
    exp_vals = habitat_values(phys, [((1.0, 1.0), 2.0)], "EXP")
    assert exp_vals[1] == pytest.approx(2.0 * np.exp(-1.0))


def test_physical_json_roundtrip(tmp_path):
    phys = grid_world(3, 0.2, 0.1, seed=9)
    phys.exits = [8]
    phys.values = {0: 2.0, 8: 5.0}
    path = tmp_path / "phys.json"
    path.write_text(json.dumps(phys.to_dict()))
    back = PhysicalGraph.load(path)
    assert back.to_dict() == phys.to_dict()


def test_3sat_examples():
    sat = build_3sat_game(CNF(1, [[1]]))
    assert solve_zero_sum(payoff_matrix(sat)[0]).value == pytest.approx(0.0, abs=1e-12)
    unsat = build_3sat_game(CNF(1, [[1], [-1]]))
    assert solve_zero_sum(payoff_matrix(unsat)[0]).value == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(EmptyFormula):
        build_3sat_game(CNF(2, []))
    with pytest.raises(EmptyFormula):
        build_3sat_game(CNF(2, [[1], []]))


def test_maxsat_examples():
    game, x_a = build_maxsat_br_fixture(CNF(1, [[1], [-1]]))
    _, v, exact = best_response(build_defender_model(game, x_a))
    assert exact and v == pytest.approx(1.0, abs=1e-12)
    game, x_a = build_maxsat_br_fixture(CNF(2, [[1, 2]]))
    _, v, _ = best_response(build_defender_model(game, x_a))
    assert v == pytest.approx(0.0, abs=1e-12)
    # every attacker path picks exactly one of three edges per variable
    assert all(len(p) == 2 for p in x_a.support)


def test_maxsat_payoff_counts_unsatisfied():
    cnf = CNF(3, [[1, -2], [2, 3], [-1, -3], [1, 2, 3]])
    game, x_a = build_maxsat_br_fixture(cnf)
    for bits in itertools.product([False, True], repeat=3):
        p_d = tuple(2 * i + (0 if b else 1) for i, b in enumerate(bits))
        u = expected_utility(game, MixedStrategy.pure(p_d), x_a)
        assert u == pytest.approx(len(cnf.clauses) - cnf.satisfied_count(bits))


def test_dimacs_parse():
    cnf = CNF.parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3\n0\n")
    assert cnf.n_vars == 3 and cnf.clauses == ((1, -2), (2, 3))


@pytest.mark.parametrize("seed", range(10))
def test_random_sat_fixtures(seed):
    rng = np.random.default_rng(seed)
    cnf = random_cnf(int(rng.integers(1, 7)), int(rng.integers(1, 7)), rng)
    value = solve_zero_sum(payoff_matrix(build_3sat_game(cnf))[0]).value
    assert (abs(value) <= 1e-9) == satisfiable(cnf)
    game, x_a = build_maxsat_br_fixture(cnf)
    _, v, _ = best_response(build_defender_model(game, x_a))
    assert v == pytest.approx(len(cnf.clauses) - max_satisfiable(cnf), abs=1e-9)


def test_random_layered_graph_is_valid():
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = random_layered_graph(rng, int(rng.integers(2, 7)), 4, density=float(rng.uniform(0.1, 0.9)))
        assert validate(g) == []
        fwd = count_paths(g)
        assert fwd >= 1
        assert all(g.in_edges[v] for v in range(1, g.n_vertices))
