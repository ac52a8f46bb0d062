import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lgsg.errors import CapExceeded, ModeMismatch
from lgsg.flows import (best_response_values, bilinear_value, decompose_flow, expand_markov,
                        flow_from_distribution, flow_problems, markov_policy, solve_linear_ne)
from lgsg.game import BIN, EXPLICIT, LIN, GameInstance, MixedStrategy, expected_utility, payoff_matrix
from lgsg.graph import LayeredGraph, complete_layers, enumerate_paths
from lgsg.lp import solve_zero_sum
from lgsg.scenarios import random_game

from conftest import D, DD, DU, U, UD, UU

HALF_FLOW = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]


def test_flow_from_distribution_examples(ex1_bin):
    g = ex1_bin.attacker
    f = flow_from_distribution(g, MixedStrategy.uniform([UU, DD]))
    np.testing.assert_allclose(f, HALF_FLOW)
    np.testing.assert_allclose(flow_from_distribution(g, MixedStrategy.uniform([UU, UD, DU, DD])), f)
    ind = flow_from_distribution(g, MixedStrategy.pure(UD))
    assert ind.tolist() == [1, 0, 1, 0, 0, 1, 0, 1]
    assert flow_problems(g, f) == []


def test_markov_expansion_examples(ex1_bin):
    g = ex1_bin.attacker
    x = expand_markov(g, markov_policy(g, np.array(HALF_FLOW)))
    assert x.support == (UU, UD, DU, DD)
    np.testing.assert_allclose(x.probs, [0.25] * 4)
    ind = flow_from_distribution(g, MixedStrategy.pure(DU))
    x = expand_markov(g, markov_policy(g, ind))
    assert x.support == (DU,) and x.probs == (1.0,)
    assert expand_markov(g, markov_policy(g, np.array(HALF_FLOW)), cap=10).probs == (0.25,) * 4
    with pytest.raises(CapExceeded):
        expand_markov(g, markov_policy(g, np.array(HALF_FLOW)), cap=3)


def test_zero_reach_vertex_has_no_policy_row(ex1_bin):
    g = ex1_bin.attacker
    policy = markov_policy(g, flow_from_distribution(g, MixedStrategy.pure(UU)))
    assert 3 not in policy            # vertex C is never reached
    assert policy[0] == {0: 1.0}


def test_decompose_examples(ex1_bin):
    g = ex1_bin.attacker
    x = decompose_flow(g, np.array(HALF_FLOW))
    assert len(x.support) == 2
    np.testing.assert_allclose(x.probs, [0.5, 0.5])
    np.testing.assert_allclose(flow_from_distribution(g, x), HALF_FLOW, atol=1e-12)
    assert decompose_flow(g, flow_from_distribution(g, MixedStrategy.pure(UD))).support == (UD,)
    par = complete_layers(4, 2)   # 4 routes of 2 edges, source fans out to 4
    routes = [(k, 4 + 4 * k + k) for k in range(4)]
    f = flow_from_distribution(par, MixedStrategy.uniform(routes))
    x = decompose_flow(par, f)
    assert sorted(x.support) == sorted(routes) and x.probs == (0.25,) * 4


def test_linear_ne_example1(ex1_lin):
    f_d, f_a, value = solve_linear_ne(ex1_lin)
    assert value == pytest.approx(-1.0, abs=1e-9)
    assert f_d[0] == pytest.approx(0.5, abs=1e-9) and f_d[1] == pytest.approx(0.5, abs=1e-9)
    x_a = expand_markov(ex1_lin.attacker, markov_policy(ex1_lin.attacker, f_a))
    assert x_a.prob(UU) == pytest.approx(x_a.prob(DD), abs=1e-9)
    def_val, att_val, _, _ = best_response_values(ex1_lin, f_d, f_a)
    assert att_val <= value + 1e-9 and def_val >= value - 1e-9


def test_linear_ne_mode_and_trivial_cases(ex1_bin):
    with pytest.raises(ModeMismatch):
        solve_linear_ne(ex1_bin)
    g_d = LayeredGraph([1, 1], [(0, 1)], labels=["s", "a"])
    g_a = LayeredGraph([1, 2], [(0, 1), (0, 2)], labels=["s", "a", "b"])
    safe = GameInstance(g_d, g_a, targets={1: 1, 2: 1}, interdiction="SHARED_HEAD_VERTEX", mode=LIN)
    assert solve_linear_ne(safe)[2] == pytest.approx(0.0, abs=1e-12)
    zero = GameInstance(g_d, g_a, interdiction=EXPLICIT, mode=LIN, Q={})
    assert solve_linear_ne(zero)[2] == pytest.approx(0.0, abs=1e-12)


def _mix(rng, paths):
    k = int(rng.integers(1, len(paths) + 1))
    idx = rng.choice(len(paths), size=k, replace=False)
    return MixedStrategy([paths[i] for i in idx], rng.dirichlet(np.ones(k)))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_flows_make_utility_bilinear(seed):
    game = random_game(seed, mode=LIN)
    rng = np.random.default_rng(seed)
    x_d = _mix(rng, enumerate_paths(game.defender, 10**5))
    x_a = _mix(rng, enumerate_paths(game.attacker, 10**5))
    f_d = flow_from_distribution(game.defender, x_d)
    f_a = flow_from_distribution(game.attacker, x_a)
    assert bilinear_value(game, f_d, f_a) == pytest.approx(expected_utility(game, x_d, x_a), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_decompose_roundtrip(seed):
    game = random_game(seed, mode=BIN)
    rng = np.random.default_rng(seed)
    for g in (game.defender, game.attacker):
        f = flow_from_distribution(g, _mix(rng, enumerate_paths(g, 10**5)))
        x = decompose_flow(g, f)
        assert len(x.support) <= g.n_edges
        np.testing.assert_allclose(flow_from_distribution(g, x), f, atol=1e-9)
        assert flow_problems(g, f) == []


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_linear_ne_matches_matrix_game(seed):
    game = random_game(seed, mode=LIN, max_layers=5)
    f_d, f_a, value = solve_linear_ne(game)
    assert flow_problems(game.defender, f_d, tol=1e-7) == []
    assert flow_problems(game.attacker, f_a, tol=1e-7) == []
    M, _, _ = payoff_matrix(game, cap=10**5)
    assert value == pytest.approx(solve_zero_sum(M).value, abs=1e-6)
    def_val, att_val, _, _ = best_response_values(game, f_d, f_a)
    assert att_val <= value + 1e-6
    assert def_val >= value - 1e-6


def test_markov_witness(ex1_bin):
    M, P_d, P_a = payoff_matrix(ex1_bin)
    sol = solve_zero_sum(M)
    x_a = MixedStrategy(P_a, sol.col).trimmed()
    assert set(x_a.support) == {UU, DD}
    g = ex1_bin.attacker
    markov = expand_markov(g, markov_policy(g, flow_from_distribution(g, x_a)))
    worst = min(expected_utility(ex1_bin, MixedStrategy.pure(p), markov) for p in (U, D))
    assert worst == pytest.approx(0.25, abs=1e-12)
    assert worst < sol.value - 0.2
