import numpy as np
import pytest

from lgsg.double_oracle import (TRACE_FIELDS, certify, equilibrium_gap, initial_subgame, run_double_oracle,
                                solve_full_matrix)
from lgsg.errors import InexactBr, MaxItersExceeded, ModeMismatch, NoPath
from lgsg.game import BIN, GameInstance, MixedStrategy
from lgsg.graph import LayeredGraph
from lgsg.scenarios import UnrollSpec, grid_world, random_game, unroll_pe

from conftest import DD, U, UU


def test_example1(ex1_bin):
    rep = run_double_oracle(ex1_bin, epsilon=1e-3)
    assert rep.converged and rep.value == pytest.approx(0.5, abs=1e-3)
    assert sorted(rep.x_d.probs) == pytest.approx([0.5, 0.5], abs=1e-3)
    assert set(rep.x_a.support) == {UU, DD}
    assert rep.x_a.prob(UU) == pytest.approx(0.5, abs=1e-3)


def test_trivial_game_converges_in_one_iteration():
    g = LayeredGraph([1, 1], [(0, 1)])
    game = GameInstance(g, LayeredGraph([1, 1], [(0, 1)]), targets={1: 3.0}, interdiction="EXPLICIT", mode=BIN)
    rep = run_double_oracle(game)
    assert rep.iterations == 1 and rep.value == 3.0 and rep.gap == 0.0


def test_initial_subgame_and_errors(ex1_bin, ex1_lin):
    state = initial_subgame(ex1_bin)
    assert state.matrix.shape == (1, 1)
    with pytest.raises(ModeMismatch):
        initial_subgame(ex1_lin)
    dead = LayeredGraph([1, 1, 1], [(0, 1)])
    game = GameInstance(dead, LayeredGraph([1, 1, 1], [(0, 1), (1, 2)]), interdiction="EXPLICIT", mode=BIN)
    with pytest.raises(NoPath):
        initial_subgame(game)
    with pytest.raises(ValueError):
        run_double_oracle(ex1_bin, epsilon=0)


def test_equilibrium_gap(ex1_bin):
    gap = equilibrium_gap(ex1_bin, MixedStrategy.pure(U), MixedStrategy.pure(UU), U, DD)
    assert gap == 1.0
    with pytest.raises(InexactBr):
        equilibrium_gap(ex1_bin, MixedStrategy.pure(U), MixedStrategy.pure(UU), U, DD, exact_a=False)


def _check_trace(rep, epsilon):
    prev = (0, 0)
    for row in rep.trace:
        assert set(row) == set(TRACE_FIELDS)
        assert row["sp_d"] <= row["sg_d"] and row["sp_a"] <= row["sg_a"]
        assert row["sg_d"] >= prev[0] and row["sg_a"] >= prev[1]
        prev = row["sg_d"], row["sg_a"]
        assert row["gap"] >= -1e-9
    last = rep.trace[-1]
    assert last["gap"] <= epsilon and last["exact_d"] and last["exact_a"]


@pytest.mark.parametrize("seed", range(20))
def test_random_games_match_full_matrix(seed):
    game = random_game(seed, mode=BIN)
    rep = run_double_oracle(game, epsilon=1e-6)
    full = solve_full_matrix(game)
    assert rep.value == pytest.approx(full.value, abs=1e-6)
    _check_trace(rep, 1e-6)
    gain_d, gain_a, _ = certify(game, rep.x_d, rep.x_a)
    assert max(gain_d, gain_a) <= 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_grid_matches_full_matrix(seed):
    game = unroll_pe(grid_world(3, 0.15, 0.15, seed=seed), UnrollSpec(horizon=5))
    rep = run_double_oracle(game, epsilon=1e-3)
    assert rep.value == pytest.approx(solve_full_matrix(game).value, abs=1e-3)
    _check_trace(rep, 1e-3)


def test_approximate_best_responses_still_certify():
    game = unroll_pe(grid_world(3, 0.1, 0.1, seed=7), UnrollSpec(horizon=5))
    rep = run_double_oracle(game, epsilon=1e-3, br_node_limit=1, resolve_period=5)
    assert rep.converged
    assert rep.value == pytest.approx(solve_full_matrix(game).value, abs=1e-3)
    _check_trace(rep, 1e-3)
    gain_d, gain_a, _ = certify(game, rep.x_d, rep.x_a)
    assert max(gain_d, gain_a) <= 1e-3 + 1e-9


def test_max_iters(tmp_path):
    game = unroll_pe(grid_world(3, 0.0, 0.0, seed=1), UnrollSpec(horizon=5))
    with pytest.raises(MaxItersExceeded) as info:
        run_double_oracle(game, epsilon=1e-9, max_iters=2)
    rep = info.value.report
    assert rep is not None and not rep.converged and rep.iterations == 2
    rep = run_double_oracle(game, max_iters=2, raise_on_max_iters=False, trace_csv=tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0].split(",") == TRACE_FIELDS and len(lines) == 3
    assert abs(sum(rep.x_d.probs) - 1) < 1e-9 and abs(sum(rep.x_a.probs) - 1) < 1e-9


def test_log_callback(ex1_bin):
    rows = []
    run_double_oracle(ex1_bin, log=rows.append)
    assert [r["iter"] for r in rows] == list(range(1, len(rows) + 1))
