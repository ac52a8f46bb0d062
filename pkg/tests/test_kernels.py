import os
import subprocess
import sys

import numpy as np
import pytest

from lgsg import _kernels_py, kernels, lp
from lgsg.game import payoff_block
from lgsg.graph import enumerate_paths
from lgsg.scenarios import random_game

compiled = pytest.importorskip("lgsg._kernels")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


def test_fallback_forced_by_environment():
    env = dict(os.environ, LGSG_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from lgsg import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("seed", range(10))
def test_pair_sums_agree(seed, monkeypatch):
    game = random_game(seed, mode=["BIN", "LIN"][seed % 2])
    P_d = enumerate_paths(game.defender, 10**5)
    P_a = enumerate_paths(game.attacker, 10**5)
    monkeypatch.setattr(kernels, "pair_sums", compiled.pair_sums)
    a = payoff_block(game, P_d, P_a)
    monkeypatch.setattr(kernels, "pair_sums", _kernels_py.pair_sums)
    b = payoff_block(game, P_d, P_a)
    np.testing.assert_array_equal(a, b)


def _random_lp(rng, n, m):
    A = rng.normal(size=(m, n))
    b = A @ rng.uniform(0, 1, size=n) + rng.uniform(0.1, 1.0, size=m)
    return lp.LpProblem(rng.normal(size=n), A, [lp.LE] * m, b, hi=np.full(n, 2.0), sense="max")


@pytest.mark.parametrize("seed", range(10))
def test_simplex_backends_agree(seed, monkeypatch):
    rng = np.random.default_rng(seed)
    prob = _random_lp(rng, 15, 10)
    ref = lp.solve_lp(prob)
    monkeypatch.setattr(kernels, "simplex_iterate", _kernels_py.simplex_iterate)
    alt = lp.solve_lp(prob)
    assert ref.status == alt.status == lp.OPTIMAL
    np.testing.assert_array_equal(ref.x, alt.x)
    assert ref.objective == alt.objective


def test_refactor_reproduces_tableau():
    rng = np.random.default_rng(1)
    m, n = 5, 8
    T0 = np.hstack([rng.normal(size=(m, n)), np.eye(m), rng.uniform(1, 2, size=(m, 1))])
    T = np.vstack([T0, np.zeros(n + m + 1)])
    basis = np.arange(n, n + m)
    upper = np.full(n + m, np.inf)
    flipped = np.zeros(n + m, dtype=np.uint8)
    can_enter = np.ones(n + m, dtype=np.uint8)
    cost = np.concatenate([-rng.uniform(0.5, 1.0, size=n), np.zeros(m)])
    T[m, :-1] = cost
    kernels.simplex_iterate(T, basis, upper, flipped, can_enter, 100, lp.PIVOT_TOL, lp.OPT_TOL, lp.BLAND_AFTER)
    rebuilt = T.copy()
    assert lp._refactor(rebuilt, T0, basis, upper, flipped, cost)
    np.testing.assert_allclose(rebuilt, T, atol=1e-9)


def test_payoff_block_shape(ex1_bin):
    assert payoff_block(ex1_bin, [], []).shape == (0, 0)
