import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lgsg.lp import GE, LE, LpProblem, solve_lp
from lgsg.milp import FEASIBLE, INFEASIBLE_STATUS, OPTIMAL, MilpProblem, solve_milp


def brute_force(c, A, rel, b, hi, nb, sense):
    best = None
    for bits in itertools.product([0.0, 1.0], repeat=nb):
        lo = np.zeros(len(c))
        h = np.array(hi, dtype=float)
        lo[:nb] = bits
        h[:nb] = bits
        sol = solve_lp(LpProblem(c, A, rel, b, lo=lo, hi=h, sense=sense))
        if sol.optimal and (best is None or (sol.objective > best if sense == "max" else sol.objective < best)):
            best = sol.objective
    return best


def random_problem(rng):
    nb, nc = int(rng.integers(1, 9)), int(rng.integers(0, 3))
    n, m = nb + nc, int(rng.integers(1, 8))
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    b = rng.integers(0, 12, size=m).astype(float)
    c = rng.integers(-9, 10, size=n).astype(float)
    hi = np.concatenate([np.ones(nb), np.full(nc, 4.0)])
    sense = "max" if rng.random() < 0.5 else "min"
    return c, A, [LE] * m, b, hi, nb, sense


def test_relaxation_gap_example():
    p = MilpProblem(LpProblem([1, 1], [[1, 1]], [LE], [1.5], sense="max"), [0, 1])
    r = solve_milp(p)
    assert r.status == OPTIMAL and r.objective == pytest.approx(1.0)


def test_knapsack():
    # weights 5, 4, 3 with capacity 8: {1, 3} (value 14) is the best feasible set
    p = MilpProblem(LpProblem([10, 6, 4], [[5, 4, 3]], [LE], [8], sense="max"), [0, 1, 2])
    r = solve_milp(p)
    assert r.status == OPTIMAL and r.objective == pytest.approx(14.0)
    np.testing.assert_array_equal(r.x, [1, 0, 1])


def test_contradictory_bounds_infeasible():
    p = MilpProblem(LpProblem([1.0], [[1.0], [1.0]], [GE, LE], [1.0, 0.0], sense="max"), [0])
    assert solve_milp(p).status == INFEASIBLE_STATUS


def test_fractional_infeasible_integer_problem():
    # 2x = 1 has the relaxed solution 0.5 but no binary one
    p = MilpProblem(LpProblem([1.0], [[2.0], [2.0]], [LE, GE], [1.0, 1.0], sense="max"), [0])
    assert solve_milp(p).status == INFEASIBLE_STATUS


def test_bruteforce_suite():
    rng = np.random.default_rng(77)
    for _ in range(60):
        c, A, rel, b, hi, nb, sense = random_problem(rng)
        r = solve_milp(MilpProblem(LpProblem(c, A, rel, b, hi=hi, sense=sense), np.arange(nb)))
        ref = brute_force(c, A, rel, b, hi, nb, sense)
        if ref is None:
            assert r.status == INFEASIBLE_STATUS
        else:
            assert r.status == OPTIMAL
            assert r.objective == pytest.approx(ref, abs=1e-6)
            assert r.bound == pytest.approx(r.objective, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_anytime_and_bound_validity(seed):
    rng = np.random.default_rng(seed)
    c, A, rel, b, hi, nb, _ = random_problem(rng)
    sense = "max"
    r = solve_milp(MilpProblem(LpProblem(c, A, rel, b, hi=hi, sense=sense), np.arange(nb)))
    ref = brute_force(c, A, rel, b, hi, nb, sense)
    incumbents = [t[1] for t in r.trace if t[1] is not None]
    assert incumbents == sorted(incumbents)
    if ref is not None:
        assert all(t[2] >= ref - 1e-6 for t in r.trace)


def test_node_limit_returns_incumbent_and_is_deterministic():
    rng = np.random.default_rng(3)
    n = 25
    w = rng.integers(5, 30, size=n).astype(float)
    v = w + rng.integers(0, 6, size=n)
    p = LpProblem(v, [w], [LE], [w.sum() / 2 + 0.5], sense="max")
    r1 = solve_milp(MilpProblem(p, np.arange(n)), node_limit=3)
    r2 = solve_milp(MilpProblem(p, np.arange(n)), node_limit=3)
    assert r1.nodes <= 3 and r1.limit_hit
    assert r1.status in (FEASIBLE, OPTIMAL) and r1.has_incumbent
    assert r1.bound >= r1.objective - 1e-9
    assert r1.x.tobytes() == r2.x.tobytes()
    assert not r1.wall_clock_limited


def test_time_limit_flagged():
    p = MilpProblem(LpProblem([1, 1], [[1, 1]], [LE], [1.5], sense="max"), [0, 1])
    r = solve_milp(p, time_limit=10.0)
    assert r.wall_clock_limited and r.status == OPTIMAL
