"""Double oracle: grow path subgames until exact best responses certify an epsilon-equilibrium.

Each iteration solves the subgame, asks both oracles for a best response
against the subgame equilibrium, and adds any new paths.  With a time
budget the oracles may return inexact responses; those can never end the
loop, and a small approximate gap triggers re-solves with larger budgets.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InexactBr, MaxItersExceeded, ModeMismatch, NoPath
from .game import BIN, GameInstance, MixedStrategy, payoff_block, payoff_matrix
from .graph import Path, enumerate_paths, first_path
from .lp import solve_zero_sum
from .oracles import best_response, build_attacker_model, build_defender_model, update_model

SUPPORT_TOL = 1e-9
GAP_FLOOR = -1e-9
TRACE_FIELDS = ["iter", "gap", "sg_d", "sg_a", "sp_d", "sp_a", "exact_d", "exact_a", "elapsed_s"]


class SubgameState:
    """Restricted game over generated paths with a cached payoff submatrix."""

    def __init__(self, game: GameInstance, def_paths, att_paths):
        self.game = game
        self.def_paths: list[Path] = []
        self.att_paths: list[Path] = []
        self.matrix = np.zeros((0, 0))
        self.x_d = self.x_a = None
        self.value = None
        for p in def_paths:
            self.add_defender_path(p)
        for p in att_paths:
            self.add_attacker_path(p)

    def add_defender_path(self, path: Path) -> bool:
        path = tuple(path)
        if path in self.def_paths:
            return False
        row = payoff_block(self.game, [path], self.att_paths) if self.att_paths else np.zeros((1, 0))
        self.matrix = np.vstack([self.matrix, row])
        self.def_paths.append(path)
        return True

    def add_attacker_path(self, path: Path) -> bool:
        path = tuple(path)
        if path in self.att_paths:
            return False
        col = payoff_block(self.game, self.def_paths, [path]) if self.def_paths else np.zeros((0, 1))
        self.matrix = np.hstack([self.matrix, col])
        self.att_paths.append(path)
        return True

    def solve(self):
        sol = solve_zero_sum(self.matrix)
        self.x_d, self.x_a, self.value = sol.row, sol.col, sol.value
        return sol

    def defender_mixture(self) -> MixedStrategy:
        return MixedStrategy(self.def_paths, self.x_d)

    def attacker_mixture(self) -> MixedStrategy:
        return MixedStrategy(self.att_paths, self.x_a)

    @property
    def support_sizes(self):
        return int((self.x_d > SUPPORT_TOL).sum()), int((self.x_a > SUPPORT_TOL).sum())


@dataclass
class DoReport:
    x_d: MixedStrategy
    x_a: MixedStrategy
    value: float
    gap: float
    iterations: int
    converged: bool
    reason: str
    trace: list = field(default_factory=list)   # dicts keyed by TRACE_FIELDS
    elapsed: float = 0.0
    resolves: int = 0

    @property
    def subgame_sizes(self):
        last = self.trace[-1]
        return last["sg_d"], last["sg_a"]

    @property
    def support_sizes(self):
        return len(self.x_d.support), len(self.x_a.support)

    def write_trace(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=TRACE_FIELDS)
            w.writeheader()
            for row in self.trace:
                w.writerow(row)


def initial_subgame(game: GameInstance) -> SubgameState:
    if game.mode != BIN:
        raise ModeMismatch("double oracle is defined for BIN games")
    p_d, p_a = first_path(game.defender), first_path(game.attacker)
    if p_d is None:
        raise NoPath("defender graph has no source-terminal path")
    if p_a is None:
        raise NoPath("attacker graph has no source-terminal path")
    return SubgameState(game, [p_d], [p_a])


def equilibrium_gap(game: GameInstance, x_d: MixedStrategy, x_a: MixedStrategy, p_d: Path, p_a: Path,
                    exact_d: bool = True, exact_a: bool = True) -> float:
    """u(x_d, p_a) - u(p_d, x_a); only meaningful for exact best responses."""
    if not (exact_d and exact_a):
        raise InexactBr("equilibrium gap needs exact best responses")
    att = float(np.asarray(x_d.probs) @ payoff_block(game, x_d.support, [p_a])[:, 0])
    dfn = float(payoff_block(game, [p_d], x_a.support)[0] @ np.asarray(x_a.probs))
    return att - dfn


def _trimmed(paths, probs) -> MixedStrategy:
    keep = [k for k, q in enumerate(probs) if q > SUPPORT_TOL]
    total = float(sum(probs[k] for k in keep))
    return MixedStrategy([paths[k] for k in keep], [probs[k] / total for k in keep])


def run_double_oracle(game: GameInstance, epsilon: float = 1e-3, br_time_limit: float | None = None,
                      max_iters: int = 10_000, resolve_factor: float = 2.0, resolve_period: int = 20,
                      br_node_limit: int | None = None, trace_csv=None, raise_on_max_iters: bool = True,
                      log=None) -> DoReport:
    """Run the double oracle loop.

    ``br_time_limit`` (seconds) or ``br_node_limit`` make best responses
    approximate; every ``resolve_period``-th iteration is solved exactly.
    Raises MaxItersExceeded (carrying the best-so-far report) unless
    ``raise_on_max_iters`` is False.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    start = time.perf_counter()
    state = initial_subgame(game)
    approx = br_time_limit is not None or br_node_limit is not None
    def_model = att_model = None
    new_d = new_a = None
    trace, resolves = [], 0
    gap, reason, converged = np.inf, "max iterations", False
    it = 0
    for it in range(1, max_iters + 1):
        state.solve()
        mix_d, mix_a = state.defender_mixture(), state.attacker_mixture()
        if def_model is None:
            def_model = build_defender_model(game, mix_a)
            att_model = build_attacker_model(game, mix_d)
        else:
            update_model(def_model, new_a, mix_a)
            update_model(att_model, new_d, mix_d)

        exact_round = not approx or it % resolve_period == 0
        t_d = t_a = None if exact_round else br_time_limit
        n_d = n_a = None if exact_round else br_node_limit
        p_d, v_d, ex_d = best_response(def_model, time_limit=t_d, node_limit=n_d)
        p_a, v_a, ex_a = best_response(att_model, time_limit=t_a, node_limit=n_a)
        gap = v_a - v_d
        # a small gap from inexact responses proves nothing; buy more budget
        while gap < 10 * epsilon and not (ex_d and ex_a):
            resolves += 1
            if not ex_d:
                t_d = t_d * resolve_factor if t_d is not None else None
                n_d = int(np.ceil(n_d * resolve_factor)) if n_d is not None else None
                p_d, v_d, ex_d = best_response(def_model, time_limit=t_d, node_limit=n_d)
            if not ex_a:
                t_a = t_a * resolve_factor if t_a is not None else None
                n_a = int(np.ceil(n_a * resolve_factor)) if n_a is not None else None
                p_a, v_a, ex_a = best_response(att_model, time_limit=t_a, node_limit=n_a)
            gap = v_a - v_d

        sp_d, sp_a = state.support_sizes
        row = {"iter": it, "gap": gap, "sg_d": len(state.def_paths), "sg_a": len(state.att_paths),
               "sp_d": sp_d, "sp_a": sp_a, "exact_d": int(ex_d), "exact_a": int(ex_a),
               "elapsed_s": time.perf_counter() - start}
        trace.append(row)
        if log is not None:
            log(row)
        if ex_d and ex_a and gap <= epsilon:
            converged, reason = True, "gap below epsilon"
            break

        new_d = p_d if state.add_defender_path(p_d) else None
        new_a = p_a if state.add_attacker_path(p_a) else None
        if new_d is None and new_a is None and ex_d and ex_a:
            # cannot happen in exact arithmetic; retry once with a zero MILP gap
            p_d, v_d, ex_d = best_response(def_model, gap_tol=0.0)
            p_a, v_a, ex_a = best_response(att_model, gap_tol=0.0)
            new_d = p_d if state.add_defender_path(p_d) else None
            new_a = p_a if state.add_attacker_path(p_a) else None
            if new_d is None and new_a is None:
                reason = f"duplicate best responses with gap {gap:.3e} > epsilon"
                break

    if state.x_d is None or len(state.x_d) != len(state.def_paths) or len(state.x_a) != len(state.att_paths):
        state.solve()
    report = DoReport(x_d=_trimmed(state.def_paths, state.x_d), x_a=_trimmed(state.att_paths, state.x_a),
                      value=float(state.value), gap=float(gap), iterations=it, converged=converged,
                      reason=reason, trace=trace, elapsed=time.perf_counter() - start, resolves=resolves)
    if trace_csv is not None:
        report.write_trace(trace_csv)
    if not converged and reason == "max iterations" and raise_on_max_iters:
        raise MaxItersExceeded(f"no convergence within {max_iters} iterations (gap {gap:.3e})", report=report)
    return report


@dataclass
class FullMatrixResult:
    x_d: MixedStrategy
    x_a: MixedStrategy
    value: float
    shape: tuple


def solve_full_matrix(game: GameInstance, cap: int = 10**6) -> FullMatrixResult:
    """Enumerate every path pair and solve the matrix game directly."""
    M, P_d, P_a = payoff_matrix(game, cap=cap)
    sol = solve_zero_sum(M)
    return FullMatrixResult(_trimmed(P_d, sol.row), _trimmed(P_a, sol.col), sol.value, M.shape)


def certify(game: GameInstance, x_d: MixedStrategy, x_a: MixedStrategy):
    """Exact best responses against final strategies: (defender gain, attacker gain, value estimate).

    Gains are how much each player improves on u(x_d, x_a) by a pure deviation.
    """
    mid = float(np.asarray(x_d.probs) @ payoff_block(game, x_d.support, x_a.support) @ np.asarray(x_a.probs))
    _, v_d, _ = best_response(build_defender_model(game, x_a))
    _, v_a, _ = best_response(build_attacker_model(game, x_d))
    return mid - v_d, v_a - mid, mid


def enumeration_best_responses(game: GameInstance, x_d: MixedStrategy, x_a: MixedStrategy, cap: int = 10**6):
    """(min over defender paths of u(p_d, x_a), max over attacker paths of u(x_d, p_a)) by enumeration."""
    P_d = enumerate_paths(game.defender, cap)
    P_a = enumerate_paths(game.attacker, cap)
    v_d = float((payoff_block(game, P_d, x_a.support) @ np.asarray(x_a.probs)).min())
    v_a = float((np.asarray(x_d.probs) @ payoff_block(game, x_d.support, P_a)).max())
    return v_d, v_a
