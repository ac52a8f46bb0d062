"""Exact linear programming by a two-phase bounded-variable primal simplex.

The tableau is dense.  Entering variables follow Dantzig's rule (lowest
index on ties) and switch to Bland's rule after a run of degenerate pivots;
leaving rows tie-break on the lowest basic variable index.  Identical inputs
give bit-identical outputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NonFiniteEntry, NumericalFailure

FEAS_TOL = 1e-9
DUAL_TOL = 1e-7
PIVOT_TOL = 1e-7
OPT_TOL = 1e-10
BLAND_AFTER = 50

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

LE, EQ, GE = "<=", "=", ">="


@dataclass
class LpProblem:
    """min/max c.x + offset subject to rows ``A x (rel) b`` and ``lo <= x <= hi``."""

    c: np.ndarray
    A: np.ndarray
    rel: list
    b: np.ndarray
    lo: np.ndarray = None
    hi: np.ndarray = None
    sense: str = "min"
    offset: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.rel = list(self.rel)
        self.lo = np.zeros(n) if self.lo is None else np.asarray(self.lo, dtype=float).copy()
        self.hi = np.full(n, np.inf) if self.hi is None else np.asarray(self.hi, dtype=float).copy()
        m = self.A.shape[0]
        if not (self.b.size == m == len(self.rel) and self.lo.size == n == self.hi.size):
            raise ValueError("inconsistent LP dimensions")
        if not np.all(np.isfinite(self.b)):
            raise ValueError("right-hand sides must be finite")
        if any(r not in (LE, EQ, GE) for r in self.rel):
            raise ValueError(f"unknown relation in {set(self.rel)}")
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', not {self.sense!r}")

    @property
    def n_vars(self):
        return self.c.size

    @property
    def n_rows(self):
        return self.A.shape[0]


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _standardize(p: LpProblem):
    """Rewrite as min c'z, A'z = b', 0 <= z <= u with b' >= 0.

    Returns the pieces plus maps to recover x and the row duals.
    """
    n = p.n_vars
    sign = -1.0 if p.sense == "max" else 1.0
    cols = []      # (orig var, coefficient) per standard column
    shift = np.zeros(n)
    ub = []
    for j in range(n):
        lo, hi = p.lo[j], p.hi[j]
        if np.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            ub.append(hi - lo)
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
            ub.append(np.inf)
        else:
            cols.append((j, 1.0))
            ub.append(np.inf)
            cols.append((j, -1.0))
            ub.append(np.inf)
    idx = np.array([j for j, _ in cols], dtype=np.int64)
    coef = np.array([s for _, s in cols])
    A = p.A[:, idx] * coef[None, :]
    c = sign * p.c[idx] * coef
    b = p.b - p.A @ shift
    rel = list(p.rel)
    row_sign = np.ones(p.n_rows)
    for i in range(p.n_rows):
        if b[i] < 0:
            row_sign[i] = -1.0
            A[i] = -A[i]
            b[i] = -b[i]
            rel[i] = {LE: GE, GE: LE, EQ: EQ}[rel[i]]
    return A, b, rel, c, np.array(ub, dtype=float), idx, coef, shift, row_sign, sign


def _refactor(T, T0, basis, upper, flipped, cost):
    """Rebuild the tableau from the original rows, the basis and the bound flips."""
    m = T0.shape[0]
    A0 = T0.copy()
    for j in np.flatnonzero(flipped):
        A0[:, -1] -= A0[:, j] * upper[j]
        A0[:, j] = -A0[:, j]
    try:
        T[:m] = np.linalg.solve(A0[:, basis], A0)
    except np.linalg.LinAlgError:
        return False
    c_eff = np.where(flipped.astype(bool), -cost, cost)
    T[m, :-1] = c_eff - c_eff[basis] @ T[:m, :-1]
    T[m, -1] = -(c_eff[basis] @ T[:m, -1])
    return True


def _iterate(T, T0, basis, upper, flipped, can_enter, cost, max_iter):
    """Run the kernel; on a suspicious stop, refactor once and resume."""
    status, it = kernels.simplex_iterate(T, basis, upper, flipped, can_enter, max_iter,
                                         PIVOT_TOL, OPT_TOL, BLAND_AFTER)
    if status in (kernels.UNBOUNDED, kernels.NUMERICAL) and _refactor(T, T0, basis, upper, flipped, cost):
        status, more = kernels.simplex_iterate(T, basis, upper, flipped, can_enter, max_iter,
                                               PIVOT_TOL, OPT_TOL, BLAND_AFTER)
        it += more
    return status, it


def solve_lp(problem: LpProblem, max_iter: int | None = None) -> LpSolution:
    p = problem
    if np.any(p.lo > p.hi + FEAS_TOL):
        return LpSolution(INFEASIBLE)
    if np.any(np.isinf(p.lo) & (p.lo > 0)) or np.any(np.isinf(p.hi) & (p.hi < 0)):
        return LpSolution(INFEASIBLE)
    A, b, rel, c, ub, idx, coef, shift, row_sign, sign = _standardize(p)
    ub = np.maximum(ub, 0.0)
    m, ns = A.shape

    # slack/surplus columns, then artificials for rows without a slack basis
    slack_rows = [i for i in range(m) if rel[i] != EQ]
    art_rows = [i for i in range(m) if rel[i] != LE]
    n_sl, n_art = len(slack_rows), len(art_rows)
    ncols = ns + n_sl + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :ns] = A
    for k, i in enumerate(slack_rows):
        T[i, ns + k] = 1.0 if rel[i] == LE else -1.0
    basis = np.empty(m, dtype=np.int64)
    for k, i in enumerate(slack_rows):
        if rel[i] == LE:
            basis[i] = ns + k
    for k, i in enumerate(art_rows):
        T[i, ns + n_sl + k] = 1.0
        basis[i] = ns + n_sl + k
    T[:m, -1] = b
    T0 = T[:m].copy()
    upper = np.concatenate([ub, np.full(n_sl + n_art, np.inf)])
    flipped = np.zeros(ncols, dtype=np.uint8)
    can_enter = np.ones(ncols, dtype=np.uint8)
    if max_iter is None:
        max_iter = 50 * (m + ncols) + 1000
    iters = 0

    art_cols = np.arange(ns + n_sl, ncols)
    if n_art:
        # phase 1: minimize the sum of artificials
        T[m, :] = -T[art_rows, :].sum(axis=0)
        T[m, art_cols] = 0.0
        cost1 = np.zeros(ncols)
        cost1[art_cols] = 1.0
        status, it = _iterate(T, T0, basis, upper, flipped, can_enter, cost1, max_iter)
        iters += it
        if status != kernels.OPTIMAL:
            raise NumericalFailure(f"phase 1 ended with kernel status {status} after {it} iterations")
        infeas = -T[m, -1]
        if infeas > FEAS_TOL * (1.0 + np.abs(b).max(initial=0.0)):
            return LpSolution(INFEASIBLE, iterations=iters)
        upper[art_cols] = 0.0
        can_enter[art_cols] = 0

    # phase 2
    cost = np.concatenate([c, np.zeros(n_sl + n_art)])
    c_eff = np.where(flipped.astype(bool), -cost, cost)
    T[m, :ncols] = c_eff - c_eff[basis] @ T[:m, :ncols]
    T[m, -1] = -(c_eff[basis] @ T[:m, -1])
    status, it = _iterate(T, T0, basis, upper, flipped, can_enter, cost, max_iter)
    iters += it
    if status == kernels.UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=iters)
    if status != kernels.OPTIMAL:
        raise NumericalFailure(f"phase 2 ended with kernel status {status} after {it} iterations")

    z = np.zeros(ncols)
    z[basis] = T[:m, -1]
    fl = flipped.astype(bool)
    z[fl] = upper[fl] - z[fl]
    z = np.clip(z, 0.0, upper)
    x = shift.copy()
    np.add.at(x, idx, coef * z[:ns])

    # duals from B^T y = c_B on the unflipped standard columns
    full = np.zeros((m, ncols))
    full[:, :ns] = A
    for k, i in enumerate(slack_rows):
        full[i, ns + k] = 1.0 if rel[i] == LE else -1.0
    for k, i in enumerate(art_rows):
        full[i, ns + n_sl + k] = 1.0
    if m:
        try:
            y = np.linalg.solve(full[:, basis].T, cost[basis])
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular final basis") from exc
    else:
        y = np.zeros(0)
    duals = sign * row_sign * y
    reduced = p.c - p.A.T @ duals
    objective = float(p.c @ x + p.offset)
    return LpSolution(OPTIMAL, x=x, objective=objective, duals=duals, reduced_costs=reduced,
                      iterations=iters, info={"backend": kernels.BACKEND})


def max_violation(problem: LpProblem, x: np.ndarray) -> float:
    """Largest constraint or bound violation of x (0 when feasible)."""
    p = problem
    worst = 0.0
    if p.n_rows:
        ax = p.A @ x
        for i, r in enumerate(p.rel):
            d = ax[i] - p.b[i]
            v = max(d, 0.0) if r == LE else max(-d, 0.0) if r == GE else abs(d)
            worst = max(worst, v)
    worst = max(worst, float(np.max(p.lo - x, initial=0.0)), float(np.max(x - p.hi, initial=0.0)))
    return worst


# -- zero-sum matrix games --------------------------------------------------------

@dataclass
class ZeroSumSolution:
    row: np.ndarray
    col: np.ndarray
    value: float


def solve_zero_sum(matrix) -> ZeroSumSolution:
    """Nash equilibrium of a zero-sum game; the row player minimizes.

    One LP from the column player's side (maximize v with A y >= v, y in the
    simplex); the row strategy is read off its duals.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError("matrix must be 2-D and non-empty")
    if not np.all(np.isfinite(M)):
        raise NonFiniteEntry("payoff matrix contains non-finite entries")
    m, n = M.shape
    shift = 1.0 - M.min()
    Ms = M + shift  # all entries >= 1, so the shifted value is >= 1 and v can be bounded below by 0
    # variables: y_1..y_n, v
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A = np.zeros((m + 1, n + 1))
    A[:m, :n] = -Ms
    A[:m, -1] = 1.0
    A[m, :n] = 1.0
    rel = [LE] * m + [EQ]
    b = np.zeros(m + 1)
    b[m] = 1.0
    sol = solve_lp(LpProblem(c, A, rel, b, sense="max"))
    if not sol.optimal:
        raise NumericalFailure(f"matrix-game LP returned {sol.status}")
    col = np.clip(sol.x[:n], 0.0, None)
    col /= col.sum()
    row = np.clip(sol.duals[:m], 0.0, None)
    total = row.sum()
    if total <= 0:
        raise NumericalFailure("matrix-game LP returned a zero row strategy")
    row /= total
    return ZeroSumSolution(row, col, float(sol.x[-1] - shift))


def equilibrium_errors(matrix, row, col, value) -> tuple[float, float]:
    """How much each player could gain by a pure deviation from (row, col)."""
    M = np.asarray(matrix, dtype=float)
    col_gain = float(np.max(np.asarray(row) @ M) - value)   # column player deviates
    row_gain = float(value - np.min(M @ np.asarray(col)))   # row player deviates
    return row_gain, col_gain
