"""Mixed-binary linear programming by best-bound branch and bound.

Every node solves the LP relaxation with the binaries' bounds tightened by
the branching decisions.  Nodes are evaluated lazily: a child inherits its
parent's relaxation value as a key and is only solved when popped.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .lp import INFEASIBLE, UNBOUNDED, LpProblem, max_violation, solve_lp

INT_TOL = 1e-6
GAP_TOL = 1e-9
HEURISTIC_EVERY = 25

OPTIMAL = "Optimal"
FEASIBLE = "Feasible"
INFEASIBLE_STATUS = "Infeasible"
UNBOUNDED_STATUS = "Unbounded"
UNKNOWN = "Unknown"


@dataclass
class PathHint:
    """Marks binaries ``offset + e`` as the edge flows of a layered graph.

    The path heuristic follows, layer by layer, the out-edge with the largest
    relaxation value and fixes that path.
    """

    graph: object
    offset: int = 0
    edges: np.ndarray | None = None   # edge ids present in the model (default: all)


@dataclass
class MilpProblem:
    lp: LpProblem
    binaries: np.ndarray
    path_hint: PathHint | None = None

    def __post_init__(self):
        self.binaries = np.asarray(sorted(set(int(j) for j in self.binaries)), dtype=np.int64)
        n = self.lp.n_vars
        if self.binaries.size and (self.binaries.min() < 0 or self.binaries.max() >= n):
            raise ValueError("binary index out of range")
        lo, hi = self.lp.lo, self.lp.hi
        lo[self.binaries] = np.maximum(lo[self.binaries], 0.0)
        hi[self.binaries] = np.minimum(hi[self.binaries], 1.0)


@dataclass
class MilpReport:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    bound: float | None = None
    nodes: int = 0
    elapsed: float = 0.0
    trace: list = field(default_factory=list)   # (nodes, incumbent objective, bound, elapsed)
    wall_clock_limited: bool = False
    limit_hit: bool = False

    @property
    def has_incumbent(self):
        return self.x is not None

    @property
    def exact(self):
        return self.status == OPTIMAL


def _fixed_lp(p: LpProblem, lo, hi) -> LpProblem:
    return LpProblem(p.c, p.A, p.rel, p.b, lo=lo, hi=hi, sense=p.sense, offset=p.offset)


def _complete(p: LpProblem, binaries, values, lo, hi):
    """Fix binaries to 0/1 values and optimize the continuous part; None if infeasible."""
    lo2, hi2 = lo.copy(), hi.copy()
    lo2[binaries] = values
    hi2[binaries] = values
    if np.any(lo2 > hi2 + INT_TOL):
        return None
    sol = solve_lp(_fixed_lp(p, lo2, hi2))
    if not sol.optimal:
        return None
    return sol


def _round_heuristic(p, binaries, x, reduced, lo, hi):
    vals = np.clip(np.round(x[binaries]), lo[binaries], hi[binaries])
    sol = _complete(p, binaries, vals, lo, hi)
    if sol is not None:
        return sol
    # greedy single flips, cheapest reduced cost first
    free = [k for k in range(binaries.size) if lo[binaries[k]] < hi[binaries[k]]]
    free.sort(key=lambda k: (abs(reduced[binaries[k]]), k))
    for k in free[:8]:
        trial = vals.copy()
        trial[k] = 1.0 - trial[k]
        sol = _complete(p, binaries, trial, lo, hi)
        if sol is not None:
            return sol
    return None


def _path_heuristic(p, binaries, hint: PathHint, x, lo, hi):
    g = hint.graph
    present = np.zeros(g.n_edges, dtype=bool)
    present[hint.edges if hint.edges is not None else np.arange(g.n_edges)] = True
    col = {}
    if hint.edges is None:
        col = {e: hint.offset + e for e in range(g.n_edges)}
    else:
        col = {int(e): hint.offset + k for k, e in enumerate(hint.edges)}
    v, path = g.source, []
    last = g.n_layers - 1
    while g.layer_of[v] != last:
        outs = [e for e in g.out_edges[v] if present[e] and hi[col[e]] > 0.5]
        if not outs:
            return None
        e = max(outs, key=lambda e: (x[col[e]], -e))
        path.append(e)
        v = int(g.heads[e])
    vals = np.clip(np.round(x[binaries]), lo[binaries], hi[binaries])
    pos = {int(j): k for k, j in enumerate(binaries)}
    for e in col:
        if col[e] in pos:
            vals[pos[col[e]]] = 0.0
    for e in path:
        vals[pos[col[e]]] = 1.0
    return _complete(p, binaries, vals, lo, hi)


def solve_milp(problem: MilpProblem, time_limit: float | None = None, node_limit: int | None = None,
               gap_tol: float = GAP_TOL, trace: bool = True) -> MilpReport:
    """Branch and bound; node LPs are counted against ``node_limit``."""
    start = time.perf_counter()
    p = problem.lp
    B = problem.binaries
    sgn = 1.0 if p.sense == "max" else -1.0   # internal: maximize sgn*objective
    report = MilpReport(UNKNOWN, wall_clock_limited=time_limit is not None)
    inc_x, inc_val = None, -np.inf

    def offer(sol):
        nonlocal inc_x, inc_val
        val = sgn * sol.objective
        if val > inc_val + gap_tol or inc_x is None:
            x = sol.x.copy()
            x[B] = np.round(x[B])
            if max_violation(p, x) <= 1e-7:
                inc_x, inc_val = x, val
                return True
        return False

    def record(bound):
        if trace:
            report.trace.append((report.nodes, sgn * inc_val if inc_x is not None else None,
                                 sgn * bound, time.perf_counter() - start))

    heap = [(-np.inf, 0, p.lo.copy(), p.hi.copy())]   # (-key, seq, lo, hi); root key +inf
    seq = 1
    unbounded = False
    while heap:
        # the root is always solved so that heuristics get a chance at an incumbent
        if report.nodes and node_limit is not None and report.nodes >= node_limit:
            report.limit_hit = True
            break
        if report.nodes and time_limit is not None and time.perf_counter() - start >= time_limit:
            report.limit_hit = True
            break
        negkey, _, lo, hi = heapq.heappop(heap)
        if inc_x is not None and -negkey <= inc_val + gap_tol:
            heap.clear()
            break   # best-first: nothing left can improve
        report.nodes += 1
        sol = solve_lp(_fixed_lp(p, lo, hi))
        if sol.status == INFEASIBLE:
            continue
        if sol.status == UNBOUNDED:
            unbounded = True
            break
        val = sgn * sol.objective
        if inc_x is not None and val <= inc_val + gap_tol:
            continue
        xb = sol.x[B]
        frac = np.abs(xb - np.round(xb))
        if frac.size == 0 or frac.max() <= INT_TOL:
            if offer(sol):
                record(max([val] + [-k for k, *_ in heap]))
            continue
        if inc_x is None or report.nodes % HEURISTIC_EVERY == 1:
            found = None
            if problem.path_hint is not None:
                found = _path_heuristic(p, B, problem.path_hint, sol.x, lo, hi)
            if found is None:
                found = _round_heuristic(p, B, sol.x, sol.reduced_costs, lo, hi)
            if found is not None:
                offer(found)
        # branch on the most fractional binary, lowest index on ties
        dist = np.abs(xb - 0.5)
        k = int(np.argmin(dist))
        j = int(B[k])
        lo_up, hi_dn = lo.copy(), hi.copy()
        lo_up[j] = 1.0
        hi_dn[j] = 0.0
        heapq.heappush(heap, (-val, seq, lo, hi_dn))
        heapq.heappush(heap, (-val, seq + 1, lo_up, hi))
        seq += 2
        record(max([val] + [-k for k, *_ in heap]) if inc_x is None else max([inc_val] + [-k for k, *_ in heap]))

    report.elapsed = time.perf_counter() - start
    if unbounded:
        report.status = UNBOUNDED_STATUS
        return report
    open_bound = max((-k for k, *_ in heap), default=-np.inf)
    if inc_x is not None:
        report.x = inc_x
        report.objective = float(sgn * inc_val)
        bound = max(open_bound, inc_val)
        report.bound = float(sgn * bound)
        report.status = OPTIMAL if bound - inc_val <= gap_tol or not heap else FEASIBLE
        if report.status == OPTIMAL:
            report.bound = report.objective
    elif heap:
        report.status = UNKNOWN
        report.bound = float(sgn * open_bound) if np.isfinite(open_bound) else None
    else:
        report.status = INFEASIBLE_STATUS
    record(max(open_bound, inc_val))
    return report
