"""Unit flows on layered graphs and the polynomial-time solver for linear utilities.

A flow is a plain ``ndarray`` indexed by edge id.  Flows are the Markovian
strategies: many path distributions share one flow, and for linear
utilities the payoff only depends on the two flows.
"""
from __future__ import annotations

import numpy as np

from .errors import CapExceeded, ModeMismatch
from .game import LIN, GameInstance, MixedStrategy
from .graph import LayeredGraph, longest_path
from .lp import EQ, GE, LpProblem, NumericalFailure, solve_lp

FLOW_TOL = 1e-9
MASS_TOL = 1e-12


def flow_from_distribution(graph: LayeredGraph, x: MixedStrategy) -> np.ndarray:
    f = np.zeros(graph.n_edges)
    for path, q in zip(x.support, x.probs):
        f[list(path)] += q
    return f


def flow_problems(graph: LayeredGraph, f: np.ndarray, tol: float = FLOW_TOL) -> list[str]:
    f = np.asarray(f, dtype=float)
    out = []
    if f.shape != (graph.n_edges,):
        return [f"flow has shape {f.shape}, expected ({graph.n_edges},)"]
    if (f < -tol).any():
        out.append("negative edge flow")
    src = f[list(graph.out_edges[graph.source])].sum()
    if abs(src - 1.0) > tol:
        out.append(f"source out-flow {src!r} != 1")
    last = graph.n_layers - 1
    for v in range(1, graph.n_vertices):
        if graph.layer_of[v] == last:
            continue
        inflow = f[list(graph.in_edges[v])].sum()
        outflow = f[list(graph.out_edges[v])].sum()
        if abs(inflow - outflow) > tol:
            out.append(f"conservation violated at vertex {v}: in {inflow!r}, out {outflow!r}")
    return out


def markov_policy(graph: LayeredGraph, f: np.ndarray) -> dict[int, dict[int, float]]:
    """Per-vertex conditional edge probabilities f(e|v); zero-reach vertices get no row."""
    f = np.asarray(f, dtype=float)
    policy = {}
    for v in range(graph.n_vertices):
        outs = graph.out_edges[v]
        if not outs:
            continue
        total = f[list(outs)].sum()
        if total <= MASS_TOL:
            continue
        policy[v] = {e: f[e] / total for e in outs if f[e] > 0}
    return policy


def expand_markov(graph: LayeredGraph, policy: dict[int, dict[int, float]], cap: int = 10**5) -> MixedStrategy:
    """Path distribution x(p) = prod f(e|v), dropping paths with mass below 1e-12."""
    paths, probs = [], []
    last = graph.n_layers - 1
    stack = [(graph.source, (), 1.0)]
    while stack:
        v, prefix, mass = stack.pop()
        if graph.layer_of[v] == last:
            paths.append(prefix)
            probs.append(mass)
            if len(paths) > cap:
                raise CapExceeded(f"Markov expansion has more than {cap} paths")
            continue
        for e, q in sorted(policy.get(v, {}).items(), reverse=True):
            m = mass * q
            if m >= MASS_TOL:
                stack.append((int(graph.heads[e]), prefix + (e,), m))
    total = sum(probs)
    order = sorted(range(len(paths)), key=lambda k: paths[k])
    return MixedStrategy([paths[k] for k in order], [probs[k] / total for k in order])


def decompose_flow(graph: LayeredGraph, f: np.ndarray, tol: float = MASS_TOL) -> MixedStrategy:
    """Peel paths off a unit flow, always following the largest residual out-edge."""
    res = np.array(f, dtype=float)
    paths, weights = [], []
    last = graph.n_layers - 1
    for _ in range(graph.n_edges + 1):
        src_out = res[list(graph.out_edges[graph.source])]
        if src_out.size == 0 or src_out.max() <= tol:
            break
        v, path = graph.source, []
        while graph.layer_of[v] != last:
            outs = graph.out_edges[v]
            best = max(outs, key=lambda e: (res[e], -e)) if outs else None
            if best is None or res[best] <= tol:
                break
            path.append(best)
            v = int(graph.heads[best])
        if graph.layer_of[v] != last:
            break  # numerical residue ran into a dead end
        amount = min(res[e] for e in path)
        res[path] -= amount
        paths.append(tuple(path))
        weights.append(amount)
    merged = {}
    for p, w in zip(paths, weights):
        merged[p] = merged.get(p, 0.0) + w
    total = sum(merged.values())
    return MixedStrategy(list(merged), [w / total for w in merged.values()])


def q_matrix(game: GameInstance) -> np.ndarray:
    Q = np.zeros((game.defender.n_edges, game.attacker.n_edges))
    for (d, a), v in game.Q.items():
        Q[d, a] = v
    return Q


def bilinear_value(game: GameInstance, f_d: np.ndarray, f_a: np.ndarray) -> float:
    """sum over edge pairs of Q(e_d, e_a) f_d(e_d) f_a(e_a)."""
    return float(sum(v * f_d[d] * f_a[a] for (d, a), v in game.Q.items()))


def attacker_edge_weights(game: GameInstance, f_d: np.ndarray) -> np.ndarray:
    w = np.zeros(game.attacker.n_edges)
    for (d, a), v in game.Q.items():
        w[a] += v * f_d[d]
    return w


def defender_edge_weights(game: GameInstance, f_a: np.ndarray) -> np.ndarray:
    w = np.zeros(game.defender.n_edges)
    for (d, a), v in game.Q.items():
        w[d] += v * f_a[a]
    return w


def best_response_values(game: GameInstance, f_d, f_a):
    """(defender best pure value vs f_a, attacker best pure value vs f_d) under LIN."""
    att_val, att_path = longest_path(game.attacker, attacker_edge_weights(game, f_d), maximize=True)
    def_val, def_path = longest_path(game.defender, defender_edge_weights(game, f_a), maximize=False)
    return def_val, att_val, def_path, att_path


def solve_linear_ne(game: GameInstance):
    """Nash equilibrium in flows for a LIN game.

    Solves  min g(source)  over defender flows f_d and attacker vertex values g
    subject to  g(tail) - g(head) >= sum_d Q(d, e) f_d(d)  for every attacker
    edge e, with g fixed to 0 on attacker terminals.  The attacker flow is the
    dual of the edge constraints.  Returns (f_d, f_a, value).
    """
    if game.mode != LIN:
        raise ModeMismatch("solve_linear_ne requires a LIN game")
    g_d, g_a = game.defender, game.attacker
    n_fd = g_d.n_edges
    last = g_a.n_layers - 1
    g_vars = [v for v in range(g_a.n_vertices) if g_a.layer_of[v] != last]
    g_index = {v: n_fd + k for k, v in enumerate(g_vars)}
    n = n_fd + len(g_vars)

    rows, rel, rhs = [], [], []
    row = np.zeros(n)
    row[list(g_d.out_edges[g_d.source])] = 1.0
    rows.append(row)
    rel.append(EQ)
    rhs.append(1.0)
    for v in range(1, g_d.n_vertices):
        if g_d.layer_of[v] == g_d.n_layers - 1:
            continue
        if not g_d.in_edges[v] and not g_d.out_edges[v]:
            continue
        row = np.zeros(n)
        row[list(g_d.in_edges[v])] = 1.0
        row[list(g_d.out_edges[v])] -= 1.0
        rows.append(row)
        rel.append(EQ)
        rhs.append(0.0)
    n_flow_rows = len(rows)
    Qm = q_matrix(game)
    for e in range(g_a.n_edges):
        t, h = g_a.edges[e]
        row = np.zeros(n)
        row[g_index[t]] += 1.0
        if h in g_index:
            row[g_index[h]] -= 1.0
        row[:n_fd] -= Qm[:, e]
        rows.append(row)
        rel.append(GE)
        rhs.append(0.0)
    c = np.zeros(n)
    c[g_index[g_a.source]] = 1.0
    lo = np.concatenate([np.zeros(n_fd), np.full(len(g_vars), -np.inf)])
    sol = solve_lp(LpProblem(c, np.array(rows), rel, rhs, lo=lo, sense="min"))
    if not sol.optimal:
        raise NumericalFailure(f"flow LP returned {sol.status}")
    f_d = np.clip(sol.x[:n_fd], 0.0, None)
    f_a = np.clip(sol.duals[n_flow_rows:], 0.0, None)
    return f_d, f_a, float(sol.objective)
