"""Game instances, interdiction relations, strategies and utility evaluation.

Only the attacker utility ``u = u_a`` is ever stored; the defender's payoff is
its negation.  The defender is therefore the minimizing (row) player.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (CapExceeded, InvalidGraph, InvalidStrategy, ModeMismatch,
                     UnknownEdge)
from .graph import LayeredGraph, Path, count_paths, enumerate_paths, validate

PROB_TOL = 1e-9

EDGE_EQUALITY = "EDGE_EQUALITY"
SHARED_HEAD_VERTEX = "SHARED_HEAD_VERTEX"
EXPLICIT = "EXPLICIT"
LIN = "LIN"
BIN = "BIN"


class InterdictionRelation:
    """Sparse relation between defender and attacker edges.

    Whatever mode it is declared with, the relation is stored as explicit
    pairs with a forward index (defender edge -> attacker edges) and a
    reverse index (attacker edge -> defender edges), both sorted.
    """

    def __init__(self, mode: str, pairs, n_def_edges: int, n_att_edges: int):
        self.mode = mode
        pairs = sorted({(int(d), int(a)) for d, a in pairs})
        for d, a in pairs:
            if not (0 <= d < n_def_edges and 0 <= a < n_att_edges):
                raise UnknownEdge(f"interdiction pair ({d}, {a}) references an unknown edge")
        self.pairs = tuple(pairs)
        self.pair_set = frozenset(pairs)
        fwd = [[] for _ in range(n_def_edges)]
        rev = [[] for _ in range(n_att_edges)]
        for d, a in pairs:
            fwd[d].append(a)
            rev[a].append(d)
        self.forward = tuple(tuple(x) for x in fwd)
        self.reverse = tuple(tuple(x) for x in rev)
        self.n_def_edges = n_def_edges
        self.n_att_edges = n_att_edges

    @classmethod
    def edge_equality(cls, g_d: LayeredGraph, g_a: LayeredGraph):
        """Edges interdict iff they join the same labels in the same layer."""
        def key(g, e):
            t, h = g.edges[e]
            return (int(g.layer_of[t]), g.labels[t], g.labels[h], g.edge_labels[e])
        by_key = {}
        for e in range(g_d.n_edges):
            by_key.setdefault(key(g_d, e), []).append(e)
        pairs = [(d, a) for a in range(g_a.n_edges) for d in by_key.get(key(g_a, a), ())]
        return cls(EDGE_EQUALITY, pairs, g_d.n_edges, g_a.n_edges)

    @classmethod
    def shared_head(cls, g_d: LayeredGraph, g_a: LayeredGraph):
        """Edges interdict iff their heads carry the same label in the same layer."""
        by_head = {}
        for e in range(g_d.n_edges):
            h = g_d.heads[e]
            by_head.setdefault((int(g_d.layer_of[h]), g_d.labels[h]), []).append(e)
        pairs = []
        for a in range(g_a.n_edges):
            h = g_a.heads[a]
            pairs += [(d, a) for d in by_head.get((int(g_a.layer_of[h]), g_a.labels[h]), ())]
        return cls(SHARED_HEAD_VERTEX, pairs, g_d.n_edges, g_a.n_edges)

    @classmethod
    def explicit(cls, pairs, g_d: LayeredGraph, g_a: LayeredGraph):
        return cls(EXPLICIT, pairs, g_d.n_edges, g_a.n_edges)

    @classmethod
    def from_mode(cls, mode: str, g_d, g_a, pairs=()):
        if mode == EDGE_EQUALITY:
            return cls.edge_equality(g_d, g_a)
        if mode == SHARED_HEAD_VERTEX:
            return cls.shared_head(g_d, g_a)
        if mode == EXPLICIT:
            return cls.explicit(pairs, g_d, g_a)
        raise ValueError(f"unknown interdiction mode {mode!r}")

    def csr(self):
        indptr = np.zeros(self.n_def_edges + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(x) for x in self.forward])
        indices = np.array([a for x in self.forward for a in x], dtype=np.int64)
        return indptr, indices

    def covered_by(self, def_path: Path) -> set[int]:
        """Attacker edges interdictable by some edge of the defender path."""
        out = set()
        for d in def_path:
            out.update(self.forward[d])
        return out

    def covering(self, att_path: Path) -> set[int]:
        """Defender edges able to interdict some edge of the attacker path."""
        out = set()
        for a in att_path:
            out.update(self.reverse[a])
        return out


@dataclass(frozen=True)
class MixedStrategy:
    """Finitely supported distribution over paths."""

    support: tuple
    probs: tuple

    def __init__(self, support: Sequence[Path], probs: Sequence[float]):
        object.__setattr__(self, "support", tuple(tuple(int(e) for e in p) for p in support))
        object.__setattr__(self, "probs", tuple(float(q) for q in probs))

    @classmethod
    def pure(cls, path: Path) -> "MixedStrategy":
        return cls([path], [1.0])

    @classmethod
    def uniform(cls, paths: Sequence[Path]) -> "MixedStrategy":
        return cls(paths, [1.0 / len(paths)] * len(paths))

    def __len__(self):
        return len(self.support)

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.probs))

    def prob(self, path: Path) -> float:
        return self.as_dict().get(tuple(path), 0.0)

    def problems(self, graph: LayeredGraph | None = None) -> list[str]:
        out = []
        if len(self.support) != len(self.probs):
            out.append("support and probs differ in length")
        if len(set(self.support)) != len(self.support):
            out.append("support paths are not distinct")
        if any(q < 0 or not np.isfinite(q) for q in self.probs):
            out.append("negative or non-finite probability")
        total = float(sum(self.probs))
        if abs(total - 1.0) > PROB_TOL:
            out.append(f"probabilities sum to {total!r}, not 1")
        if graph is not None:
            bad = [p for p in self.support if not graph.is_path(p)]
            if bad:
                out.append(f"{len(bad)} support entries are not source-to-terminal paths")
        return out

    def validate(self, graph: LayeredGraph | None = None) -> "MixedStrategy":
        problems = self.problems(graph)
        if problems:
            raise InvalidStrategy("; ".join(problems))
        return self

    def trimmed(self, tol: float = PROB_TOL) -> "MixedStrategy":
        """Drop entries with probability <= tol and renormalize."""
        keep = [(p, q) for p, q in zip(self.support, self.probs) if q > tol]
        total = sum(q for _, q in keep)
        return MixedStrategy([p for p, _ in keep], [q / total for _, q in keep])

    def to_dict(self) -> dict:
        return {"paths": [list(p) for p in self.support], "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "MixedStrategy":
        return cls([tuple(p) for p in d["paths"]], d["probs"])


class GameInstance:
    """Two layered graphs, target values, interdiction relation and utility mode.

    ``targets`` maps attacker terminal vertex ids to r(v) (absent means 0).
    ``Q`` maps (defender edge, attacker edge) to a real and is only used in
    LIN mode; when omitted in LIN mode it defaults to ``-R``.
    """

    def __init__(self, defender: LayeredGraph, attacker: LayeredGraph, targets=None,
                 interdiction: InterdictionRelation | str = SHARED_HEAD_VERTEX,
                 mode: str = BIN, Q: Mapping | None = None, name: str = ""):
        for who, g in (("defender", defender), ("attacker", attacker)):
            problems = validate(g)
            if problems:
                raise InvalidGraph(f"{who} graph: " + "; ".join(problems))
        if defender.n_layers != attacker.n_layers:
            raise InvalidGraph(f"layer counts differ: {defender.n_layers} vs {attacker.n_layers}")
        self.defender = defender
        self.attacker = attacker
        self.name = name
        if isinstance(interdiction, str):
            interdiction = InterdictionRelation.from_mode(interdiction, defender, attacker)
        if (interdiction.n_def_edges, interdiction.n_att_edges) != (defender.n_edges, attacker.n_edges):
            raise UnknownEdge("interdiction relation built for different graphs")
        self.interdiction = interdiction

        self.target_values = np.zeros(attacker.n_vertices)
        for v, r in (targets or {}).items():
            v = int(v)
            if not attacker.is_terminal(v):
                raise InvalidGraph(f"target {v} is not an attacker terminal")
            self.target_values[v] = float(r)
        if mode not in (LIN, BIN):
            raise ValueError(f"unknown utility mode {mode!r}")
        self.mode = mode
        if mode == BIN and (self.target_values < 0).any():
            raise InvalidGraph("binary-utility targets must be non-negative")
        if mode == LIN:
            if Q is None:
                Q = {pair: -1.0 for pair in interdiction.pairs}
            q = {}
            for (d, a), val in Q.items():
                d, a = int(d), int(a)
                if not (0 <= d < defender.n_edges and 0 <= a < attacker.n_edges):
                    raise UnknownEdge(f"Q entry ({d}, {a}) references an unknown edge")
                if val != 0:
                    q[(d, a)] = float(val)
            self.Q = q
        else:
            self.Q = {}

    @property
    def targets(self) -> dict:
        return {v: float(self.target_values[v]) for v in self.attacker.terminals if self.target_values[v] != 0}

    def target_of(self, att_path: Path) -> float:
        return float(self.target_values[self.attacker.terminal_of(att_path)])

    def _q_csr(self):
        """Q as CSR over defender edges (indptr, attacker edge indices, values)."""
        rows = [[] for _ in range(self.defender.n_edges)]
        for (d, a), val in sorted(self.Q.items()):
            rows[d].append((a, val))
        indptr = np.zeros(self.defender.n_edges + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in rows])
        indices = np.array([a for r in rows for a, _ in r], dtype=np.int64)
        data = np.array([v for r in rows for _, v in r], dtype=float)
        return indptr, indices, data

    def __repr__(self):
        return (f"GameInstance({self.name or 'unnamed'}, mode={self.mode}, L={self.defender.n_layers}, "
                f"|E_d|={self.defender.n_edges}, |E_a|={self.attacker.n_edges}, "
                f"|R|={len(self.interdiction.pairs)})")

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        d = {"defender": self.defender.to_dict(),
             "attacker": self.attacker.to_dict(),
             "targets": {str(v): r for v, r in self.targets.items()},
             "interdiction": {"mode": self.interdiction.mode,
                              "pairs": [list(p) for p in self.interdiction.pairs]}}
        if self.mode == LIN:
            d["utility"] = {"mode": LIN, "Q": [[a, b, v] for (a, b), v in sorted(self.Q.items())]}
        else:
            d["utility"] = {"mode": BIN}
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "GameInstance":
        g_d = LayeredGraph.from_dict(d["defender"])
        g_a = LayeredGraph.from_dict(d["attacker"])
        spec = d.get("interdiction", {"mode": SHARED_HEAD_VERTEX})
        mode = spec.get("mode", EXPLICIT)
        if "pairs" in spec and mode != EXPLICIT:
            # stored pairs are authoritative; keep the declared mode for reporting
            rel = InterdictionRelation(mode, spec["pairs"], g_d.n_edges, g_a.n_edges)
        else:
            rel = InterdictionRelation.from_mode(mode, g_d, g_a, spec.get("pairs", ()))
        util = d.get("utility", {"mode": BIN})
        Q = None
        if util["mode"] == LIN and "Q" in util:
            Q = {(int(a), int(b)): float(v) for a, b, v in util["Q"]}
        return cls(g_d, g_a, targets=d.get("targets"), interdiction=rel, mode=util["mode"],
                   Q=Q, name=d.get("name", ""))


# -- utilities ------------------------------------------------------------------

def interdicts(game: GameInstance, e_d: int, e_a: int) -> int:
    if not (0 <= e_d < game.defender.n_edges):
        raise UnknownEdge(f"defender edge {e_d}")
    if not (0 <= e_a < game.attacker.n_edges):
        raise UnknownEdge(f"attacker edge {e_a}")
    return int((e_d, e_a) in game.interdiction.pair_set)


def interdiction_count(game: GameInstance, p_d: Path, p_a: Path) -> int:
    on_path = set(p_d)
    return sum(1 for a in p_a for d in game.interdiction.reverse[a] if d in on_path)


def u_lin(game: GameInstance, p_d: Path, p_a: Path) -> float:
    if game.mode != LIN:
        raise ModeMismatch("u_lin requires a LIN game")
    Q = game.Q
    return float(sum(Q.get((d, a), 0.0) for d in p_d for a in p_a))


def u_bin(game: GameInstance, p_d: Path, p_a: Path) -> float:
    if game.mode != BIN:
        raise ModeMismatch("u_bin requires a BIN game")
    return 0.0 if interdiction_count(game, p_d, p_a) else game.target_of(p_a)


def utility(game: GameInstance, p_d: Path, p_a: Path) -> float:
    return u_lin(game, p_d, p_a) if game.mode == LIN else u_bin(game, p_d, p_a)


def _as_array(paths: Sequence[Path], width: int) -> np.ndarray:
    if not paths:
        return np.zeros((0, width), dtype=np.int64)
    return np.asarray(paths, dtype=np.int64).reshape(len(paths), width)


def payoff_block(game: GameInstance, def_paths: Sequence[Path], att_paths: Sequence[Path]) -> np.ndarray:
    """Matrix of attacker utilities for every (defender path, attacker path) pair."""
    width = game.defender.n_layers - 1
    D = _as_array(def_paths, width)
    A = _as_array(att_paths, width)
    if game.mode == LIN:
        indptr, indices, data = game._q_csr()
        return kernels.pair_sums(D, A, indptr, indices, data, game.attacker.n_edges)
    indptr, indices = game.interdiction.csr()
    counts = kernels.pair_sums(D, A, indptr, indices, np.ones(len(indices)), game.attacker.n_edges)
    r = np.array([game.target_of(p) for p in att_paths], dtype=float)
    return np.where(counts > 0.5, 0.0, r[None, :])


def payoff_matrix(game: GameInstance, cap: int = 10**6):
    """Full payoff matrix with rows/columns in enumerate_paths order.

    Returns (matrix, defender paths, attacker paths).
    """
    n_d, n_a = count_paths(game.defender), count_paths(game.attacker)
    if n_d * n_a > cap:
        raise CapExceeded(f"{n_d} x {n_a} = {n_d * n_a} path pairs exceed cap {cap}")
    P_d = enumerate_paths(game.defender, cap)
    P_a = enumerate_paths(game.attacker, cap)
    return payoff_block(game, P_d, P_a), P_d, P_a


def expected_utility(game: GameInstance, x_d: MixedStrategy, x_a: MixedStrategy) -> float:
    M = payoff_block(game, x_d.support, x_a.support)
    return float(np.asarray(x_d.probs) @ M @ np.asarray(x_a.probs))


def utility_vs_attacker_mix(game: GameInstance, def_paths: Sequence[Path], x_a: MixedStrategy) -> np.ndarray:
    """u(p_d, x_a) for each listed defender path."""
    return payoff_block(game, def_paths, x_a.support) @ np.asarray(x_a.probs)


def utility_vs_defender_mix(game: GameInstance, x_d: MixedStrategy, att_paths: Sequence[Path]) -> np.ndarray:
    """u(x_d, p_a) for each listed attacker path."""
    return np.asarray(x_d.probs) @ payoff_block(game, x_d.support, att_paths)


def strategy_problems(game: GameInstance, x: MixedStrategy, side: str) -> list[str]:
    g = game.defender if side == "defender" else game.attacker
    return x.problems(g)
