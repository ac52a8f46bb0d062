"""Instance builders.

Physical graphs are unrolled over a horizon T into (T+1)-layer games: layer 0
is a super-source whose out-edges pick a start vertex, layers 1..T hold one
copy of every physical vertex (plus wait-counter copies for anti-terrorism
and exit sinks for logistical interdiction).  Unreachable copies are kept.

Randomness always comes from ``numpy.random.Generator(PCG64(seed))``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyFormula, EmptyStartSet, InvalidGraph, NoExit, SetupTooLong
from .game import (BIN, EDGE_EQUALITY, EXPLICIT, LIN, SHARED_HEAD_VERTEX, GameInstance,
                   InterdictionRelation, MixedStrategy)
from .graph import LayeredGraph, forward_counts

PE, AT, LI = "PE", "AT", "LI"


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


# -- hexagon example ---------------------------------------------------------------------

def example1(mode: str = BIN) -> GameInstance:
    """The 5-layer hexagon game: defender paths U, D; attacker paths UU, UD, DU, DD.

    Edge equality interdiction, all targets worth 1, Q = -R in LIN mode.
    """
    labels = ["s", "A", "B", "C", "D", "E", "F", "G", "H", "I", "t"]
    idx = {name: k for k, name in enumerate(labels)}
    sizes = [1, 3, 3, 3, 1]

    def graph(pairs):
        return LayeredGraph(sizes, [(idx[a], idx[b]) for a, b in pairs], labels=labels)

    g_d = graph([("s", "A"), ("s", "C"), ("A", "D"), ("C", "F"), ("D", "G"), ("F", "I"), ("G", "t"), ("I", "t")])
    g_a = graph([("s", "A"), ("s", "C"), ("A", "E"), ("C", "E"), ("E", "G"), ("E", "I"), ("G", "t"), ("I", "t")])
    return GameInstance(g_d, g_a, targets={idx["t"]: 1.0}, interdiction=EDGE_EQUALITY, mode=mode,
                        name=f"example1-{mode.lower()}")


# -- physical graphs ---------------------------------------------------------------------

@dataclass
class PhysicalGraph:
    """Locations shared by both players, with per-player move sets.

    Vertices are indexed 0..n-1; ``edges_d``/``edges_a`` hold index pairs and
    are read as undirected unless ``directed`` is set.  A pair (v, v) is a
    physical self-loop (a stay action for that player only).
    """

    labels: list
    edges_d: list
    edges_a: list
    starts_d: list
    starts_a: list
    xy: list | None = None
    exits: list = field(default_factory=list)
    values: dict | None = None
    directed: bool = False

    def __post_init__(self):
        n = len(self.labels)
        for name in ("edges_d", "edges_a"):
            for u, v in getattr(self, name):
                if not (0 <= u < n and 0 <= v < n):
                    raise InvalidGraph(f"{name} entry ({u}, {v}) is out of range")
        if not self.starts_d:
            raise EmptyStartSet("defender start set is empty")
        if not self.starts_a:
            raise EmptyStartSet("attacker start set is empty")
        if any(not 0 <= v < n for v in list(self.starts_d) + list(self.starts_a) + list(self.exits)):
            raise InvalidGraph("start or exit vertex out of range")

    @property
    def n(self):
        return len(self.labels)

    def successors(self, player: str, allow_waiting: bool) -> list[list[int]]:
        edges = self.edges_d if player == "d" else self.edges_a
        succ = [set() for _ in range(self.n)]
        for u, v in edges:
            succ[u].add(v)
            if not self.directed:
                succ[v].add(u)
        if allow_waiting:
            for v in range(self.n):
                succ[v].add(v)
        return [sorted(s) for s in succ]

    def value(self, v: int) -> float:
        if self.values is None:
            return 1.0
        return float(self.values.get(v, 0.0))

    def to_dict(self) -> dict:
        verts = []
        for k, lab in enumerate(self.labels):
            item = {"id": k, "label": lab}
            if self.xy is not None:
                item["xy"] = list(self.xy[k])
            verts.append(item)
        d = {"vertices": verts, "edges_d": [list(e) for e in self.edges_d],
             "edges_a": [list(e) for e in self.edges_a],
             "starts_d": list(self.starts_d), "starts_a": list(self.starts_a),
             "directed": self.directed}
        if self.exits:
            d["exits"] = list(self.exits)
        if self.values is not None:
            d["values"] = {str(k): v for k, v in self.values.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PhysicalGraph":
        ids = [v["id"] for v in d["vertices"]]
        pos = {str(i): k for k, i in enumerate(ids)}

        def ix(i):
            return pos[str(i)]

        xy = None
        if all("xy" in v for v in d["vertices"]):
            xy = [tuple(v["xy"]) for v in d["vertices"]]
        values = None
        if "values" in d:
            values = {ix(k): float(v) for k, v in d["values"].items()}
        return cls(labels=[str(v.get("label", v["id"])) for v in d["vertices"]],
                   edges_d=[(ix(u), ix(v)) for u, v in d["edges_d"]],
                   edges_a=[(ix(u), ix(v)) for u, v in d["edges_a"]],
                   starts_d=[ix(v) for v in d["starts_d"]], starts_a=[ix(v) for v in d["starts_a"]],
                   xy=xy, exits=[ix(v) for v in d.get("exits", [])], values=values,
                   directed=bool(d.get("directed", False)))

    @classmethod
    def load(cls, path) -> "PhysicalGraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def grid_world(S: int, q_drop_d: float = 0.0, q_drop_a: float = 0.0, seed=0,
               starts_d: Sequence[int] | None = None, starts_a: Sequence[int] | None = None) -> PhysicalGraph:
    """S x S 4-connected lattice; each edge is dropped independently per player.

    Vertex (x, y), 1-based with (1, 1) bottom-left, has index (x-1)*S + (y-1)
    and label ``f"{x}{y}"``.  Defaults: defender starts at (1, 1), attacker at
    the opposite corner (S, S).
    """
    if S < 2:
        raise ValueError("grid side must be >= 2")
    if not (0 <= q_drop_d <= 1 and 0 <= q_drop_a <= 1):
        raise ValueError("drop probabilities must lie in [0, 1]")
    rng = rng_from(seed)
    sep = "" if S < 10 else ","
    labels, xy = [], []
    for x in range(1, S + 1):
        for y in range(1, S + 1):
            labels.append(f"{x}{sep}{y}")
            xy.append((float(x), float(y)))

    def ix(x, y):
        return (x - 1) * S + (y - 1)

    lattice = []
    for x in range(1, S + 1):
        for y in range(1, S + 1):
            if x < S:
                lattice.append((ix(x, y), ix(x + 1, y)))
            if y < S:
                lattice.append((ix(x, y), ix(x, y + 1)))
    draws_d = rng.random(len(lattice))
    draws_a = rng.random(len(lattice))
    edges_d = [e for e, r in zip(lattice, draws_d) if not r < q_drop_d]
    edges_a = [e for e, r in zip(lattice, draws_a) if not r < q_drop_a]
    return PhysicalGraph(labels=labels, edges_d=edges_d, edges_a=edges_a,
                         starts_d=list(starts_d) if starts_d is not None else [ix(1, 1)],
                         starts_a=list(starts_a) if starts_a is not None else [ix(S, S)], xy=xy)


def grid_index(S: int, x: int, y: int) -> int:
    return (x - 1) * S + (y - 1)


def random_values(phys: PhysicalGraph, seed, low: int = 1, high: int = 10) -> dict:
    """Integer node values uniform on [low, high]."""
    rng = rng_from(seed)
    return {v: float(r) for v, r in enumerate(rng.integers(low, high + 1, size=phys.n))}


def habitat_values(phys: PhysicalGraph, habitats, kind: str = "LIN") -> dict:
    """Node value = sum over habitats of score * g(distance), g = 1/z (LIN) or exp(-z) (EXP).

    For LIN a vertex sitting on a habitat (z < 1e-9) takes the raw score.
    """
    if phys.xy is None:
        raise InvalidGraph("habitat attenuation needs vertex coordinates")
    values = {}
    for v, p in enumerate(phys.xy):
        total = 0.0
        for hxy, score in habitats:
            z = math.dist(p, hxy)
            if kind == "LIN":
                total += score if z < 1e-9 else score / z
            elif kind == "EXP":
                total += score * math.exp(-z)
            else:
                raise ValueError(f"unknown attenuation {kind!r}")
        values[v] = total
    return values


@dataclass
class UnrollSpec:
    horizon: int
    domain: str = PE
    t_setup: int = 0
    gamma: float = 1.0
    allow_waiting: bool = True
    interdiction: str = SHARED_HEAD_VERTEX
    attenuation: str | None = None   # None, "LIN" or "EXP"
    habitats: list = field(default_factory=list)

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.domain not in (PE, AT, LI):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.domain == LI and not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if self.t_setup < 0:
            raise ValueError("t_setup must be >= 0")
        if self.interdiction not in (SHARED_HEAD_VERTEX, EDGE_EQUALITY):
            raise ValueError("unrolled games use SHARED_HEAD_VERTEX or EDGE_EQUALITY interdiction")


def _node_values(phys: PhysicalGraph, spec: UnrollSpec) -> list[float]:
    if spec.attenuation:
        vals = habitat_values(phys, spec.habitats, spec.attenuation)
        return [vals[v] for v in range(phys.n)]
    return [phys.value(v) for v in range(phys.n)]


def _unrolled_pe_graph(phys: PhysicalGraph, player: str, spec: UnrollSpec) -> LayeredGraph:
    """Source plus T layers of physical copies; copy (k, v) has id 1 + (k-1)*n + v."""
    n, T = phys.n, spec.horizon
    succ = phys.successors(player, spec.allow_waiting)
    starts = sorted(set(phys.starts_d if player == "d" else phys.starts_a))
    edges = [(0, 1 + v) for v in starts]
    for k in range(1, T):
        base, nxt = 1 + (k - 1) * n, 1 + k * n
        edges += [(base + v, nxt + w) for v in range(n) for w in succ[v]]
    labels = ["source"] + list(phys.labels) * T
    return LayeredGraph([1] + [n] * T, edges, labels=labels)


def _pe_targets(g: LayeredGraph, values: list[float]) -> dict:
    n = len(values)
    return {v: values[(v - 1) % n] for v in g.terminals}


def unroll_pe(phys: PhysicalGraph, spec: UnrollSpec, mode: str = BIN) -> GameInstance:
    g_d = _unrolled_pe_graph(phys, "d", spec)
    g_a = _unrolled_pe_graph(phys, "a", spec)
    return GameInstance(g_d, g_a, targets=_pe_targets(g_a, _node_values(phys, spec)),
                        interdiction=spec.interdiction, mode=mode, name=f"pe-T{spec.horizon}")


def unroll_at(phys: PhysicalGraph, spec: UnrollSpec) -> GameInstance:
    """Anti-terrorism: attacker copies carry a wait counter w in 0..t_setup.

    Layer-k attacker vertex (v, w) has id 1 + (k-1)*n*(t_setup+1) + w*n + v.
    Plant edges take w 0 -> 1, waiting edges w -> w+1, and once w = t_setup
    the attacker holds in place.  A defender copy interdicts any attacker
    edge entering the same location in the same layer, except hold edges
    after detonation.
    """
    n, T, ts = phys.n, spec.horizon, spec.t_setup
    if ts > T - 1:
        raise SetupTooLong(f"t_setup={ts} needs a horizon of at least {ts + 1}, got {T}")
    g_d = _unrolled_pe_graph(phys, "d", spec)
    succ = phys.successors("a", spec.allow_waiting)
    W = ts + 1
    per = n * W

    def vid(k, v, w):
        return 1 + (k - 1) * per + w * n + v

    edges, meta = [], []   # meta: (tail w, head physical vertex, head w, tail physical or None)
    for v in sorted(set(phys.starts_a)):
        edges.append((0, vid(1, v, 0)))
        meta.append((0, v, 0, None))
    for k in range(1, T):
        for w in range(W):
            for v in range(n):
                if w == 0:
                    outs = [(u, 0) for u in succ[v]]
                    if ts >= 1:
                        outs.append((v, 1))
                elif w < ts:
                    outs = [(v, w + 1)]
                else:
                    outs = [(v, ts)]
                for u, w2 in outs:
                    edges.append((vid(k, v, w), vid(k + 1, u, w2)))
                    meta.append((w, u, w2, v))
    labels = ["source"] + [phys.labels[v] if w == 0 else f"{phys.labels[v]}~w{w}"
                           for _ in range(T) for w in range(W) for v in range(n)]
    g_a = LayeredGraph([1] + [per] * T, edges, labels=labels)

    by_head, by_edge = {}, {}
    for e, (t, h) in enumerate(g_d.edges):
        k = int(g_d.layer_of[h])
        hv = (h - 1) % n
        tv = None if t == 0 else (t - 1) % n
        by_head.setdefault((k, hv), []).append(e)
        by_edge.setdefault((k, tv, hv), []).append(e)
    pairs = []
    for e, ((t, h), (w, hv, w2, tv)) in enumerate(zip(edges, meta)):
        if not (w == 0 or w != w2):
            continue
        k = int(g_a.layer_of[h])
        if spec.interdiction == SHARED_HEAD_VERTEX:
            pairs += [(d, e) for d in by_head.get((k, hv), ())]
        else:
            pairs += [(d, e) for d in by_edge.get((k, tv, hv), ())]
    values = _node_values(phys, spec)
    targets = {}
    for v in range(n):
        targets[vid(T, v, ts)] = values[v]
    rel = InterdictionRelation.explicit(pairs, g_d, g_a)
    return GameInstance(g_d, g_a, targets=targets, interdiction=rel, mode=BIN,
                        name=f"at-T{T}-setup{ts}")


def unroll_li(phys: PhysicalGraph, spec: UnrollSpec) -> GameInstance:
    """Logistical interdiction: attacker may leave through exits into timed sinks.

    An exit copy at layer k >= 1 has an extra edge into the sink for exit
    time t = k - 1 in layer k + 1; sinks chain forward to the last layer.
    Terminal values are c * gamma**t for sinks and c * gamma**(T-1) for exit
    copies in the last layer, with c scaling the best reachable payoff to 10.
    """
    n, T, gamma = phys.n, spec.horizon, spec.gamma
    if not phys.exits:
        raise NoExit("logistical interdiction needs at least one exit vertex")
    exits = sorted(set(phys.exits))
    g_d = _unrolled_pe_graph(phys, "d", spec)
    succ = phys.successors("a", spec.allow_waiting)
    # layer k (1..T) holds n physical copies followed by sinks t = 0..k-2
    sizes = [1] + [n + max(k - 1, 0) for k in range(1, T + 1)]
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    def phys_id(k, v):
        return int(offsets[k]) + v

    def sink_id(k, t):
        return int(offsets[k]) + n + t

    edges = [(0, phys_id(1, v)) for v in sorted(set(phys.starts_a))]
    for k in range(1, T):
        for v in range(n):
            edges += [(phys_id(k, v), phys_id(k + 1, w)) for w in succ[v]]
            if v in exits:
                edges.append((phys_id(k, v), sink_id(k + 1, k - 1)))
        for t in range(k - 1):
            edges.append((sink_id(k, t), sink_id(k + 1, t)))
    labels = ["source"]
    for k in range(1, T + 1):
        labels += list(phys.labels) + [f"sink:t{t}" for t in range(k - 1)]
    g_a = LayeredGraph(sizes, edges, labels=labels)

    reach = forward_counts(g_a)
    feasible = [k - 1 for k in range(1, T + 1) for v in exits if reach[phys_id(k, v)] > 0]
    best = max((gamma ** t for t in feasible), default=1.0)
    c = 10.0 / best
    targets = {sink_id(T, t): c * gamma ** t for t in range(T - 1)}
    for v in exits:
        targets[phys_id(T, v)] = c * gamma ** (T - 1)
    return GameInstance(g_d, g_a, targets=targets, interdiction=spec.interdiction, mode=BIN,
                        name=f"li-T{T}-gamma{gamma:g}")


def unroll(phys: PhysicalGraph, spec: UnrollSpec) -> GameInstance:
    if spec.domain == PE:
        return unroll_pe(phys, spec)
    if spec.domain == AT:
        return unroll_at(phys, spec)
    return unroll_li(phys, spec)


# -- hardness fixtures -------------------------------------------------------------

@dataclass(frozen=True)
class CNF:
    """Formula over variables 1..n_vars; literals are signed ints (DIMACS style)."""

    n_vars: int
    clauses: tuple

    def __init__(self, n_vars: int, clauses):
        object.__setattr__(self, "n_vars", int(n_vars))
        object.__setattr__(self, "clauses", tuple(tuple(int(l) for l in c) for c in clauses))
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.n_vars}")

    def check_nonempty(self):
        if self.n_vars < 1 or not self.clauses:
            raise EmptyFormula("formula needs at least one variable and one clause")
        if any(len(c) == 0 for c in self.clauses):
            raise EmptyFormula("formula contains an empty clause")

    def satisfied_count(self, assignment: Sequence[bool]) -> int:
        return sum(any((lit > 0) == assignment[abs(lit) - 1] for lit in c) for c in self.clauses)

    @classmethod
    def parse_dimacs(cls, text: str) -> "CNF":
        n, clauses, cur = 0, [], []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("c") or line.startswith("%"):
                continue
            if line.startswith("p"):
                n = int(line.split()[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(cur)
                    cur = []
                else:
                    cur.append(lit)
        if cur:
            clauses.append(cur)
        if n == 0:
            n = max((abs(l) for c in clauses for l in c), default=0)
        return cls(n, clauses)


def random_cnf(n_vars: int, n_clauses: int, seed, k: int = 3) -> CNF:
    """Random clauses of up to k distinct variables with random signs."""
    rng = rng_from(seed)
    clauses = []
    for _ in range(n_clauses):
        size = int(rng.integers(1, min(k, n_vars) + 1))
        vars_ = rng.choice(np.arange(1, n_vars + 1), size=size, replace=False)
        clauses.append([int(v) if rng.random() < 0.5 else -int(v) for v in sorted(vars_)])
    return CNF(n_vars, clauses)


def build_3sat_game(cnf: CNF) -> GameInstance:
    """Game whose value is 0 iff the formula is satisfiable.

    Defender: source -> chain of n+1 vertices with parallel y_i / ~y_i edges.
    Attacker: source -> hub -> one branch per clause; edge c_{j,i} of branch j
    runs alongside the defender's variable-i edges and is interdicted by y_i
    (resp. ~y_i) iff literal Y_i (resp. ~Y_i) occurs in clause j.
    """
    cnf.check_nonempty()
    n, m = cnf.n_vars, len(cnf.clauses)
    L = n + 2
    d_edges, d_lab = [(0, 1)], ["start"]
    for i in range(1, n + 1):
        d_edges += [(i, i + 1), (i, i + 1)]
        d_lab += [f"y{i}", f"~y{i}"]
    g_d = LayeredGraph([1] * L, d_edges, labels=["s"] + [f"x{i}" for i in range(1, n + 2)], edge_labels=d_lab)

    sizes = [1, 1] + [m] * n
    a_edges, a_lab = [(0, 1)], ["start"]
    a_edges += [(1, 2 + j) for j in range(m)]
    a_lab += [f"c{j + 1},1" for j in range(m)]
    for i in range(2, n + 1):
        base_t, base_h = 2 + (i - 2) * m, 2 + (i - 1) * m
        a_edges += [(base_t + j, base_h + j) for j in range(m)]
        a_lab += [f"c{j + 1},{i}" for j in range(m)]
    a_labels = ["s", "hub"] + [f"clause{j + 1}@{i}" for i in range(1, n + 1) for j in range(m)]
    g_a = LayeredGraph(sizes, a_edges, labels=a_labels, edge_labels=a_lab)

    def var_edge(i, positive):
        return 1 + 2 * (i - 1) + (0 if positive else 1)

    def clause_edge(j, i):
        return 1 + (i - 1) * m + j

    pairs = set()
    for j, clause in enumerate(cnf.clauses):
        for lit in clause:
            pairs.add((var_edge(abs(lit), lit > 0), clause_edge(j, abs(lit))))
    rel = InterdictionRelation.explicit(pairs, g_d, g_a)
    return GameInstance(g_d, g_a, targets={v: 1.0 for v in g_a.terminals}, interdiction=rel, mode=BIN,
                        name=f"3sat-n{n}-m{m}")


def build_maxsat_br_fixture(cnf: CNF):
    """Chain game plus a uniform attacker mixture whose defender best response solves MAX-SAT.

    Both players walk a chain of n+1 vertices; per variable the defender picks
    a true or false edge, the attacker additionally has a skip edge.  Clause j
    maps to the attacker path taking true/false/skip per variable.  With
    r = m and weight 1/m per clause, the attacker's payoff against a defender
    path equals the number of clauses that assignment leaves unsatisfied.
    """
    cnf.check_nonempty()
    n, m = cnf.n_vars, len(cnf.clauses)
    labels = [f"v{i}" for i in range(1, n + 1)] + ["t"]
    d_edges, d_lab, a_edges, a_lab = [], [], [], []
    for i in range(n):
        d_edges += [(i, i + 1), (i, i + 1)]
        d_lab += [f"T{i + 1}", f"F{i + 1}"]
        a_edges += [(i, i + 1), (i, i + 1), (i, i + 1)]
        a_lab += [f"T{i + 1}", f"F{i + 1}", f"S{i + 1}"]
    g_d = LayeredGraph([1] * (n + 1), d_edges, labels=labels, edge_labels=d_lab)
    g_a = LayeredGraph([1] * (n + 1), a_edges, labels=labels, edge_labels=a_lab)
    game = GameInstance(g_d, g_a, targets={n: float(m)}, interdiction=EDGE_EQUALITY, mode=BIN,
                        name=f"maxsat-n{n}-m{m}")
    weights = {}
    for clause in cnf.clauses:
        lits = set(clause)
        if any(-l in lits for l in lits):
            raise ValueError("tautological clause cannot be encoded as a single attacker path")
        path = []
        for i in range(1, n + 1):
            k = 0 if i in lits else 1 if -i in lits else 2
            path.append(3 * (i - 1) + k)
        weights[tuple(path)] = weights.get(tuple(path), 0.0) + 1.0 / m
    paths = sorted(weights)
    return game, MixedStrategy(paths, [weights[p] for p in paths])


# -- random instances for property checks ---------------------------------------------

def random_layered_graph(rng, n_layers: int, max_width: int, density: float = 0.5,
                         sizes: Sequence[int] | None = None) -> LayeredGraph:
    """Random layered graph in which every vertex lies on some source-terminal path."""
    rng = rng_from(rng)
    if sizes is None:
        sizes = [1] + [int(rng.integers(1, max_width + 1)) for _ in range(n_layers - 1)]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    edges = set()
    for k in range(len(sizes) - 1):
        tails = range(int(offsets[k]), int(offsets[k + 1]))
        heads = range(int(offsets[k + 1]), int(offsets[k + 2]))
        for t in tails:
            for h in heads:
                if rng.random() < density:
                    edges.add((t, h))
        for h in heads:
            if not any((t, h) in edges for t in tails):
                edges.add((int(rng.choice(list(tails))), h))
        for t in tails:
            if not any((t, h) in edges for h in heads):
                edges.add((t, int(rng.choice(list(heads)))))
    labels = [f"{k}:{v - int(offsets[k])}" for k in range(len(sizes)) for v in range(int(offsets[k]), int(offsets[k + 1]))]
    return LayeredGraph(sizes, sorted(edges), labels=labels)


def random_game(seed, mode: str = BIN, n_layers: int | None = None, max_width: int = 4,
                interdiction: str | None = None, max_layers: int = 6) -> GameInstance:
    """Random pair of layered graphs over common labelled layers."""
    rng = rng_from(seed)
    L = n_layers if n_layers is not None else int(rng.integers(3, max_layers + 1))
    sizes = [1] + [int(rng.integers(1, max_width + 1)) for _ in range(L - 1)]
    g_d = random_layered_graph(rng, L, max_width, density=float(rng.uniform(0.3, 0.8)), sizes=sizes)
    g_a = random_layered_graph(rng, L, max_width, density=float(rng.uniform(0.3, 0.8)), sizes=sizes)
    if interdiction is None:
        interdiction = [SHARED_HEAD_VERTEX, EDGE_EQUALITY, EXPLICIT][int(rng.integers(3))]
    if interdiction == EXPLICIT:
        pairs = [(d, a) for d in range(g_d.n_edges) for a in range(g_a.n_edges)
                 if g_d.edge_layer(d) == g_a.edge_layer(a) and rng.random() < 0.15]
        rel = InterdictionRelation.explicit(pairs, g_d, g_a)
    else:
        rel = InterdictionRelation.from_mode(interdiction, g_d, g_a)
    targets = {v: float(rng.integers(0, 11)) for v in g_a.terminals}
    Q = None
    if mode == LIN:
        Q = {}
        for d in range(g_d.n_edges):
            for a in range(g_a.n_edges):
                if (d, a) in rel.pair_set:
                    Q[(d, a)] = -1.0
                elif rng.random() < 0.1:
                    Q[(d, a)] = float(rng.normal())
    return GameInstance(g_d, g_a, targets=targets, interdiction=rel, mode=mode, Q=Q,
                        name=f"random-{mode.lower()}")
