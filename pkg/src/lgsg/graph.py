"""Layered directed acyclic graphs: construction, validation, path counting.

Vertices and edges are dense integer ids.  Vertex ids are assigned layer by
layer, so layer ``k`` (0-based) holds ids ``offsets[k] .. offsets[k+1]-1``.
Layer 0 must be the singleton source; the last layer holds the terminals.
Layers are 0-based throughout the code base.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvalidGraph

Path = tuple  # tuple[int, ...] of edge ids, one per layer transition


class LayeredGraph:
    """Immutable layered DAG.

    Parameters
    ----------
    layer_sizes : sequence of int
        Number of vertices per layer.
    edges : sequence of (tail, head)
        Directed edges; the position in the list is the edge id.
    labels : mapping or sequence, optional
        Physical label per vertex id; defaults to ``str(id)``.
    edge_labels : sequence, optional
        Optional label per edge.  Parallel edges are allowed as long as their
        labels differ.

    The constructor only checks that ids are in range; structural
    invariants are reported by :func:`validate`.
    """

    def __init__(self, layer_sizes: Sequence[int], edges: Iterable, labels=None, edge_labels=None):
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        if any(s < 0 for s in self.layer_sizes):
            raise InvalidGraph("negative layer size")
        self.offsets = np.concatenate([[0], np.cumsum(self.layer_sizes)]).astype(np.int64)
        self.n_vertices = int(self.offsets[-1])
        self.layer_of = np.repeat(np.arange(len(self.layer_sizes)), self.layer_sizes).astype(np.int64)

        edges = [tuple(int(x) for x in e[:2]) for e in edges]
        for k, (t, h) in enumerate(edges):
            if not (0 <= t < self.n_vertices and 0 <= h < self.n_vertices):
                raise InvalidGraph(f"edge {k} ({t}->{h}) references an unknown vertex")
        self.edges = tuple(edges)
        self.n_edges = len(edges)
        self.tails = np.array([e[0] for e in edges], dtype=np.int64)
        self.heads = np.array([e[1] for e in edges], dtype=np.int64)

        if labels is None:
            self.labels = tuple(str(v) for v in range(self.n_vertices))
        elif isinstance(labels, dict):
            self.labels = tuple(str(labels.get(v, labels.get(str(v), v))) for v in range(self.n_vertices))
        else:
            if len(labels) != self.n_vertices:
                raise InvalidGraph("labels length does not match vertex count")
            self.labels = tuple(str(x) for x in labels)

        if edge_labels is None:
            self.edge_labels = (None,) * self.n_edges
        else:
            if len(edge_labels) != self.n_edges:
                raise InvalidGraph("edge_labels length does not match edge count")
            self.edge_labels = tuple(None if x is None else str(x) for x in edge_labels)

        out_edges = [[] for _ in range(self.n_vertices)]
        in_edges = [[] for _ in range(self.n_vertices)]
        for k, (t, h) in enumerate(edges):
            out_edges[t].append(k)
            in_edges[h].append(k)
        self.out_edges = tuple(tuple(x) for x in out_edges)
        self.in_edges = tuple(tuple(x) for x in in_edges)

    # -- basic accessors -------------------------------------------------
    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def source(self) -> int:
        return 0

    def layer(self, k: int) -> range:
        return range(int(self.offsets[k]), int(self.offsets[k + 1]))

    @property
    def terminals(self) -> range:
        return self.layer(self.n_layers - 1)

    def is_terminal(self, v: int) -> bool:
        return self.layer_of[v] == self.n_layers - 1

    def edge_layer(self, e: int) -> int:
        """Layer of the edge's tail."""
        return int(self.layer_of[self.tails[e]])

    def describe_edge(self, e: int) -> str:
        t, h = self.edges[e]
        s = f"{self.labels[t]}->{self.labels[h]}"
        if self.edge_labels[e] is not None:
            s += f"[{self.edge_labels[e]}]"
        return s

    def __repr__(self):
        return f"LayeredGraph(layers={list(self.layer_sizes)}, edges={self.n_edges})"

    def __eq__(self, other):
        if not isinstance(other, LayeredGraph):
            return NotImplemented
        return (self.layer_sizes == other.layer_sizes and self.edges == other.edges
                and self.labels == other.labels and self.edge_labels == other.edge_labels)

    def __hash__(self):
        return hash((self.layer_sizes, self.edges))

    # -- paths -------------------------------------------------------------
    def path_vertices(self, path: Path) -> list[int]:
        if not path:
            return [self.source]
        return [int(self.tails[path[0]])] + [int(self.heads[e]) for e in path]

    def is_path(self, path: Path) -> bool:
        """Source-to-terminal chain of edges with one edge per layer transition."""
        if len(path) != self.n_layers - 1:
            return False
        v = self.source
        for e in path:
            if not (0 <= e < self.n_edges) or self.tails[e] != v:
                return False
            v = int(self.heads[e])
        return self.is_terminal(v)

    def terminal_of(self, path: Path) -> int:
        return int(self.heads[path[-1]]) if path else self.source

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        d = {"layers": list(self.layer_sizes),
             "edges": [[t, h] if lab is None else [t, h, lab]
                       for (t, h), lab in zip(self.edges, self.edge_labels)]}
        default = tuple(str(v) for v in range(self.n_vertices))
        if self.labels != default:
            d["labels"] = {str(v): lab for v, lab in enumerate(self.labels)}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LayeredGraph":
        edges = d["edges"]
        edge_labels = None
        if any(len(e) > 2 for e in edges):
            edge_labels = [e[2] if len(e) > 2 else None for e in edges]
        return cls(d["layers"], [e[:2] for e in edges], labels=d.get("labels"), edge_labels=edge_labels)


def validate(graph: LayeredGraph) -> list[str]:
    """Return every violated structural invariant; an empty list means valid."""
    problems = []
    if graph.n_layers < 2:
        problems.append(f"fewer than 2 layers ({graph.n_layers})")
    if graph.n_layers and graph.layer_sizes[0] != 1:
        problems.append(f"first layer not singleton (size {graph.layer_sizes[0]})")
    for k, s in enumerate(graph.layer_sizes):
        if s == 0:
            problems.append(f"layer {k} is empty")
    seen = {}
    for e, (t, h) in enumerate(graph.edges):
        lt, lh = int(graph.layer_of[t]), int(graph.layer_of[h])
        if lh == lt + 1:
            pass
        elif lh > lt + 1:
            problems.append(f"edge skips layer: edge {e} ({t}->{h}) goes from layer {lt} to {lh}")
        else:
            problems.append(f"edge not forward: edge {e} ({t}->{h}) goes from layer {lt} to {lh}")
        key = (t, h, graph.edge_labels[e])
        if key in seen:
            problems.append(f"duplicate edge: edge {e} repeats edge {seen[key]} ({t}->{h})")
        else:
            seen[key] = e
    return problems


def check(graph: LayeredGraph) -> LayeredGraph:
    problems = validate(graph)
    if problems:
        raise InvalidGraph("; ".join(problems))
    return graph


def forward_counts(graph: LayeredGraph) -> list[int]:
    """Number of source-to-v paths for every vertex (exact integers)."""
    counts = [0] * graph.n_vertices
    counts[graph.source] = 1
    # edges only go forward one layer, so processing by increasing tail layer is topological
    for k in range(graph.n_layers - 1):
        for v in graph.layer(k):
            c = counts[v]
            if c:
                for e in graph.out_edges[v]:
                    counts[graph.heads[e]] += c
    return counts


def backward_counts(graph: LayeredGraph) -> list[int]:
    """Number of v-to-terminal paths for every vertex."""
    counts = [0] * graph.n_vertices
    for v in graph.terminals:
        counts[v] = 1
    for k in range(graph.n_layers - 2, -1, -1):
        for v in graph.layer(k):
            counts[v] = sum(counts[graph.heads[e]] for e in graph.out_edges[v])
    return counts


def count_paths(graph: LayeredGraph) -> int:
    counts = forward_counts(graph)
    return sum(counts[v] for v in graph.terminals)


def live_edges(graph: LayeredGraph) -> np.ndarray:
    """Boolean mask of edges lying on at least one source-to-terminal path."""
    fwd = forward_counts(graph)
    bwd = backward_counts(graph)
    return np.array([fwd[t] > 0 and bwd[h] > 0 for t, h in graph.edges], dtype=bool)


def iter_paths(graph: LayeredGraph):
    """Yield all paths in lexicographic order of their edge-id sequences."""
    bwd = backward_counts(graph)
    if bwd[graph.source] == 0:
        return
    last = graph.n_layers - 1
    stack = [(graph.source, ())]
    while stack:
        v, prefix = stack.pop()
        if graph.layer_of[v] == last:
            yield prefix
            continue
        # push in reverse so the lowest edge id is explored first
        for e in reversed(graph.out_edges[v]):
            h = int(graph.heads[e])
            if bwd[h]:
                stack.append((h, prefix + (e,)))


def enumerate_paths(graph: LayeredGraph, cap: int) -> list[Path]:
    n = count_paths(graph)
    if n > cap:
        raise CapExceeded(f"graph has {n} paths, cap is {cap}")
    return list(iter_paths(graph))


def first_path(graph: LayeredGraph) -> Path | None:
    return next(iter_paths(graph), None)


def longest_path(graph: LayeredGraph, weights, maximize: bool = True) -> tuple[float, Path]:
    """Best source-to-terminal path under additive edge weights, by layer DP.

    Ties are broken towards the lowest edge id at each vertex.
    """
    sign = 1.0 if maximize else -1.0
    w = sign * np.asarray(weights, dtype=float)
    best = [-np.inf] * graph.n_vertices
    choice = [-1] * graph.n_vertices
    for v in graph.terminals:
        best[v] = 0.0
    for k in range(graph.n_layers - 2, -1, -1):
        for v in graph.layer(k):
            for e in graph.out_edges[v]:
                val = w[e] + best[graph.heads[e]]
                if val > best[v]:
                    best[v] = val
                    choice[v] = e
    if best[graph.source] == -np.inf:
        raise InvalidGraph("graph has no source-to-terminal path")
    path = []
    v = graph.source
    while choice[v] >= 0:
        path.append(choice[v])
        v = int(graph.heads[choice[v]])
    return sign * best[graph.source], tuple(path)


def chain_graph(n_layers: int) -> LayeredGraph:
    return LayeredGraph([1] * n_layers, [(k, k + 1) for k in range(n_layers - 1)])


def complete_layers(width: int, depth: int) -> LayeredGraph:
    """Source fanning out to ``width`` vertices, then ``depth - 1`` complete bipartite stages.

    Has exactly ``width ** depth`` paths when a final singleton sink is absent.
    """
    sizes = [1] + [width] * depth
    edges = [(0, 1 + j) for j in range(width)]
    for k in range(1, depth):
        base_t = 1 + (k - 1) * width
        base_h = 1 + k * width
        edges += [(base_t + a, base_h + b) for a in range(width) for b in range(width)]
    return LayeredGraph(sizes, edges)
