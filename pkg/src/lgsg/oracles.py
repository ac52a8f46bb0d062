"""Best-response MILPs for binary-utility games.

Defender model, against an attacker mixture over paths p_a with weights x_a:

    max  sum_a r(p_a) x_a(p_a) y(p_a) - sum_a r(p_a) x_a(p_a)
    s.t. y(p_a) <= sum of f_d(e) over defender edges able to interdict p_a
         f_d binary unit flow, 0 <= y <= 1

The objective is minus the attacker's payoff.  Attacker model, against a
defender mixture over paths p_d with weights x_d:

    max  sum_v r(v) z_v
    s.t. z_v <= in-flow of f_a at terminal v
         z_v + sum_d x_d(p_d) y(p_d) <= 1
         y(p_d) >= f_a(e)  for every attacker edge e interdictable by p_d
         f_a binary unit flow, 0 <= y, z <= 1

By default the attacker's rows are summed: y(p_d) >= sum of f_a(e) over the
interdictable edges e of one layer, and a single budget row
sum_v z_v + sum_d x_d(p_d) y(p_d) <= 1.  A path uses one edge per layer and
reaches one terminal, so both forms agree on binary flows, but the summed
form has a much tighter relaxation.  ``aggregate=False`` gives the per-edge
and per-terminal rows.

Only edges on some source-terminal path get a flow variable.  Models are
kept as sparse row lists so that new opponent paths can be appended in place.
"""
from __future__ import annotations

import numpy as np

from .errors import EmptySupport, ModeMismatch, NoIncumbent, StaleModel
from .game import BIN, GameInstance, MixedStrategy, utility_vs_attacker_mix, utility_vs_defender_mix
from .graph import Path, live_edges
from .lp import EQ, GE, LE, LpProblem
from .milp import GAP_TOL, MilpProblem, PathHint, solve_milp

DEFENDER, ATTACKER = "defender", "attacker"


class OracleModel:
    """Mutable best-response MILP for one player against a fixed opponent mixture."""

    def __init__(self, game: GameInstance, side: str, aggregate: bool = True):
        self.game = game
        self.side = side
        self.aggregate = aggregate
        self.graph = game.defender if side == DEFENDER else game.attacker
        self.edge_ids = np.flatnonzero(live_edges(self.graph))
        self.edge_col = {int(e): k for k, e in enumerate(self.edge_ids)}
        self.n_vars = len(self.edge_ids)
        self.obj = {}            # column -> objective coefficient
        self.offset = 0.0
        self.hi = {}             # column -> upper bound (flows and y/z are all within [0, 1])
        self.rows = []           # [dict col -> coef, relation, rhs]
        self.support: list[Path] = []
        self.weights = np.zeros(0)
        self.y_col: dict[Path, int] = {}
        self.z_col: dict[int, int] = {}
        self.budget_rows: dict[int, int] = {}   # terminal (-1 if shared) -> row of z + sum x y <= 1
        self.last_report = None
        self._flow_rows()

    # -- construction -------------------------------------------------------------

    def _new_var(self, hi=1.0) -> int:
        j = self.n_vars
        self.n_vars += 1
        self.hi[j] = hi
        return j

    def _flow_rows(self):
        g = self.graph
        last = g.n_layers - 1
        src = {self.edge_col[e]: 1.0 for e in g.out_edges[g.source] if e in self.edge_col}
        self.rows.append([src, EQ, 1.0])
        for v in range(1, g.n_vertices):
            if g.layer_of[v] == last:
                continue
            row = {}
            for e in g.in_edges[v]:
                if e in self.edge_col:
                    row[self.edge_col[e]] = 1.0
            for e in g.out_edges[v]:
                if e in self.edge_col:
                    row[self.edge_col[e]] = -1.0
            if row:
                self.rows.append([row, EQ, 0.0])

    def _add_opponent_path(self, path: Path):
        game = self.game
        y = self._new_var()
        self.y_col[path] = y
        self.support.append(path)
        if self.side == DEFENDER:
            row = {y: 1.0}
            for d in sorted(game.interdiction.covering(path)):
                if d in self.edge_col:
                    row[self.edge_col[d]] = -1.0
            self.rows.append([row, LE, 0.0])
        else:
            covered = [a for a in sorted(game.interdiction.covered_by(path)) if a in self.edge_col]
            if self.aggregate:
                by_layer = {}
                for a in covered:
                    by_layer.setdefault(self.graph.edge_layer(a), []).append(a)
                for k in sorted(by_layer):
                    row = {y: 1.0}
                    for a in by_layer[k]:
                        row[self.edge_col[a]] = -1.0
                    self.rows.append([row, GE, 0.0])
            else:
                for a in covered:
                    self.rows.append([{y: 1.0, self.edge_col[a]: -1.0}, GE, 0.0])
            for r in self.budget_rows.values():
                self.rows[r][0][y] = 0.0

    def _set_weights(self, weights: np.ndarray):
        self.weights = np.asarray(weights, dtype=float)
        game = self.game
        if self.side == DEFENDER:
            rx = np.array([game.target_of(p) for p in self.support]) * self.weights
            self.offset = -float(rx.sum())
            for p, w in zip(self.support, rx):
                self.obj[self.y_col[p]] = float(w)
        else:
            for r in self.budget_rows.values():
                row = self.rows[r][0]
                for p, w in zip(self.support, self.weights):
                    row[self.y_col[p]] = float(w)

    def _add_terminals(self):
        g = self.graph
        for v in g.terminals:
            ins = [self.edge_col[e] for e in g.in_edges[v] if e in self.edge_col]
            if not ins:
                continue
            z = self._new_var()
            self.z_col[v] = z
            self.obj[z] = float(self.game.target_values[v])
            row = {z: 1.0}
            for c in ins:
                row[c] = -1.0
            self.rows.append([row, LE, 0.0])
            if not self.aggregate:
                self.budget_rows[v] = len(self.rows)
                self.rows.append([{z: 1.0}, LE, 1.0])
        if self.aggregate:
            self.budget_rows[-1] = len(self.rows)
            self.rows.append([{z: 1.0 for z in self.z_col.values()}, LE, 1.0])

    # -- views --------------------------------------------------------------------

    def opponent_mixture(self) -> MixedStrategy:
        return MixedStrategy(self.support, self.weights)

    def to_milp(self) -> MilpProblem:
        n = self.n_vars
        A = np.zeros((len(self.rows), n))
        for i, (row, _, _) in enumerate(self.rows):
            for j, v in row.items():
                A[i, j] = v
        c = np.zeros(n)
        for j, v in self.obj.items():
            c[j] = v
        hi = np.ones(n)
        for j, v in self.hi.items():
            hi[j] = v
        lp = LpProblem(c, A, [r[1] for r in self.rows], [r[2] for r in self.rows],
                       lo=np.zeros(n), hi=hi, sense="max", offset=self.offset)
        binaries = np.arange(len(self.edge_ids))
        return MilpProblem(lp, binaries, path_hint=PathHint(self.graph, 0, self.edge_ids))

    def to_lp_text(self) -> str:
        """CPLEX LP format dump, for cross-checking against external solvers."""
        def name(j):
            if j < len(self.edge_ids):
                return f"f{int(self.edge_ids[j])}"
            for p, c in self.y_col.items():
                if c == j:
                    return f"y{self.support.index(p)}"
            for v, c in self.z_col.items():
                if c == j:
                    return f"z{v}"
            return f"x{j}"

        def expr(coefs):
            parts = [f"{'+' if v >= 0 else '-'} {abs(v):.17g} {name(j)}" for j, v in sorted(coefs.items()) if v != 0]
            return " ".join(parts) if parts else "0 x0"

        out = [f"\\ {self.side} best response, objective offset {self.offset:.17g}", "Maximize", f" obj: {expr(self.obj)}",
               "Subject To"]
        for i, (row, rel, rhs) in enumerate(self.rows):
            out.append(f" c{i}: {expr(row)} {rel} {rhs:.17g}")
        out.append("Bounds")
        for j in range(self.n_vars):
            out.append(f" 0 <= {name(j)} <= {self.hi.get(j, 1.0):.17g}")
        out.append("Binaries")
        out.append(" " + " ".join(name(j) for j in range(len(self.edge_ids))))
        out.append("End")
        return "\n".join(out) + "\n"


def _check(game: GameInstance, mix: MixedStrategy):
    if game.mode != BIN:
        raise ModeMismatch("best-response MILPs are defined for BIN games")
    if len(mix.support) == 0:
        raise EmptySupport("opponent mixture has empty support")


def build_defender_model(game: GameInstance, x_a: MixedStrategy) -> OracleModel:
    _check(game, x_a)
    model = OracleModel(game, DEFENDER)
    for p in x_a.support:
        model._add_opponent_path(tuple(p))
    model._set_weights(x_a.probs)
    return model


def build_attacker_model(game: GameInstance, x_d: MixedStrategy, aggregate: bool = True) -> OracleModel:
    _check(game, x_d)
    model = OracleModel(game, ATTACKER, aggregate=aggregate)
    model._add_terminals()
    for p in x_d.support:
        model._add_opponent_path(tuple(p))
    model._set_weights(x_d.probs)
    return model


def update_model(model: OracleModel, new_path: Path | None, new_weights: MixedStrategy) -> OracleModel:
    """Append one opponent path (or none) and reweight the whole support in place.

    ``new_weights`` may list paths in any order; support paths it omits get
    weight 0.  Raises StaleModel when the path is already present, is not a
    path of the opponent graph, or the weights mention unknown paths.
    """
    opp = model.game.attacker if model.side == DEFENDER else model.game.defender
    if new_path is not None:
        new_path = tuple(new_path)
        if new_path in model.y_col:
            raise StaleModel("opponent path is already in the model")
        if not opp.is_path(new_path):
            raise StaleModel("path does not belong to this model's game")
    known = set(model.y_col) | ({new_path} if new_path is not None else set())
    lookup = new_weights.as_dict()
    if any(tuple(p) not in known for p in lookup):
        raise StaleModel("weights mention a path that is not in the model")
    if new_path is not None:
        model._add_opponent_path(new_path)
    model._set_weights([lookup.get(p, 0.0) for p in model.support])
    return model


def extract_path(model: OracleModel, x: np.ndarray) -> Path:
    g = model.graph
    v, path = g.source, []
    last = g.n_layers - 1
    while g.layer_of[v] != last:
        nxt = [e for e in g.out_edges[v] if e in model.edge_col and x[model.edge_col[e]] > 0.5]
        if not nxt:
            raise NoIncumbent("incumbent flow does not contain a source-terminal path")
        e = nxt[0]
        path.append(e)
        v = int(g.heads[e])
    return tuple(path)


def path_value(model: OracleModel, path: Path) -> float:
    """Attacker utility of the path against the model's opponent mixture."""
    mix = model.opponent_mixture()
    if model.side == DEFENDER:
        return float(utility_vs_attacker_mix(model.game, [path], mix)[0])
    return float(utility_vs_defender_mix(model.game, mix, [path])[0])


def best_response(model: OracleModel, time_limit: float | None = None, node_limit: int | None = None,
                  gap_tol: float = GAP_TOL):
    """Solve the model; returns (path, attacker utility vs the opponent mixture, exact flag).

    The value is recomputed from the utility function, never read off the MILP.
    """
    report = solve_milp(model.to_milp(), time_limit=time_limit, node_limit=node_limit, gap_tol=gap_tol)
    model.last_report = report
    if not report.has_incumbent:
        raise NoIncumbent(f"no incumbent found (status {report.status})")
    path = extract_path(model, report.x)
    return path, path_value(model, path), report.exact
