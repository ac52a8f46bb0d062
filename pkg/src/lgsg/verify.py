"""Cross-checks between independent solution routes, reported as data.

Every check returns a ``Check`` with a pass flag and the measured deviation;
nothing here raises on a failed comparison.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .double_oracle import certify, enumeration_best_responses, run_double_oracle, solve_full_matrix
from .errors import CapExceeded
from .flows import (best_response_values, decompose_flow, expand_markov, flow_from_distribution,
                    markov_policy, solve_linear_ne)
from .game import BIN, EDGE_EQUALITY, LIN, GameInstance, MixedStrategy, payoff_matrix
from .graph import LayeredGraph, count_paths, enumerate_paths, validate
from .lp import solve_zero_sum
from .oracles import best_response, build_attacker_model, build_defender_model
from .scenarios import CNF, build_3sat_game, build_maxsat_br_fixture, random_cnf, rng_from


@dataclass
class Check:
    name: str
    passed: bool
    deviation: float = 0.0
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def check_structure(game: GameInstance) -> list[Check]:
    out = []
    for side, g in (("defender", game.defender), ("attacker", game.attacker)):
        problems = validate(g)
        out.append(Check(f"{side} graph valid", not problems, float(len(problems)), "; ".join(problems[:5])))
    return out


def check_strategy(game: GameInstance, x: MixedStrategy, side: str) -> Check:
    g = game.defender if side == "defender" else game.attacker
    problems = x.problems(g)
    dev = abs(sum(x.probs) - 1.0)
    return Check(f"{side} strategy valid", not problems, dev, "; ".join(problems[:5]))


def check_strategies_equilibrium(game: GameInstance, x_d: MixedStrategy, x_a: MixedStrategy, epsilon: float) -> list[Check]:
    """Validity of a strategy pair plus exploitability by exact best responses."""
    out = [check_strategy(game, x_d, "defender"), check_strategy(game, x_a, "attacker")]
    if not all(c.passed for c in out) or game.mode != BIN:
        return out
    gain_d, gain_a, _ = certify(game, x_d, x_a)
    worst = max(gain_d, gain_a)
    out.append(Check("strategies form an epsilon-equilibrium", worst <= epsilon + 1e-6, worst,
                     f"defender gain {gain_d:.3e}, attacker gain {gain_a:.3e}"))
    return out


def check_do_vs_full(game: GameInstance, epsilon: float = 1e-3, cap: int = 10**6) -> list[Check]:
    try:
        full = solve_full_matrix(game, cap=cap)
    except CapExceeded as exc:
        return [Check("double oracle vs full matrix", False, float("nan"), str(exc))]
    rep = run_double_oracle(game, epsilon=epsilon, raise_on_max_iters=False)
    dev = abs(rep.value - full.value)
    gain_d, gain_a, _ = certify(game, rep.x_d, rep.x_a)
    return [Check("double oracle vs full matrix", rep.converged and dev <= epsilon, dev,
                  f"do {rep.value:.9g}, full {full.value:.9g}, {rep.iterations} iterations"),
            Check("double oracle certified by exact best responses", max(gain_d, gain_a) <= epsilon + 1e-6,
                  max(gain_d, gain_a), f"defender gain {gain_d:.3e}, attacker gain {gain_a:.3e}")]


def random_mixture(rng, paths, max_support: int = 8) -> MixedStrategy:
    k = int(rng.integers(1, min(max_support, len(paths)) + 1))
    idx = sorted(rng.choice(len(paths), size=k, replace=False))
    return MixedStrategy([paths[i] for i in idx], rng.dirichlet(np.ones(k)))


def check_br_vs_enumeration(game: GameInstance, seed=0, trials: int = 3, cap: int = 10**5) -> list[Check]:
    rng = rng_from(seed)
    P_d = enumerate_paths(game.defender, cap)
    P_a = enumerate_paths(game.attacker, cap)
    worst = 0.0
    for _ in range(trials):
        x_d, x_a = random_mixture(rng, P_d), random_mixture(rng, P_a)
        e_d, e_a = enumeration_best_responses(game, x_d, x_a, cap)
        _, v_d, ex_d = best_response(build_defender_model(game, x_a))
        _, v_a, ex_a = best_response(build_attacker_model(game, x_d))
        worst = max(worst, abs(v_d - e_d), abs(v_a - e_a), 0.0 if ex_d and ex_a else np.inf)
    return [Check("best responses vs enumeration", worst <= 1e-9, worst, f"{trials} random mixtures")]


def check_linear(game: GameInstance, cap: int = 10**6) -> list[Check]:
    f_d, f_a, value = solve_linear_ne(game)
    def_val, att_val, _, _ = best_response_values(game, f_d, f_a)
    expl = max(att_val - value, value - def_val)
    out = [Check("flow equilibrium unexploitable", expl <= 1e-6, expl,
                 f"value {value:.9g}, attacker deviation {att_val:.9g}, defender deviation {def_val:.9g}")]
    try:
        M, _, _ = payoff_matrix(game, cap=cap)
    except CapExceeded:
        return out
    ref = solve_zero_sum(M).value
    out.append(Check("flow LP vs full matrix", abs(ref - value) <= 1e-6, abs(ref - value),
                     f"flow {value:.9g}, matrix {ref:.9g}"))
    return out


def check_flow_roundtrip(game: GameInstance, seed=0, cap: int = 10**5) -> list[Check]:
    rng = rng_from(seed)
    worst = 0.0
    for g in (game.defender, game.attacker):
        x = random_mixture(rng, enumerate_paths(g, cap))
        f = flow_from_distribution(g, x)
        back = flow_from_distribution(g, decompose_flow(g, f))
        worst = max(worst, float(np.abs(back - f).max()))
    return [Check("flow decomposition round trip", worst <= 1e-9, worst)]


def check_game(game: GameInstance, epsilon: float = 1e-3, seed=0, cap: int = 10**6) -> list[Check]:
    """Every applicable check for a single instance."""
    out = check_structure(game)
    if not all(c.passed for c in out):
        return out
    pairs = count_paths(game.defender) * count_paths(game.attacker)
    out += check_flow_roundtrip(game, seed)
    if game.mode == LIN:
        out += check_linear(game, cap)
    else:
        if pairs <= cap:
            out += check_do_vs_full(game, epsilon, cap)
        else:
            rep = run_double_oracle(game, epsilon=epsilon, raise_on_max_iters=False)
            gain_d, gain_a, _ = certify(game, rep.x_d, rep.x_a)
            out.append(Check("double oracle certified by exact best responses",
                             rep.converged and max(gain_d, gain_a) <= epsilon + 1e-6, max(gain_d, gain_a)))
        if max(count_paths(game.defender), count_paths(game.attacker)) <= 10**5:
            out += check_br_vs_enumeration(game, seed)
    return out


# -- satisfiability fixtures ------------------------------------------------------

def satisfiable(cnf: CNF) -> bool:
    """Plain DPLL with unit propagation."""
    def dpll(clauses, assignment):
        clauses = [c for c in clauses if not any(assignment.get(abs(l)) == (l > 0) for l in c)]
        clauses = [[l for l in c if abs(l) not in assignment] for c in clauses]
        if not clauses:
            return True
        if any(not c for c in clauses):
            return False
        for c in clauses:
            if len(c) == 1:
                return dpll(clauses, {**assignment, abs(c[0]): c[0] > 0})
        var = abs(clauses[0][0])
        return dpll(clauses, {**assignment, var: True}) or dpll(clauses, {**assignment, var: False})

    return dpll([list(c) for c in cnf.clauses], {})


def max_satisfiable(cnf: CNF) -> int:
    return max(cnf.satisfied_count(bits) for bits in itertools.product([False, True], repeat=cnf.n_vars))


def check_sat_fixtures(seed=0, count: int = 50, max_n: int = 6, max_m: int = 6) -> list[Check]:
    rng = rng_from(seed)
    sat_bad, maxsat_bad, worst = 0, 0, 0.0
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        cnf = random_cnf(n, m, rng)
        game = build_3sat_game(cnf)
        M, _, _ = payoff_matrix(game)
        value = solve_zero_sum(M).value
        if (abs(value) <= 1e-9) != satisfiable(cnf):
            sat_bad += 1
        fixture, x_a = build_maxsat_br_fixture(cnf)
        _, v_d, exact = best_response(build_defender_model(fixture, x_a))
        expected = m - max_satisfiable(cnf)
        worst = max(worst, abs(v_d - expected))
        if not exact or abs(v_d - expected) > 1e-9:
            maxsat_bad += 1
    return [Check("3-SAT game value is zero iff satisfiable", sat_bad == 0, float(sat_bad), f"{count} formulas"),
            Check("MAX-SAT fixture best response equals m - MAXSAT", maxsat_bad == 0, worst, f"{count} formulas")]


# -- experimental -------------------------------------------------------------------

def conjecture_search(seed=0, trials: int = 20, n_layers: int = 4, max_width: int = 3) -> list[dict]:
    """Look for games without a Markovian equilibrium on the attacker side.

    Instances share one graph between the players, use unit targets and
    edge-equality interdiction.  For each one the equilibrium from the matrix
    game is re-expanded through its flow and the exploitability of that
    Markovian strategy is recorded.  A positive value only flags a candidate:
    some other equilibrium may still be Markovian.
    """
    from .scenarios import random_layered_graph

    rng = rng_from(seed)
    rows = []
    for k in range(trials):
        g = random_layered_graph(rng, n_layers, max_width, density=float(rng.uniform(0.3, 0.9)))
        game = GameInstance(g, LayeredGraph.from_dict(g.to_dict()), targets={v: 1.0 for v in g.terminals},
                            interdiction=EDGE_EQUALITY, mode=BIN, name=f"conjecture-{k}")
        M, P_d, P_a = payoff_matrix(game)
        sol = solve_zero_sum(M)
        x_a = MixedStrategy(P_a, sol.col).trimmed()
        markov = expand_markov(g, markov_policy(g, flow_from_distribution(g, x_a)))
        cols = [P_a.index(p) for p in markov.support]
        worst = float((M[:, cols] @ np.asarray(markov.probs)).min())
        rows.append({"trial": k, "paths": len(P_a), "value": sol.value, "markov_worst_case": worst,
                     "exploitability": sol.value - worst})
    return rows


def run_suite(checks: list[Check]) -> bool:
    return all(c.passed for c in checks)


__all__ = ["Check", "check_structure", "check_strategy", "check_strategies_equilibrium", "check_do_vs_full",
           "check_br_vs_enumeration", "check_linear", "check_flow_roundtrip", "check_game", "satisfiable",
           "max_satisfiable", "check_sat_fixtures", "conjecture_search"]
