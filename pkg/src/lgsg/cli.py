"""Command-line front end: ``lgsg generate | solve | bench | verify``.

Exit codes: 0 success, 1 a verification check failed, 2 the solver did not
converge, 3 bad input (unreadable file, invalid instance, cap exceeded,
solver incompatible with the game).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import kernels
from .double_oracle import run_double_oracle, solve_full_matrix
from .errors import LgsgError, MaxItersExceeded, ModeMismatch
from .flows import decompose_flow, solve_linear_ne
from .game import BIN, LIN, GameInstance, MixedStrategy
from .graph import count_paths
from .scenarios import (AT, LI, PE, CNF, PhysicalGraph, UnrollSpec, build_3sat_game, build_maxsat_br_fixture,
                        example1, grid_world, random_game, random_values, unroll)
from . import verify as vf

EXIT_OK, EXIT_CHECK_FAILED, EXIT_UNCONVERGED, EXIT_INPUT = 0, 1, 2, 3
SCENARIOS = ["example1", "example1-lin", "pe-grid", "at-grid", "li-grid", "physical", "3sat", "maxsat", "random"]
SOLVERS = ["lin-lp", "do", "do-approx", "full-matrix"]


# -- instances ------------------------------------------------------------------------

def add_scenario_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("built-in scenario")
    g.add_argument("--scenario", choices=SCENARIOS, help="builtin instance family")
    g.add_argument("--size", type=int, default=3, help="grid side length (default 3)")
    g.add_argument("--horizon", type=int, default=4, help="unrolling horizon T (default 4)")
    g.add_argument("--qdrop", type=float, default=0.0, help="edge drop probability for both players")
    g.add_argument("--qdrop-d", type=float, help="defender edge drop probability (overrides --qdrop)")
    g.add_argument("--qdrop-a", type=float, help="attacker edge drop probability (overrides --qdrop)")
    g.add_argument("--tsetup", type=int, default=1, help="attacker setup time for at-grid (default 1)")
    g.add_argument("--gamma", type=float, default=0.9, help="exit delay factor for li-grid (default 0.9)")
    g.add_argument("--exits", help="comma-separated exit labels for li-grid (default: corner 1S)")
    g.add_argument("--values", choices=["unit", "random", "habitat-lin", "habitat-exp"], default="unit",
                   help="target values on physical vertices")
    g.add_argument("--habitats", help="habitats as 'x,y,score;x,y,score' (default: grid centre, score 10)")
    g.add_argument("--no-waiting", action="store_true", help="disallow stay actions")
    g.add_argument("--interdiction", choices=["SHARED_HEAD_VERTEX", "EDGE_EQUALITY"], default="SHARED_HEAD_VERTEX")
    g.add_argument("--physical", help="physical-graph JSON for --scenario physical")
    g.add_argument("--domain", choices=[PE, AT, LI], default=PE, help="unrolling domain for --scenario physical")
    g.add_argument("--cnf", help="DIMACS CNF file for 3sat / maxsat")
    g.add_argument("--mode", choices=[BIN, LIN], default=BIN, help="utility mode for --scenario random")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (PCG64)")


def _habitats(args, phys: PhysicalGraph):
    if args.habitats:
        out = []
        for item in args.habitats.split(";"):
            x, y, score = (float(t) for t in item.split(","))
            out.append(((x, y), score))
        return out
    xs = [p[0] for p in phys.xy]
    ys = [p[1] for p in phys.xy]
    return [(((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2), 10.0)]


def _unroll_spec(args, domain, phys):
    attenuation = habitats = None
    if args.values.startswith("habitat"):
        attenuation = "LIN" if args.values == "habitat-lin" else "EXP"
        habitats = _habitats(args, phys)
    return UnrollSpec(horizon=args.horizon, domain=domain, t_setup=args.tsetup, gamma=args.gamma,
                      allow_waiting=not args.no_waiting, interdiction=args.interdiction,
                      attenuation=attenuation, habitats=habitats or [])


def build_scenario(args) -> GameInstance:
    s = args.scenario
    if s == "example1":
        return example1(BIN)
    if s == "example1-lin":
        return example1(LIN)
    if s == "random":
        return random_game(args.seed, mode=args.mode)
    if s in ("3sat", "maxsat"):
        if not args.cnf:
            raise LgsgError(f"--scenario {s} needs --cnf FILE")
        with open(args.cnf) as fh:
            cnf = CNF.parse_dimacs(fh.read())
        return build_3sat_game(cnf) if s == "3sat" else build_maxsat_br_fixture(cnf)[0]
    if s == "physical":
        if not args.physical:
            raise LgsgError("--scenario physical needs --physical FILE")
        phys = PhysicalGraph.load(args.physical)
        domain = args.domain
    else:
        qd = args.qdrop if args.qdrop_d is None else args.qdrop_d
        qa = args.qdrop if args.qdrop_a is None else args.qdrop_a
        phys = grid_world(args.size, qd, qa, args.seed)
        domain = {"pe-grid": PE, "at-grid": AT, "li-grid": LI}[s]
        if domain == LI:
            labels = args.exits.split(",") if args.exits else [phys.labels[args.size - 1]]
            phys.exits = [phys.labels.index(lab) for lab in labels]
    if args.values == "random":
        phys.values = random_values(phys, args.seed)
    return unroll(phys, _unroll_spec(args, domain, phys))


def load_game(args) -> GameInstance:
    if getattr(args, "instance", None):
        with open(args.instance) as fh:
            return GameInstance.from_dict(json.load(fh))
    if args.scenario:
        return build_scenario(args)
    raise LgsgError("give an instance file or --scenario")


def game_summary(game: GameInstance) -> dict:
    n_d, n_a = count_paths(game.defender), count_paths(game.attacker)
    return {"name": game.name, "mode": game.mode, "layers": game.defender.n_layers,
            "edges_d": game.defender.n_edges, "edges_a": game.attacker.n_edges,
            "paths_d": n_d, "paths_a": n_a, "game_size": n_d + n_a}


# -- solving ----------------------------------------------------------------------

def solve_game(game: GameInstance, solver: str, epsilon=1e-3, br_time_limit=1.0, max_iters=10_000,
               cap=10**6, trace_csv=None) -> dict:
    """Run one solver; returns a JSON-ready result dict."""
    t0 = time.perf_counter()
    if solver == "lin-lp":
        if game.mode != LIN:
            raise ModeMismatch("lin-lp needs a LIN game")
        f_d, f_a, value = solve_linear_ne(game)
        x_d = decompose_flow(game.defender, f_d)
        x_a = decompose_flow(game.attacker, f_a)
        res = {"value": value, "gap": 0.0, "converged": True, "iterations": 1,
               "flow_d": f_d.tolist(), "flow_a": f_a.tolist()}
    elif solver == "full-matrix":
        full = solve_full_matrix(game, cap=cap)
        x_d, x_a = full.x_d, full.x_a
        res = {"value": full.value, "gap": 0.0, "converged": True, "iterations": 1,
               "sg": list(full.shape)}
    else:
        if not epsilon > 0:
            raise LgsgError("--epsilon must be > 0")
        limit = br_time_limit if solver == "do-approx" else None
        try:
            rep = run_double_oracle(game, epsilon=epsilon, br_time_limit=limit, max_iters=max_iters,
                                    trace_csv=trace_csv)
        except MaxItersExceeded as exc:
            rep = exc.report
        x_d, x_a = rep.x_d, rep.x_a
        res = {"value": rep.value, "gap": rep.gap, "converged": rep.converged, "iterations": rep.iterations,
               "reason": rep.reason, "sg": list(rep.subgame_sizes), "resolves": rep.resolves}
    res["sp"] = [len(x_d.support), len(x_a.support)]
    res["wall_time_s"] = time.perf_counter() - t0
    res["solver"] = solver
    res["defender"] = x_d.to_dict()
    res["attacker"] = x_a.to_dict()
    return res


def _print_result(res: dict, out=None):
    out = out or sys.stdout
    print(f"solver      {res['solver']}", file=out)
    print(f"value       {res['value']:.10g}", file=out)
    print(f"gap         {res['gap']:.3e}", file=out)
    print(f"converged   {res['converged']}", file=out)
    if "sg" in res:
        print(f"SG (d, a)   {res['sg'][0]}, {res['sg'][1]}", file=out)
    print(f"SP (d, a)   {res['sp'][0]}, {res['sp'][1]}", file=out)
    print(f"wall time   {res['wall_time_s']:.3f}s", file=out)
    for side in ("defender", "attacker"):
        print(f"{side}:", file=out)
        for path, q in zip(res[side]["paths"], res[side]["probs"]):
            print(f"  {q:.6f}  {path}", file=out)


# -- commands ------------------------------------------------------------------------

def cmd_generate(args) -> int:
    game = load_game(args)
    text = json.dumps(game.to_dict())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    info = game_summary(game)
    stream = sys.stderr if not args.out else sys.stdout
    print(f"paths: defender {info['paths_d']}, attacker {info['paths_a']}, total {info['game_size']}", file=stream)
    print(f"edges: defender {info['edges_d']}, attacker {info['edges_a']}; layers {info['layers']}", file=stream)
    return EXIT_OK


def cmd_solve(args) -> int:
    game = load_game(args)
    res = solve_game(game, args.solver, epsilon=args.epsilon, br_time_limit=args.br_time_limit,
                     max_iters=args.max_iters, cap=int(args.cap), trace_csv=args.trace_csv)
    res["instance"] = game_summary(game)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(res, fh, indent=1)
    _print_result(res)
    return EXIT_OK if res["converged"] else EXIT_UNCONVERGED


def _bench_one(job):
    kind, size, horizon, seed, solver, args = job
    ns = argparse.Namespace(**args)
    ns.scenario, ns.size, ns.horizon, ns.seed = kind, size, horizon, seed
    game = build_scenario(ns)
    info = game_summary(game)
    row = {"scenario": kind, "size": size, "horizon": horizon, "seed": seed, "solver": solver,
           "paths_d": info["paths_d"], "paths_a": info["paths_a"], "game_size": info["game_size"]}
    try:
        res = solve_game(game, solver, epsilon=ns.epsilon, br_time_limit=ns.br_time_limit,
                         max_iters=ns.max_iters, cap=int(ns.cap))
    except LgsgError as exc:
        row.update(status=type(exc).__name__)
        return row
    row.update(status="ok" if res["converged"] else "unconverged", value=res["value"], gap=res["gap"],
               iterations=res["iterations"], sg_d=res.get("sg", ["", ""])[0], sg_a=res.get("sg", ["", ""])[1],
               sp_d=res["sp"][0], sp_a=res["sp"][1], wall_s=res["wall_time_s"])
    return row


BENCH_FIELDS = ["scenario", "size", "horizon", "seed", "solver", "paths_d", "paths_a", "game_size", "status",
                "value", "gap", "iterations", "sg_d", "sg_a", "sp_d", "sp_a", "wall_s"]


def cmd_bench(args) -> int:
    base = {k: v for k, v in vars(args).items() if k != "func"}
    jobs = [(args.scenario or "pe-grid", size, horizon, seed, solver, base)
            for size in args.sizes for horizon in args.horizons
            for seed in range(args.seed, args.seed + args.repeats) for solver in args.solvers]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow(r)
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def _emit(checks, as_json: bool) -> int:
    for c in checks:
        if as_json:
            print(json.dumps(c.as_dict()))
        else:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  (deviation {c.deviation:.3e}) {c.detail}")
    return EXIT_OK if vf.run_suite(checks) else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    if args.suite == "sat":
        return _emit(vf.check_sat_fixtures(seed=args.seed, count=args.count), args.json)
    if args.suite == "grid-sweep":
        checks = []
        for seed in range(args.seed, args.seed + args.count):
            phys = grid_world(3, 0.1, 0.1, seed)
            phys.values = random_values(phys, seed)
            game = unroll(phys, UnrollSpec(horizon=4))
            for c in vf.check_game(game, epsilon=args.epsilon, seed=seed):
                c.name = f"seed {seed}: {c.name}"
                checks.append(c)
        return _emit(checks, args.json)
    if args.suite == "conjecture":
        for row in vf.conjecture_search(seed=args.seed, trials=args.count):
            print(json.dumps(row))
        return EXIT_OK
    game = load_game(args)
    if args.strategies:
        with open(args.strategies) as fh:
            data = json.load(fh)
        x_d = MixedStrategy.from_dict(data["defender"])
        x_a = MixedStrategy.from_dict(data["attacker"])
        checks = vf.check_structure(game) + vf.check_strategies_equilibrium(game, x_d, x_a, args.epsilon)
    else:
        checks = vf.check_game(game, epsilon=args.epsilon, seed=args.seed, cap=int(args.cap))
    return _emit(checks, args.json)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgsg", description="Layered graph security games: generate, solve, verify.")
    parser.add_argument("--version", action="version", version=f"%(prog)s (kernels: {kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_args(p):
        p.add_argument("--solver", choices=SOLVERS, default="do", help="solution method (default do)")
        p.add_argument("--epsilon", type=float, default=1e-3, help="equilibrium gap tolerance (default 1e-3)")
        p.add_argument("--br-time-limit", type=float, default=1.0,
                       help="seconds per best-response MILP for do-approx (default 1.0)")
        p.add_argument("--max-iters", type=int, default=10_000, help="double-oracle iteration cap")
        p.add_argument("--cap", type=float, default=1e6, help="path-pair cap for full-matrix (default 1e6)")

    p = sub.add_parser("generate", help="write a game instance as JSON")
    add_scenario_args(p)
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve an instance file or built-in scenario")
    p.add_argument("instance", nargs="?", help="game JSON")
    add_scenario_args(p)
    solver_args(p)
    p.add_argument("--json", help="write value, strategies and statistics here")
    p.add_argument("--trace-csv", help="write the double-oracle gap trace here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="sweep grid instances and solvers, emit CSV")
    add_scenario_args(p)
    solver_args(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[3])
    p.add_argument("--horizons", type=int, nargs="+", default=[4, 5])
    p.add_argument("--solvers", nargs="+", choices=SOLVERS, default=["do", "full-matrix"])
    p.add_argument("--repeats", type=int, default=3, help="seeds per configuration")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("-o", "--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="cross-check solvers on an instance or run a check suite")
    p.add_argument("instance", nargs="?", help="game JSON")
    add_scenario_args(p)
    p.add_argument("--strategies", help="solve --json output to validate against the instance")
    p.add_argument("--suite", choices=["instance", "sat", "grid-sweep", "conjecture"], default="instance",
                   help="conjecture is experimental and only reports")
    p.add_argument("--count", type=int, default=10, help="instances for sat / grid-sweep / conjecture")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--cap", type=float, default=1e6)
    p.add_argument("--json", action="store_true", help="one JSON object per check")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LgsgError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
