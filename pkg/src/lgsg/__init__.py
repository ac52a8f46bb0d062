"""Layered graph security games: exact flow LPs for linear utilities, double oracle for binary ones."""
from .errors import *  # noqa: F401,F403
from .graph import (LayeredGraph, Path, count_paths, enumerate_paths, first_path, longest_path,  # noqa: F401
                    validate)
from .game import (BIN, EDGE_EQUALITY, EXPLICIT, LIN, SHARED_HEAD_VERTEX, GameInstance,  # noqa: F401
                   InterdictionRelation, MixedStrategy, expected_utility, interdicts, payoff_matrix, u_bin,
                   u_lin, utility)
from .lp import LpProblem, LpSolution, solve_lp, solve_zero_sum  # noqa: F401
from .milp import MilpProblem, MilpReport, solve_milp  # noqa: F401
from .flows import (decompose_flow, expand_markov, flow_from_distribution, markov_policy,  # noqa: F401
                    solve_linear_ne)
from .oracles import best_response, build_attacker_model, build_defender_model, update_model  # noqa: F401
from .double_oracle import (DoReport, SubgameState, equilibrium_gap, initial_subgame,  # noqa: F401
                            run_double_oracle, solve_full_matrix)
from .scenarios import (PhysicalGraph, UnrollSpec, example1, grid_world, random_game, unroll,  # noqa: F401
                        unroll_at, unroll_li, unroll_pe)
from .kernels import BACKEND  # noqa: F401

__version__ = "0.1.0"
