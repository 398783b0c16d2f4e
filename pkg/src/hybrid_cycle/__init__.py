"""Optimal hybrid limit cycles for pollution control under periodic regime shifts."""

from .control import ControlLaw, LawKind, instantaneous_profit, myopic_control, myopic_law, optimal_control, optimal_law
from .costate import CostateSolution, lambda_at, lambda_eq, lambda_extrema, solve_costate
from .dynamics import IntegratorConfig, Trajectory, flow_map, integrate, payoff_at, tail_bound
from .limit_cycle import ConvergenceError, LimitCycle, convergence_envelope, find_x_eq, poincare_map
from .model import ModelParams, RawParams, RegimeSchedule, ValidationError, delta_at, normalize, segment_boundaries
from .sustainability import (
    RegionGrid,
    SustainabilityReport,
    check_sustainable,
    corollary_raw,
    lemma3_sufficient,
    region_grid,
)

__version__ = "0.1.0"
