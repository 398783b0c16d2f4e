"""Environmental sustainability of the optimal policy.

The optimal control stays interior (apart from isolated instants) iff the
costate never drops below -1/beta, i.e. iff -min(lambda) <= 1/beta.  The
closed-form left-hand sides below are that negated minimum, written
separately for the two orderings of rho1 and rho2.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .costate import lambda_extrema, solve_costate
from .dynamics import write_table
from .model import ModelParams, RawParams

THREADS_ENV = "HYBRID_CYCLE_THREADS"


class Case(str, enum.Enum):
    RHO1_LESS_RHO2 = "Rho1LessRho2"
    RHO1_GREATER_RHO2 = "Rho1GreaterRho2"


def unit_period_lhs(rho1: float, rho2: float, t_s: float) -> float:
    """Sustainability left-hand side for a unit period, switch at ``t_s``.

    Equal rates fall back to the analytic limit 1/rho.
    """
    if rho1 == rho2:
        return 1.0 / rho1
    e1 = math.exp(rho1 * t_s)
    e2 = math.exp(rho2 * (t_s - 1.0))
    coef = (rho2 - rho1) / (rho1 * rho2)
    if rho1 < rho2:
        return 1.0 / rho2 + coef * (e1 - 1.0) / (e1 - e2)
    return 1.0 / rho1 + coef * e1 * (e2 - 1.0) / (e1 - e2)


def sustainability_lhs(params: ModelParams) -> float:
    # rescale to a unit period; the costate, and hence the bound, scale with T
    T = params.T
    return T * unit_period_lhs(params.rho1 * T, params.rho2 * T, params.t_s / T)


@dataclass(frozen=True)
class SustainabilityReport:
    case: Case
    lhs: float
    lambda_min: float
    beta_max: float
    sustainable: bool
    lemma3: bool
    corollary: bool | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["case"] = self.case.value
        return d


def lemma3_sufficient(params: ModelParams) -> bool:
    """Conservative test min(rho1, rho2) >= beta."""
    return min(params.rho1, params.rho2) >= params.beta


def corollary_raw(raw: RawParams) -> bool:
    """The conservative test in raw units: xi q <= a b (r + min(delta1, delta2))."""
    return raw.xi * raw.q <= raw.a * raw.b * (raw.r + min(raw.delta1, raw.delta2))


def check_sustainable(params: ModelParams, raw: RawParams | None = None) -> SustainabilityReport:
    lhs = sustainability_lhs(params)
    lambda_min, _ = lambda_extrema(solve_costate(params))
    return SustainabilityReport(
        case=Case.RHO1_LESS_RHO2 if params.rho1 < params.rho2 else Case.RHO1_GREATER_RHO2,
        lhs=lhs,
        lambda_min=lambda_min,
        beta_max=1.0 / lhs,
        sustainable=lhs <= 1.0 / params.beta,
        lemma3=lemma3_sufficient(params),
        corollary=None if raw is None else corollary_raw(raw),
    )


@dataclass
class RegionGrid:
    """Sustainability over a (rho1, rho2) grid; ``sustainable[i, j]`` is at (rho1[i], rho2[j])."""

    rho1: np.ndarray
    rho2: np.ndarray
    beta: float
    t_s: float
    sustainable: np.ndarray
    lemma3: np.ndarray

    @property
    def sustainable_fraction(self) -> float:
        return float(self.sustainable.mean())

    def columns(self) -> dict[str, np.ndarray]:
        r1, r2 = np.meshgrid(self.rho1, self.rho2, indexing="ij")
        return {
            "rho1": r1.ravel(),
            "rho2": r2.ravel(),
            "sustainable": self.sustainable.ravel(),
            "lemma3": self.lemma3.ravel(),
        }

    def write_csv(self, dest: str | Path | TextIO) -> None:
        write_table(dest, self.columns())


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def region_grid(
    rho1_range: tuple[float, float],
    rho2_range: tuple[float, float],
    n: int,
    beta: float,
    t_s: float,
    workers: int | None = None,
) -> RegionGrid:
    """Exact and conservative sustainability regions over a unit-period (rho1, rho2) grid."""
    if n < 2:
        raise ValueError("grid size must be at least 2")
    for lo, hi in (rho1_range, rho2_range):
        if not 0 < lo < hi:
            raise ValueError(f"rho range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if not 0 < t_s < 1:
        raise ValueError("t_s must lie in (0, 1)")
    rho1 = np.linspace(*rho1_range, n)
    rho2 = np.linspace(*rho2_range, n)
    inv_beta = 1.0 / beta

    def row(i: int) -> list[bool]:
        return [unit_period_lhs(rho1[i], b, t_s) <= inv_beta for b in rho2]

    workers = workers or _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(n)))
    else:
        rows = [row(i) for i in range(n)]
    sustainable = np.array(rows, dtype=bool)
    lemma3 = np.minimum.outer(rho1, rho2) >= beta
    return RegionGrid(rho1, rho2, beta, t_s, sustainable, lemma3)
