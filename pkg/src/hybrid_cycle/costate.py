"""Closed-form periodic costate.

On each regime segment the adjoint obeys lambda' = rho_i lambda + 1, whose
solution from ``lambda_start`` is

    lambda(t) = (lambda_start + 1/rho_i) e^{rho_i (t - t_start)} - 1/rho_i.

Exactly one initial value ``lambda_eq`` makes the solution bounded; that
solution is T-periodic and is the one the optimal policy uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams


def unit_period_lambda_eq(rho1: float, rho2: float, t_s: float) -> float:
    """Bounded-costate anchor for a unit period, switching at ``t_s`` in (0, 1)."""
    e1 = math.exp(rho1 * t_s)
    e2 = math.exp(rho2 * (t_s - 1.0))
    num = rho1 - rho2 + rho2 * e1 - rho1 * e2
    den = rho1 * rho2 * (e2 - e1)
    return num / den


def _segment_value(start: float, rho: float, elapsed: float) -> float:
    return (start + 1.0 / rho) * math.exp(rho * elapsed) - 1.0 / rho


def lambda_eq(params: ModelParams) -> float:
    """Initial costate of the unique bounded solution.

    The unit-period formula is applied in rescaled time s = t/T, where the
    rates become rho_i*T and the switch moves to t_s/T.  In s-time the adjoint
    equation reads d(lambda)/ds = (rho T) lambda + T, so the bounded solution
    in t-time is T times the unit-period one.
    """
    T = params.T
    return T * unit_period_lambda_eq(params.rho1 * T, params.rho2 * T, params.t_s / T)


@dataclass(frozen=True)
class CostateSolution:
    params: ModelParams
    lambda_eq: float
    lambda_switch: float

    @classmethod
    def from_params(cls, params: ModelParams) -> CostateSolution:
        leq = lambda_eq(params)
        lsw = _segment_value(leq, params.rho1, params.t_s)
        return cls(params, leq, lsw)

    def __call__(self, t):
        return lambda_at(self, t)


def solve_costate(params: ModelParams) -> CostateSolution:
    return CostateSolution.from_params(params)


def lambda_at(sol: CostateSolution, t):
    """Evaluate the periodic costate at ``t`` (scalar or array).

    Time is reduced modulo T first, so exponents never exceed max(rho)*T.
    """
    p = sol.params
    tau = np.mod(np.asarray(t, dtype=float), p.T)
    first = tau < p.t_s
    out = np.where(
        first,
        (sol.lambda_eq + 1.0 / p.rho1) * np.exp(p.rho1 * np.where(first, tau, 0.0)) - 1.0 / p.rho1,
        (sol.lambda_switch + 1.0 / p.rho2) * np.exp(p.rho2 * np.where(first, 0.0, tau - p.t_s))
        - 1.0 / p.rho2,
    )
    return float(out) if out.ndim == 0 else out


def lambda_extrema(sol: CostateSolution) -> tuple[float, float]:
    """(min, max) of the costate; it is monotone on each segment."""
    a, b = sol.lambda_eq, sol.lambda_switch
    return min(a, b), max(a, b)


def propagate_costate(params: ModelParams, lambda0: float, periods: int) -> np.ndarray:
    """Costate values at period starts when started from an arbitrary ``lambda0``.

    Only the anchor ``lambda_eq`` stays bounded; any other start drifts away
    geometrically.
    """
    values = [lambda0]
    lam = lambda0
    for _ in range(periods):
        lam = _segment_value(lam, params.rho1, params.t_s)
        lam = _segment_value(lam, params.rho2, params.T - params.t_s)
        values.append(lam)
    return np.array(values)


def switch_crossings(sol: CostateSolution, level: float) -> list[float]:
    """Times in [0, T) at which the costate crosses ``level`` transversally."""
    p = sol.params
    out = []
    for start, lam0, rho, length in (
        (0.0, sol.lambda_eq, p.rho1, p.t_s),
        (p.t_s, sol.lambda_switch, p.rho2, p.T - p.t_s),
    ):
        c = lam0 + 1.0 / rho
        ratio = (level + 1.0 / rho) / c if c != 0 else -1.0
        if ratio > 0:
            s = math.log(ratio) / rho
            if 0 < s < length:
                out.append(start + s)
    return sorted(out)
