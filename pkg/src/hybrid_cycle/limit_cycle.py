"""Hybrid limit cycle of the optimal policy via the one-period map S(x) = phi(T, x)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .control import optimal_control, optimal_law
from .costate import lambda_at, solve_costate
from .dynamics import _advance_in_period, flow_map, write_table
from .model import ModelParams

FIXED_POINT_TOL = 1e-12
MAX_ITERATIONS = 200


class ConvergenceError(RuntimeError):
    """The fixed-point iteration did not settle."""


@dataclass
class LimitCycle:
    x_eq: float
    lambda_eq: float
    times: np.ndarray
    x_h: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    residual: float
    contraction_rate: float
    iterations: int = 0

    def columns(self) -> dict[str, np.ndarray]:
        return {"t": self.times, "x_h": self.x_h, "u": self.u, "lambda": self.lam}

    def sidecar(self) -> dict[str, float]:
        return {
            "x_eq": self.x_eq,
            "lambda_eq": self.lambda_eq,
            "residual": self.residual,
            "contraction_rate": self.contraction_rate,
        }

    def write(self, csv_path: str | Path, json_path: str | Path | None = None) -> Path:
        """Write the sampled period as CSV and the scalars as a JSON sidecar."""
        csv_path = Path(csv_path)
        write_table(csv_path, self.columns())
        json_path = Path(json_path) if json_path is not None else csv_path.with_suffix(".json")
        json_path.write_text(_dump_json(self.sidecar()), encoding="utf-8")
        return json_path


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def poincare_map(params: ModelParams, x: float) -> float:
    return flow_map(params, optimal_law(params.beta), x, params.T)


def find_x_eq(params: ModelParams, samples: int = 1001, x_start: float = 0.0) -> LimitCycle:
    """Fixed point of the period map and one sampled period of the cycle.

    S is affine with slope e^{-int_0^T delta}, so slope and intercept are read
    off two evaluations and the fixed point solved directly; plain iteration
    from there confirms it.
    """
    s0 = poincare_map(params, x_start)
    s1 = poincare_map(params, x_start + 1.0)
    slope = s1 - s0
    x = (s0 - slope * x_start) / (1.0 - slope)
    for it in range(1, MAX_ITERATIONS + 1):
        nxt = poincare_map(params, x)
        if abs(nxt - x) < FIXED_POINT_TOL:
            x = nxt
            break
        x = nxt
    else:
        raise ConvergenceError(
            f"period map did not settle within {MAX_ITERATIONS} iterations (last gap {abs(nxt - x):.3e})"
        )
    residual = abs(poincare_map(params, x) - x)
    times, xs = _sample_period(params, x, samples)
    sol = solve_costate(params)
    lam = lambda_at(sol, times)
    u = np.array([optimal_control(v, params.beta) for v in lam])
    return LimitCycle(
        x_eq=x,
        lambda_eq=sol.lambda_eq,
        times=times,
        x_h=xs,
        u=u,
        lam=lam,
        residual=residual,
        contraction_rate=math.exp(-params.decay_per_period),
        iterations=it,
    )


def _sample_period(params: ModelParams, x_eq: float, samples: int) -> tuple[np.ndarray, np.ndarray]:
    times = np.linspace(0.0, params.T, samples)
    xs = np.empty(samples)
    xs[0] = x = x_eq
    for i in range(1, samples):
        x = _advance_in_period(params, x, times[i - 1], times[i])
        xs[i] = x
    return times, xs


def convergence_envelope(params: ModelParams, x0: float, k_max: int) -> list[tuple[int, float]]:
    """Distance to the cycle at the first ``k_max`` period starts."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    cycle = find_x_eq(params, samples=2)
    law = optimal_law(params.beta)
    return [(k, abs(flow_map(params, law, x0, k * params.T) - cycle.x_eq)) for k in range(1, k_max + 1)]


def contraction_bound(params: ModelParams, k: int = 1) -> float:
    """The looser uniform rate e^{-delta_min k T}."""
    return math.exp(-params.delta_min * k * params.T)

