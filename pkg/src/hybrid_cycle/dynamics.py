"""State integration under a feedback law, discounted payoff, and the exact flow map."""

from __future__ import annotations

import functools
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TextIO

import numpy as np
from scipy.integrate import quad

from .control import ControlLaw, LawKind, optimal_control
from .costate import CostateSolution, lambda_at, solve_costate, switch_crossings
from .model import ModelParams, ValidationError, segment_boundaries

Law = Callable[[float, float, float], float]

TRAJECTORY_COLUMNS = ("t", "x", "u", "lambda", "L", "J")


class UnsupportedLawError(ValueError):
    """The requested operation is only defined for the optimal law."""


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-3
    horizon: float = 20.0

    def __post_init__(self) -> None:
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValidationError("step", "must be strictly positive")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValidationError("horizon", "must be strictly positive")

    def check(self, params: ModelParams) -> None:
        limit = min(params.t_s, params.T - params.t_s) / 4.0
        if self.step > limit:
            raise ValidationError(
                "step", f"{self.step} exceeds a quarter of the shortest regime segment ({limit})"
            )


@dataclass
class Trajectory:
    times: np.ndarray
    x: np.ndarray
    lam: np.ndarray
    u: np.ndarray
    L: np.ndarray
    J: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "t": self.times,
            "x": self.x,
            "u": self.u,
            "lambda": self.lam,
            "L": self.L,
            "J": self.J,
        }

    def write_csv(self, dest: str | Path | TextIO) -> None:
        write_table(dest, self.columns())

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def read_csv(cls, src: str | Path | TextIO) -> Trajectory:
        cols = read_table(src)
        if tuple(cols) != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header {tuple(cols)}")
        return cls(cols["t"], cols["x"], cols["lambda"], cols["u"], cols["L"], cols["J"])

    def to_json(self) -> dict[str, list[float]]:
        return {k: v.tolist() for k, v in self.columns().items()}


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_table(dest: str | Path | TextIO, columns: dict[str, np.ndarray]) -> None:
    """Write equal-length columns as CSV with 17 significant digits."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write_table(fh, columns)
        return
    names = list(columns)
    dest.write(",".join(names) + "\n")
    arrays = [np.asarray(columns[n]) for n in names]
    for row in zip(*arrays):
        dest.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return format_float(v)


def read_table(src: str | Path | TextIO) -> dict[str, np.ndarray]:
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8", newline="") as fh:
            return read_table(fh)
    header = src.readline().strip().split(",")
    rows = [line.strip().split(",") for line in src if line.strip()]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def _check_law_beta(params: ModelParams, law: Law) -> None:
    if isinstance(law, ControlLaw) and law.beta != params.beta:
        raise ValidationError("beta", f"law beta {law.beta} differs from model beta {params.beta}")


def integrate(
    params: ModelParams,
    law: Law,
    cfg: IntegratorConfig,
    x0: float | None = None,
) -> Trajectory:
    """Classic RK4 on x' = beta*u - delta(t)*x with steps aligned to every regime switch.

    Each regime segment is split into equal steps no longer than
    ``cfg.step``, so delta is constant within a step.  Kinks of the optimal
    control (where lambda crosses -1/beta) are not located.
    """
    cfg.check(params)
    _check_law_beta(params, law)
    sol = solve_costate(params)
    beta = params.beta
    x = params.x0 if x0 is None else float(x0)
    if x < 0:
        raise ValidationError("x0", "must be nonnegative")

    bounds = segment_boundaries(params.schedule, cfg.horizon)
    t_parts = [np.array([0.0])]
    x_parts = [np.array([x])]
    for (a, regime), (b, _) in zip(bounds[:-1], bounds[1:]):
        b = min(b, cfg.horizon)
        if b <= a:
            break
        delta = params.delta1 if regime == 1 else params.delta2
        n = max(1, math.ceil((b - a) / cfg.step - 1e-9))
        h = (b - a) / n
        ts = a + h * np.arange(n + 1)
        ts[-1] = b
        lam_nodes = lambda_at(sol, ts)
        lam_mid = lambda_at(sol, ts[:-1] + 0.5 * h)
        xs = np.empty(n)
        for i in range(n):
            t = ts[i]
            tm = t + 0.5 * h
            k1 = beta * law(t, x, lam_nodes[i]) - delta * x
            x2 = x + 0.5 * h * k1
            k2 = beta * law(tm, x2, lam_mid[i]) - delta * x2
            x3 = x + 0.5 * h * k2
            k3 = beta * law(tm, x3, lam_mid[i]) - delta * x3
            x4 = x + h * k3
            k4 = beta * law(ts[i + 1], x4, lam_nodes[i + 1]) - delta * x4
            x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if x < 0.0:
                x = 0.0
            xs[i] = x
        t_parts.append(ts[1:])
        x_parts.append(xs)

    times = np.concatenate(t_parts)
    xs = np.concatenate(x_parts)
    lam = lambda_at(sol, times)
    u = np.array([law(t, xi, li) for t, xi, li in zip(times, xs, lam)])
    L = u * (1.0 - 0.5 * u) - xs
    J = cumulative_discounted(times, L, params.r)
    return Trajectory(times, xs, lam, u, L, J)


def cumulative_discounted(times: np.ndarray, L: np.ndarray, r: float) -> np.ndarray:
    """Running trapezoidal integral of e^{-rt} L(t)."""
    g = np.exp(-r * times) * L
    J = np.zeros_like(g)
    J[1:] = np.cumsum(0.5 * np.diff(times) * (g[1:] + g[:-1]))
    return J


def payoff_at(traj: Trajectory, t: float) -> float:
    """Cumulative discounted payoff at ``t``, linearly interpolated."""
    if not traj.times[0] <= t <= traj.times[-1]:
        raise OutOfRangeError(f"t={t} outside [{traj.times[0]}, {traj.times[-1]}]")
    return float(np.interp(t, traj.times, traj.J))


def tail_bound(params: ModelParams, horizon: float) -> float:
    """Bound on the payoff neglected beyond ``horizon``.

    |L| <= max(1/2, x_max) with x_max = max(x0, beta/delta_min) for any
    control in [0, 1].
    """
    sup_l = max(0.5, params.x0, params.state_bound)
    return math.exp(-params.r * horizon) * sup_l / params.r


# --- exact flow map for the optimal law -------------------------------------


def _require_optimal(params: ModelParams, law: Law) -> None:
    if not (isinstance(law, ControlLaw) and law.kind is LawKind.OPTIMAL):
        raise UnsupportedLawError("the flow map is only available for the optimal law")
    _check_law_beta(params, law)


def _forced_response(sol: CostateSolution, beta: float, delta: float, a: float, b: float) -> float:
    """int_a^b beta u*(tau) e^{-delta (b - tau)} dtau for 0 <= a <= b <= T in one regime."""
    if b <= a:
        return 0.0
    kinks = [c for c in switch_crossings(sol, -1.0 / beta) if a < c < b]

    def integrand(tau: float) -> float:
        return beta * optimal_control(lambda_at(sol, tau), beta) * math.exp(-delta * (b - tau))

    val, _ = quad(integrand, a, b, points=kinks or None, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


@functools.lru_cache(maxsize=256)
def _period_data(params: ModelParams) -> tuple[float, float]:
    """(slope, intercept) of the one-period map x -> phi(T, x)."""
    slope = math.exp(-params.decay_per_period)
    return slope, _advance_in_period(params, 0.0, 0.0, params.T)


def _advance_in_period(params: ModelParams, x: float, s0: float, s1: float) -> float:
    """Exact optimal-law state transfer from phase s0 to s1, 0 <= s0 <= s1 <= T."""
    sol = solve_costate(params)
    ts = params.t_s
    pieces = []
    if s0 < ts:
        pieces.append((s0, min(s1, ts), params.delta1))
    if s1 > ts:
        pieces.append((max(s0, ts), s1, params.delta2))
    for a, b, delta in pieces:
        x = x * math.exp(-delta * (b - a)) + _forced_response(sol, params.beta, delta, a, b)
    return x


def flow_map(params: ModelParams, law: Law, x0: float, t: float) -> float:
    """phi(t, x0) = x0 e^{-int_0^t delta} + f(t) under the optimal law.

    Whole periods are applied through the affine period map in closed form;
    the remaining fraction of a period is integrated by adaptive quadrature.
    """
    _require_optimal(params, law)
    if x0 < 0:
        raise ValidationError("x0", "must be nonnegative")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    slope, intercept = _period_data(params)
    m = math.floor(t / params.T)
    rem = t - m * params.T
    if rem < 0:
        m, rem = m - 1, rem + params.T
    elif rem >= params.T:
        m, rem = m + 1, rem - params.T
    dm = slope**m
    x = dm * x0 + intercept * (1.0 - dm) / (1.0 - slope)
    return _advance_in_period(params, x, 0.0, rem)


def decay_factor(params: ModelParams, t: float) -> float:
    """e^{-int_0^t delta(s) ds}, evaluated segment by segment."""
    m = math.floor(t / params.T)
    rem = t - m * params.T
    integral = m * params.decay_per_period
    integral += params.delta1 * min(rem, params.t_s) + params.delta2 * max(rem - params.t_s, 0.0)
    return math.exp(-integral)
