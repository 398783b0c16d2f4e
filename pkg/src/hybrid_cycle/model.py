"""Problem data, normalization and the periodic self-cleaning schedule.

The raw pollution problem maximizes the discounted net profit

    int_0^inf e^{-rt} [a v (b - v/2) - q z] dt,   z' = xi v - delta(t) z,

with emission rate v in [0, b].  Substituting u = v/b and x = q z/(a b^2)
gives the dimensionless problem

    int_0^inf e^{-rt} [u (1 - u/2) - x] dt,   x' = beta u - delta(t) x,

with beta = xi q/(a b).  The rate delta(t) takes the value delta1 on
[kT, kT + t_s) and delta2 on [kT + t_s, (k+1)T).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping


class ValidationError(ValueError):
    """Raised when problem data violates its invariants."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ValidationError(name, message)


def _finite(name: str, value: float) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a number, got {value!r}") from None
    _require(math.isfinite(v), name, f"must be finite, got {v}")
    return v


@dataclass(frozen=True)
class RawParams:
    """Unnormalized problem data."""

    a: float
    b: float
    q: float
    xi: float
    delta1: float
    delta2: float
    r: float
    z0: float = 0.0
    alpha: float = 0.5
    T: float = 1.0

    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, _finite(f.name, getattr(self, f.name)))
        for name in ("a", "b", "q", "delta1", "delta2", "r", "T"):
            _require(getattr(self, name) > 0, name, "must be strictly positive")
        _require(0 < self.xi < 1, "xi", "must lie in (0, 1)")
        _require(0 < self.alpha < 1, "alpha", "must lie in (0, 1)")
        _require(self.z0 >= 0, "z0", "must be nonnegative")
        _require(self.delta1 != self.delta2, "delta2", "delta1 == delta2 is excluded (single regime)")


@dataclass(frozen=True)
class ModelParams:
    """Normalized problem data; ``rho1`` and ``rho2`` are derived."""

    beta: float
    delta1: float
    delta2: float
    r: float
    t_s: float
    T: float = 1.0
    x0: float = 0.0
    rho1: float = field(init=False)
    rho2: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("beta", "delta1", "delta2", "r", "t_s", "T", "x0"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        for name in ("beta", "delta1", "delta2", "r", "T"):
            _require(getattr(self, name) > 0, name, "must be strictly positive")
        _require(0 < self.t_s < self.T, "t_s", f"must lie in (0, T={self.T})")
        _require(self.x0 >= 0, "x0", "must be nonnegative")
        _require(self.delta1 != self.delta2, "delta2", "delta1 == delta2 is excluded (single regime)")
        object.__setattr__(self, "rho1", self.r + self.delta1)
        object.__setattr__(self, "rho2", self.r + self.delta2)

    @property
    def delta_min(self) -> float:
        return min(self.delta1, self.delta2)

    @property
    def schedule(self) -> RegimeSchedule:
        return RegimeSchedule(self.t_s, self.T, self.delta1, self.delta2)

    @property
    def decay_per_period(self) -> float:
        """Integral of delta(t) over one period."""
        return self.delta1 * self.t_s + self.delta2 * (self.T - self.t_s)

    @property
    def state_bound(self) -> float:
        """Upper bound beta/delta_min that the state cannot cross upward."""
        return self.beta / self.delta_min

    def replace(self, **changes: float) -> ModelParams:
        values = {k: getattr(self, k) for k in ("beta", "delta1", "delta2", "r", "t_s", "T", "x0")}
        values.update(changes)
        return ModelParams(**values)

    def to_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class RegimeSchedule:
    t_s: float
    T: float
    delta1: float
    delta2: float

    def regime(self, t: float) -> int:
        """Regime index (1 or 2) active at time ``t``."""
        return 1 if math.fmod(t, self.T) < self.t_s else 2

    def delta_at(self, t: float) -> float:
        return self.delta1 if self.regime(t) == 1 else self.delta2


def normalize(raw: RawParams) -> ModelParams:
    """Map raw problem data to the dimensionless problem."""
    return ModelParams(
        beta=raw.xi * raw.q / (raw.a * raw.b),
        delta1=raw.delta1,
        delta2=raw.delta2,
        r=raw.r,
        t_s=raw.alpha * raw.T,
        T=raw.T,
        x0=raw.q * raw.z0 / (raw.a * raw.b**2),
    )


def delta_at(schedule: RegimeSchedule, t: float) -> float:
    """Self-cleaning rate at time ``t``; a switch instant belongs to the regime it starts."""
    return schedule.delta_at(t)


def segment_boundaries(schedule: RegimeSchedule, horizon: float) -> list[tuple[float, int]]:
    """Regime boundaries ``(time, regime)`` up to the first one at or beyond ``horizon``.

    Times are built as ``k*T`` and ``k*T + t_s`` rather than by accumulation,
    so they do not drift over long horizons.
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    out: list[tuple[float, int]] = []
    k = 0
    while True:
        start = k * schedule.T
        for t, regime in ((start, 1), (start + schedule.t_s, 2)):
            out.append((t, regime))
            if t >= horizon:
                return out
        k += 1


_RAW_KEYS = {f.name for f in fields(RawParams)}
_NORMALIZED_KEYS = {"beta", "delta1", "delta2", "r", "t_s", "T", "x0"}


def params_from_mapping(doc: Mapping[str, Any]) -> ModelParams:
    """Build normalized parameters from a config document.

    The document holds exactly one of a ``raw`` block (fields of
    :class:`RawParams`) or a ``normalized`` block (fields of
    :class:`ModelParams`).
    """
    has_raw = doc.get("raw") is not None
    has_norm = doc.get("normalized") is not None
    if has_raw == has_norm:
        raise ValidationError("config", "exactly one of 'raw' or 'normalized' is required")
    if has_raw:
        block, allowed = doc["raw"], _RAW_KEYS
    else:
        block, allowed = doc["normalized"], _NORMALIZED_KEYS
    unknown = set(block) - allowed
    if unknown:
        raise ValidationError(sorted(unknown)[0], "unknown parameter")
    try:
        if has_raw:
            return normalize(RawParams(**block))
        return ModelParams(**block)
    except TypeError as exc:
        raise ValidationError("config", str(exc)) from None


def raw_from_mapping(doc: Mapping[str, Any]) -> RawParams | None:
    block = doc.get("raw")
    return None if block is None else RawParams(**block)


def load_config(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValidationError("config", "top-level JSON value must be an object")
    return doc
