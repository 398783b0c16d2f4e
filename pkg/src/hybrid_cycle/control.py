"""Feedback laws: the saturated optimal control and the myopic (liquidity-constrained) one."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class LawKind(str, enum.Enum):
    OPTIMAL = "optimal"
    MYOPIC = "myopic"


def optimal_control(lam: float, beta: float) -> float:
    """Maximizer of the Hamiltonian: 1 + beta*lambda clipped to [0, 1]."""
    if lam > 0:
        return 1.0
    if lam < -1.0 / beta:
        return 0.0
    return 1.0 + beta * lam


def myopic_control(lam: float, x: float, beta: float) -> float:
    """Optimal control raised just enough to keep the instantaneous profit nonnegative.

    For x > 1/2 no admissible control yields a nonnegative profit and the
    law saturates at 1.
    """
    if lam > 0 or x > 0.5:
        return 1.0
    # roundoff near x = 1/2 must not produce a negative radicand
    root = math.sqrt(min(max(1.0 - 2.0 * x, 0.0), 1.0))
    if -beta * lam >= root:
        return 1.0 - root
    return 1.0 + beta * lam


def instantaneous_profit(u: float, x: float) -> float:
    return u * (1.0 - 0.5 * u) - x


@dataclass(frozen=True)
class ControlLaw:
    """A feedback law ``u = law(t, x, lam)``.

    Any callable with this signature can be handed to the integrator; the
    ``state_dependent`` attribute tells it whether u may depend on x.
    """

    kind: LawKind
    beta: float

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "kind", LawKind(self.kind))

    @property
    def state_dependent(self) -> bool:
        return self.kind is LawKind.MYOPIC

    def __call__(self, t: float, x: float, lam: float) -> float:
        if self.kind is LawKind.OPTIMAL:
            return optimal_control(lam, self.beta)
        return myopic_control(lam, x, self.beta)


def optimal_law(beta: float) -> ControlLaw:
    return ControlLaw(LawKind.OPTIMAL, beta)


def myopic_law(beta: float) -> ControlLaw:
    return ControlLaw(LawKind.MYOPIC, beta)
