"""Deformation parameter, truncation policy and evaluation records."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DomainError

#: Largest q accepted at construction; runtime grows like 1/|log q|.
Q_MAX = 0.9999
#: Above this q evaluations carry the SlowConvergence flag.
Q_SLOW = 0.999


class Flag(enum.Enum):
    NEAR_POLE = "NearPole"
    SLOW_CONVERGENCE = "SlowConvergence"
    CANCELLATION_RISK = "CancellationRisk"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class QParam:
    """The base ``q`` in (0, 1) together with its cached natural logarithm."""

    value: float
    log_value: float = field(init=False, repr=False)

    def __post_init__(self):
        v = float(self.value)
        if not (0.0 < v < 1.0) or math.isnan(v):
            raise DomainError(f"q must lie in (0, 1), got {self.value!r}")
        if v > Q_MAX:
            raise DomainError(f"q={v!r} exceeds the supported maximum {Q_MAX}")
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "log_value", math.log(v))

    @property
    def slow(self) -> bool:
        return self.value > Q_SLOW

    def __float__(self) -> float:
        return self.value


def as_q(q: QParam | float) -> QParam:
    return q if isinstance(q, QParam) else QParam(q)


@dataclass(frozen=True)
class TruncationPolicy:
    """How infinite series and products are cut off.

    A series stops once ``stop_run`` consecutive terms leave a geometric tail
    bound below ``rel_tol`` times the running value. ``pole_eps`` is the
    exclusion radius around the poles of Gamma_q and psi_q.
    """

    rel_tol: float = 1e-14
    max_terms: int = 10**7
    stop_run: int = 3
    pole_eps: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if self.stop_run < 1:
            raise DomainError("stop_run must be >= 1")
        if not self.pole_eps > 0.0:
            raise DomainError("pole_eps must be positive")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class Evaluation:
    """A computed value with its truncation-error estimate."""

    value: float
    est_error: float = 0.0
    terms_used: int = 0
    flags: frozenset[Flag] = frozenset()

    def __post_init__(self):
        if not self.est_error >= 0.0:
            raise ValueError(f"est_error must be >= 0, got {self.est_error!r}")

    def __float__(self) -> float:
        return self.value

    def flag_names(self) -> list[str]:
        return sorted(f.value for f in self.flags)
