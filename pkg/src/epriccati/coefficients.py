"""Models for the time-dependent coefficient multiplying the quadratic density term.

The closed divergence/density ODE system carries a scalar coefficient ``A(t)``
in front of ``rho**2``.  Its decay rate decides whether trajectories can be
certified as global, so the toolkit treats the coefficient as a first-class
object with a small set of interchangeable model variants:

* :class:`ConstantCoefficient` -- ``A(t) = value``; the constant-coefficient
  reduction used by local/restricted models.
* :class:`ExponentialEnvelope` -- ``A(t) = -alpha * exp(beta * t)``; the
  decaying envelope that the certification machinery assumes as a lower bound.
* :class:`TabulatedCoefficient` -- piecewise-linear interpolation of samples,
  e.g. a coefficient reconstructed from a PDE run.  Extrapolation is an error,
  never silent.
* :class:`CallbackCoefficient` -- a user-supplied function of time.

All variants support an optional keyword-only ``upper_clamp``: evaluated
values never exceed it.  Models are immutable and safe to share across
threads; callback functions must be stateless or synchronized by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CoefficientDomainError

__all__ = [
    "CoefficientModel",
    "ConstantCoefficient",
    "ExponentialEnvelope",
    "TabulatedCoefficient",
    "CallbackCoefficient",
    "eval_A",
]


@dataclass(frozen=True)
class CoefficientModel:
    """Base class: a scalar function of time with an optional upper clamp."""

    upper_clamp: float | None = field(default=None, kw_only=True)

    def _raw(self, t):
        raise NotImplementedError

    def domain_end(self) -> float:
        """Largest time at which the model is evaluable (``inf`` if unbounded)."""
        return math.inf

    def value(self, t: float) -> float:
        """Evaluate at a single time ``t >= 0``."""
        if not (t >= 0.0):
            raise ValueError(f"coefficient queried at negative time t={t}")
        v = float(self._raw(float(t)))
        if self.upper_clamp is not None:
            v = min(v, self.upper_clamp)
        return v

    def values(self, t: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; same clamping rule as :meth:`value`."""
        t = np.asarray(t, dtype=float)
        v = np.asarray(self._raw(t), dtype=float)
        if self.upper_clamp is not None:
            v = np.minimum(v, self.upper_clamp)
        return v


@dataclass(frozen=True)
class ConstantCoefficient(CoefficientModel):
    value_const: float = 0.0

    def _raw(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.value_const)


@dataclass(frozen=True)
class ExponentialEnvelope(CoefficientModel):
    """``A(t) = -alpha * exp(beta * t)`` with ``alpha, beta > 0``."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("ExponentialEnvelope requires alpha > 0 and beta > 0")

    def _raw(self, t):
        return -self.alpha * np.exp(self.beta * t)


@dataclass(frozen=True)
class TabulatedCoefficient(CoefficientModel):
    """Piecewise-linear interpolation of ``(times, values)`` samples.

    Queries outside ``[times[0], times[-1]]`` raise
    :class:`~epriccati.errors.CoefficientDomainError`.  Linear interpolation
    preserves monotone envelopes checked at the knots.
    """

    times: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))
    values_table: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0]))

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        vals = np.asarray(self.values_table, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("TabulatedCoefficient needs at least two sample times")
        if times.shape != vals.shape:
            raise ValueError("times and values must have matching shapes")
        if not np.all(np.diff(times) > 0):
            raise ValueError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(vals))):
            raise ValueError("tabulated samples must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values_table", vals)

    def domain_end(self) -> float:
        return float(self.times[-1])

    def _raw(self, t):
        lo, hi = self.times[0], self.times[-1]
        if np.any(t < lo) or np.any(t > hi):
            raise CoefficientDomainError(
                f"tabulated coefficient queried outside [{lo}, {hi}]"
            )
        return np.interp(t, self.times, self.values_table)


@dataclass(frozen=True)
class CallbackCoefficient(CoefficientModel):
    """Black-box time function.  ``fn`` must accept floats and float arrays."""

    fn: Callable | None = None

    def __post_init__(self):
        if not callable(self.fn):
            raise ValueError("CallbackCoefficient requires a callable")

    def _raw(self, t):
        return self.fn(t)


def eval_A(model: CoefficientModel, t: float) -> float:
    """Evaluate a coefficient model at time ``t`` (clamped if configured)."""
    return model.value(t)
