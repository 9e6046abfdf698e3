"""State types and right-hand sides of the divergence/density dynamics.

Two ODE systems live here.  The primary system tracks ``(rho, d)`` -- density
and velocity divergence along a flow characteristic -- driven by a
time-dependent coefficient ``A(t)`` and a forcing constant ``k`` with
background density ``c_b``::

    d'   = -1/2 d^2 + A(t) rho^2 + k (rho - c_b)
    rho' = -rho d

The auxiliary system tracks ``(a, b, B)`` and is the normalized comparison
system (forcing sign -1, unit background) with the exponential coefficient
promoted to a third state variable::

    b' = -1/2 b^2 - B a^2 - a + 1
    a' = -b a
    B' = B

All types are immutable value objects; right-hand-side evaluation is pure and
safe to call from any number of concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .coefficients import CoefficientModel, eval_A
from .errors import InvalidStateError, NonVacuumError

__all__ = [
    "PhysicalParams",
    "State2",
    "FlowInvariants",
    "AuxState3",
    "Deriv2",
    "Deriv3",
    "eval_rhs_ep",
    "eval_rhs_aux",
    "gamma_upper_bound",
    "eval_A0",
    "System",
    "ep_system",
    "aux_system",
]


def _require_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise InvalidStateError(f"{name} has non-finite component {v!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Forcing sign/strength ``k`` (attractive for k < 0) and background ``c_b``."""

    k: float = -1.0
    c_b: float = 1.0

    def __post_init__(self):
        _require_finite("PhysicalParams", self.k, self.c_b)
        if self.k == 0.0:
            raise ValueError("forcing constant k must be nonzero")
        if self.c_b < 0.0:
            raise ValueError("background density c_b must be >= 0")


@dataclass(frozen=True)
class State2:
    """Phase point ``(rho, d)`` along a characteristic; ``rho >= 0``."""

    rho: float
    d: float

    def __post_init__(self):
        _require_finite("State2", self.rho, self.d)
        if self.rho < 0.0:
            raise InvalidStateError(f"density must be >= 0, got rho={self.rho}")

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.d], dtype=float)


@dataclass(frozen=True)
class FlowInvariants:
    """Initial characteristic data ``(rho0, omega0, eta0, xi0)``.

    ``omega0`` is the initial vorticity; ``eta0`` and ``xi0`` are the
    deviatoric velocity-gradient combinations.  The non-vacuum condition
    ``rho0 > 0`` is enforced at construction.
    """

    rho0: float
    omega0: float = 0.0
    eta0: float = 0.0
    xi0: float = 0.0

    def __post_init__(self):
        _require_finite("FlowInvariants", self.rho0, self.omega0, self.eta0, self.xi0)
        if not self.rho0 > 0.0:
            raise NonVacuumError(f"initial density must be > 0, got rho0={self.rho0}")


@dataclass(frozen=True)
class AuxState3:
    """Auxiliary phase point ``(a, b, B)`` with ``a > 0`` and ``B >= 1``."""

    a: float
    b: float
    B: float = 1.0

    def __post_init__(self):
        _require_finite("AuxState3", self.a, self.b, self.B)
        if not self.a > 0.0:
            raise InvalidStateError(f"auxiliary density must be > 0, got a={self.a}")
        if not self.B >= 1.0:
            raise InvalidStateError(f"exponential coefficient must be >= 1, got B={self.B}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.B], dtype=float)


class Deriv2(NamedTuple):
    rho_dot: float
    d_dot: float


class Deriv3(NamedTuple):
    a_dot: float
    b_dot: float
    B_dot: float


def eval_rhs_ep(s: State2, t: float, A: CoefficientModel, p: PhysicalParams) -> Deriv2:
    """Right-hand side of the primary ``(rho, d)`` system at time ``t``.

    Raises :class:`CoefficientDomainError` if ``A`` is not evaluable at ``t``
    and :class:`InvalidStateError` for non-finite states.
    """
    _require_finite("State2", s.rho, s.d)
    a_val = eval_A(A, t)
    d_dot = -0.5 * s.d * s.d + a_val * s.rho * s.rho + p.k * (s.rho - p.c_b)
    return Deriv2(rho_dot=-s.rho * s.d, d_dot=d_dot)


def eval_rhs_aux(s: AuxState3) -> Deriv3:
    """Right-hand side of the autonomous auxiliary ``(a, b, B)`` system."""
    _require_finite("AuxState3", s.a, s.b, s.B)
    b_dot = -0.5 * s.b * s.b - s.B * s.a * s.a - s.a + 1.0
    return Deriv3(a_dot=-s.b * s.a, b_dot=b_dot, B_dot=s.B)


def gamma_upper_bound(inv: FlowInvariants) -> float:
    """Uniform upper bound ``(1/2) (omega0 / rho0)^2`` on the coefficient."""
    r = inv.omega0 / inv.rho0
    return 0.5 * r * r


def eval_A0(inv: FlowInvariants) -> float:
    """Initial coefficient value from the characteristic data.

    ``A(0) = 1/2 [(omega0/rho0)^2 - (eta0/rho0)^2 - (xi0/rho0)^2]``; always
    bounded by :func:`gamma_upper_bound`.
    """
    w = inv.omega0 / inv.rho0
    e = inv.eta0 / inv.rho0
    x = inv.xi0 / inv.rho0
    return 0.5 * (w * w - e * e - x * x)


@dataclass(frozen=True)
class System:
    """Vectorized ODE system consumed by the integrator.

    ``rhs(t, Y)`` maps a time vector of shape (m,) and states of shape (m, dim)
    to derivatives of shape (m, dim).  ``domain_end`` caps integration when the
    driving coefficient has a bounded time domain.
    """

    rhs: callable
    dim: int
    domain_end: float = math.inf
    name: str = ""


def ep_system(A: CoefficientModel, p: PhysicalParams) -> System:
    """Batched right-hand side for the primary system; columns are (rho, d)."""

    def rhs(t, Y):
        rho = Y[..., 0]
        d = Y[..., 1]
        a_val = A.values(t)
        out = np.empty_like(Y)
        out[..., 0] = -rho * d
        out[..., 1] = -0.5 * d * d + a_val * rho * rho + p.k * (rho - p.c_b)
        return out

    return System(rhs=rhs, dim=2, domain_end=A.domain_end(), name="ep")


def aux_system() -> System:
    """Batched right-hand side for the auxiliary system; columns are (a, b, B)."""

    def rhs(t, Y):
        a = Y[..., 0]
        b = Y[..., 1]
        big_b = Y[..., 2]
        out = np.empty_like(Y)
        out[..., 0] = -b * a
        out[..., 1] = -0.5 * b * b - big_b * a * a - a + 1.0
        out[..., 2] = big_b
        return out

    return System(rhs=rhs, dim=3, name="aux")
