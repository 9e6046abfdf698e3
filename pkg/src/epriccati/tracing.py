"""Characteristic tracing through a stored spectral run.

A tracer follows ``dx/dt = u(t, x)`` through the field history of a completed
run, sampling the local density, the velocity-gradient invariants (divergence,
vorticity, the two deviatoric combinations), the two force kernels, and the
reconstructed coefficient ``A(t)``.

Numerics: positions advance with classical RK4 between consecutive history
frames, with the velocity at intermediate times given by 4-point Lagrange
interpolation over neighboring frames (4th order in time overall) and
trigonometric interpolation in space.  The coefficient is reconstructed from
the sampled kernels by cumulative trapezoidal quadrature of ``f_i / rho``::

    A(t) = 1/2 [ (omega0/rho0)^2 - (eta0/rho0 + I1(t))^2 - (xi0/rho0 + I2(t))^2 ]

with ``I_i(t)`` the running integrals; vorticity itself is not integrated
because ``omega / rho`` is conserved along characteristics.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, NonVacuumError
from .simulate import PdeRunResult
from .spectral import Grid, eval_point

__all__ = ["TracerSeries", "trace_characteristic"]


@dataclass
class TracerSeries:
    """Samples along one characteristic; times strictly increasing."""

    t: np.ndarray
    x: np.ndarray  # (n, 2) positions
    rho: np.ndarray
    d: np.ndarray
    omega: np.ndarray
    eta: np.ndarray
    xi: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    A: np.ndarray
    status: str = "complete"


class _FrameSpectra:
    """Full fft2 spectra of the sampled fields for one history frame, built lazily."""

    __slots__ = ("names", "spectra")

    def __init__(self, frame, grid: Grid, k: float):
        rhat = np.fft.fft2(frame.rho)
        u1hat = np.fft.fft2(frame.u[0])
        u2hat = np.fft.fft2(frame.u[1])
        kx, ky = grid._kx_grad_full, grid._ky_grad_full  # Nyquist-zeroed derivatives
        rx, ry = grid._kx_full, grid._ky_full  # true wavenumbers for the even kernels
        ghat = rhat.copy()
        ghat[0, 0] = 0.0
        k2 = grid._k2_full_guarded
        self.spectra = {
            "rho": rhat,
            "u1": u1hat,
            "u2": u2hat,
            "d": 1j * (kx * u1hat + ky * u2hat),
            "omega": 1j * (kx * u2hat - ky * u1hat),
            "eta": 1j * (kx * u1hat - ky * u2hat),
            "xi": 1j * (ky * u1hat + kx * u2hat),
            "f1": k * (rx**2 - ry**2) / k2 * ghat,
            "f2": k * 2.0 * rx * ry / k2 * ghat,
        }


class _SpectraCache:
    def __init__(self, frames, grid, k, capacity=8):
        self.frames = frames
        self.grid = grid
        self.k = k
        self.capacity = capacity
        self._cache: OrderedDict[int, _FrameSpectra] = OrderedDict()

    def __getitem__(self, i: int) -> _FrameSpectra:
        if i in self._cache:
            self._cache.move_to_end(i)
            return self._cache[i]
        fs = _FrameSpectra(self.frames[i], self.grid, self.k)
        self._cache[i] = fs
        if len(self._cache) > self.capacity:
            self._cache.popitem(last=False)
        return fs


def _lagrange_weights(nodes: np.ndarray, tq: float) -> np.ndarray:
    w = np.ones(len(nodes))
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            if i != j:
                w[i] *= (tq - nodes[j]) / (nodes[i] - nodes[j])
    return w


def _window(i: int, n: int) -> list[int]:
    lo = min(max(i - 1, 0), max(n - 4, 0))
    return list(range(lo, min(lo + 4, n)))


def trace_characteristic(result: PdeRunResult, x0) -> TracerSeries:
    """Trace the characteristic through ``result``'s history starting at ``x0``.

    The run must have been produced with ``store_history=True``.  The tracer
    samples at every history frame time; the run fails with
    :class:`NonVacuumError` if the seed density vanishes (the coefficient
    reconstruction divides by the density along the path).
    """
    if result.history is None or len(result.history) < 2:
        raise ValueError("tracing requires a run with store_history=True")
    grid = result.grid
    k = result.params.k
    frames = result.history
    n = len(frames)
    times = np.array([f.t for f in frames])
    cache = _SpectraCache(frames, grid, k)

    def sample(i: int, pos, names):
        fs = cache[i]
        return {nm: eval_point(fs.spectra[nm], grid, pos) for nm in names}

    def velocity(tq: float, pos, idxs, weights) -> np.ndarray:
        u1 = u2 = 0.0
        for j, w in zip(idxs, weights):
            fs = cache[j]
            u1 += w * eval_point(fs.spectra["u1"], grid, pos)
            u2 += w * eval_point(fs.spectra["u2"], grid, pos)
        return np.array([u1, u2])

    x = np.array(x0, dtype=float)
    if x.shape != (2,):
        raise ValueError("x0 must be a 2-vector")

    all_names = ("rho", "d", "omega", "eta", "xi", "f1", "f2")
    first = sample(0, x, all_names)
    rho0 = first["rho"]
    if rho0 <= 0.0:
        raise NonVacuumError(f"tracer seeded at vacuum density rho={rho0:.3e}")
    omega0, eta0, xi0 = first["omega"], first["eta"], first["xi"]

    records = [(times[0], x.copy(), first)]
    status = "complete"
    for i in range(n - 1):
        t0, t1 = times[i], times[i + 1]
        h = t1 - t0
        idxs = _window(i, n)
        node_t = times[idxs]

        def u_at(tq, pos):
            return velocity(tq, pos, idxs, _lagrange_weights(node_t, tq))

        k1 = u_at(t0, x)
        k2 = u_at(t0 + 0.5 * h, x + 0.5 * h * k1)
        k3 = u_at(t0 + 0.5 * h, x + 0.5 * h * k2)
        k4 = u_at(t1, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            status = "truncated"
            break
        records.append((t1, x.copy(), sample(i + 1, x, all_names)))

    ts = np.array([r[0] for r in records])
    xs = np.array([r[1] for r in records])
    cols = {nm: np.array([r[2][nm] for r in records]) for nm in all_names}
    if np.any(cols["rho"] <= 0.0):
        raise InvalidStateError("tracer crossed a vacuum region; A(t) undefined")

    i1 = _cumtrapz(cols["f1"] / cols["rho"], ts)
    i2 = _cumtrapz(cols["f2"] / cols["rho"], ts)
    w0, e0, x0r = omega0 / rho0, eta0 / rho0, xi0 / rho0
    a_vals = 0.5 * (w0**2 - (e0 + i1) ** 2 - (x0r + i2) ** 2)

    return TracerSeries(
        t=ts,
        x=xs,
        rho=cols["rho"],
        d=cols["d"],
        omega=cols["omega"],
        eta=cols["eta"],
        xi=cols["xi"],
        f1=cols["f1"],
        f2=cols["f2"],
        A=a_vals,
        status=status,
    )


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    if len(y) > 1:
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out
