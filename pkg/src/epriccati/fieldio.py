"""On-disk formats: binary field snapshots and the CSV series.

Snapshot files hold one scalar field each: a 16-byte header (magic ``EPF1``,
``N`` as 32-bit little-endian, ``L`` as 64-bit IEEE-754 little-endian)
followed by ``N*N`` 64-bit little-endian doubles in row-major order.  Each
snapshot also gets a sidecar JSON manifest with the time, the physical
parameters and the norm sample.

CSV files carry exact header rows (``t,rho_sup,phi_sup,dphi_dx_sup`` for norm
series; ``t,x1,x2,rho,d,omega,eta,xi,f1,f2,A`` for tracer series, plus an
``envelope_ok`` flag column when written by the CLI).  Floats are rendered in
the shortest round-trip form so goldens are portable; an optional timestamp
comment is the only non-deterministic line and can be suppressed.
"""

from __future__ import annotations

import json
import struct
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .simulate import NormSeries
from .tracing import TracerSeries

__all__ = [
    "MAGIC",
    "write_scalar_field",
    "read_scalar_field",
    "write_snapshot",
    "fmt",
    "timestamp_line",
    "write_norm_csv",
    "write_tracer_csv",
    "write_trajectory_csv",
    "write_sweep_csv",
]

MAGIC = b"EPF1"
_HEADER = struct.Struct("<4sid")  # magic, N, L -> 16 bytes


def fmt(x: float) -> str:
    """Shortest decimal form that round-trips a 64-bit float."""
    return repr(float(x))


def timestamp_line() -> str:
    return f"# generated: {datetime.now(timezone.utc).isoformat()}\n"


def write_scalar_field(path, values: np.ndarray, L: float) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("snapshot fields must be square 2D arrays")
    n = values.shape[0]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, float(L)))
        fh.write(values.astype("<f8").tobytes(order="C"))


def read_scalar_field(path) -> tuple[np.ndarray, float]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, n, box = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    payload = raw[_HEADER.size :]
    if len(payload) != 8 * n * n:
        raise ValueError(f"{path}: payload size mismatch for N={n}")
    values = np.frombuffer(payload, dtype="<f8").reshape(n, n).copy()
    return values, box


def write_snapshot(out_dir, stem: str, t: float, fields: dict, grid, params, norms) -> list[str]:
    """Write one field file per entry of ``fields`` plus a JSON manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, values in fields.items():
        p = out_dir / f"{stem}_{name}.epf"
        write_scalar_field(p, values, grid.L)
        written.append(str(p))
    manifest = {
        "time": t,
        "N": grid.N,
        "L": grid.L,
        "k": params.k,
        "c_b": params.c_b,
        "fields": sorted(fields),
        "norms": {
            "rho_sup": norms[0],
            "phi_sup": norms[1],
            "dphi_dx_sup": norms[2],
        },
    }
    mpath = out_dir / f"{stem}.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(str(mpath))
    return written


def write_norm_csv(fh, series: NormSeries, timestamp: bool = True) -> None:
    if timestamp:
        fh.write(timestamp_line())
    fh.write("t,rho_sup,phi_sup,dphi_dx_sup\n")
    for i in range(len(series.t)):
        fh.write(
            f"{fmt(series.t[i])},{fmt(series.rho_sup[i])},"
            f"{fmt(series.phi_sup[i])},{fmt(series.dphi_dx_sup[i])}\n"
        )


def write_tracer_csv(fh, series: TracerSeries, timestamp: bool = True) -> None:
    """Tracer CSV with the sample-wise coefficient envelope flag appended."""
    if timestamp:
        fh.write(timestamp_line())
    fh.write("t,x1,x2,rho,d,omega,eta,xi,f1,f2,A,envelope_ok\n")
    envelope_ok = series.A >= -np.exp(series.t)
    for i in range(len(series.t)):
        row = [
            series.t[i],
            series.x[i, 0],
            series.x[i, 1],
            series.rho[i],
            series.d[i],
            series.omega[i],
            series.eta[i],
            series.xi[i],
            series.f1[i],
            series.f2[i],
            series.A[i],
        ]
        fh.write(",".join(fmt(v) for v in row) + f",{int(envelope_ok[i])}\n")


def write_trajectory_csv(fh, traj, status_text: str, timestamp: bool = True) -> None:
    if timestamp:
        fh.write(timestamp_line())
    fh.write("t,rho,d\n")
    for i in range(len(traj.t)):
        fh.write(f"{fmt(traj.t[i])},{fmt(traj.y[i, 0])},{fmt(traj.y[i, 1])}\n")
    fh.write(f"# status: {status_text}\n")


def write_sweep_csv(fh, rows, timestamp: bool = True) -> None:
    """Sweep rows ``(rho0, d0, region, status, t_blow_mid_or_None)`` in grid order."""
    if timestamp:
        fh.write(timestamp_line())
    fh.write("rho0,d0,region,status,t_blow_mid\n")
    for rho0, d0, region, status_text, t_mid in rows:
        tail = "" if t_mid is None else fmt(t_mid)
        fh.write(f"{fmt(rho0)},{fmt(d0)},{region},{status_text},{tail}\n")
