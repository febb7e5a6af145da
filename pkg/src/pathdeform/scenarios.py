"""Worked scenarios: equator phase traces on the sphere, deflection on the torus."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .coeffs import Quantized
from .deformation import DeformationParams, memory_omega, weight_of_pair
from .geometry.common import PathClass
from .geometry.sphere import UnitSphere
from .geometry.torus import FlatTorus, Lattice
from .monoid import UNDEFINED, is_sentinel

TRACE_HEADER = ("x_longitude", "omega_tilde_mod", "phase_unwound", "weight_re", "weight_im", "defined")
DEFLECTION_HEADER = ("angle", "weight_re", "weight_im", "mirror_re", "mirror_im", "product_re", "product_im")


@dataclass(frozen=True)
class EquatorTraceConfig:
    colatitude: float = 0.0
    n: int = 1
    steps: int = 360
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.colatitude <= math.pi / 2 + 1e-12:
            raise ValueError(f"colatitude must lie in [0, pi/2], got {self.colatitude}")
        if self.steps < 2:
            raise ValueError("need at least 2 steps")
        if self.scale == 0:
            raise ValueError("form scale must be nonzero on the sphere")

    @property
    def starts_on_equator(self) -> bool:
        return abs(self.colatitude - math.pi / 2) < 1e-12


@dataclass(frozen=True)
class TraceRow:
    x: float
    omega: float | None
    phase: float | None
    weight: complex | None
    defined: bool


def _grid(steps: int) -> list[float]:
    xs = []
    for k in range(steps + 1):
        if 2 * k == steps:
            xs.append(math.pi)
        elif k == steps:
            xs.append(2 * math.pi)
        else:
            xs.append(2 * math.pi * k / steps)
    return xs


def unwind(value: float, previous: float | None, period: float) -> float:
    """Representative of ``value`` mod ``period`` nearest to ``previous``.

    An exact half-period tie goes to the branch closest to ``value`` itself.
    """
    if previous is None:
        return value
    t = (previous - value) / period
    lo = math.floor(t)
    frac = t - lo
    if abs(frac - 0.5) < 1e-9:
        k = lo if abs(lo) <= abs(lo + 1) else lo + 1
    else:
        k = lo if frac < 0.5 else lo + 1
    return value + k * period


def equator_trace(cfg: EquatorTraceConfig) -> list[TraceRow]:
    """Deflect onto the equator at longitude 0 and go once around it eastward.

    The first path runs down meridian 0 from the given colatitude (a null
    path when starting on the equator). Row k sits at longitude 2 pi k / K.
    """
    sphere = UnitSphere()
    form = sphere.area_form(cfg.scale)
    params = DeformationParams.quantized(form, cfg.n)
    mu = form.modulus
    q = sphere.point(1.0, 0.0, 0.0)
    p = q if cfg.starts_on_equator else sphere.from_angles(cfg.colatitude, 0.0)
    gamma = sphere.path_class(p, q)
    equator = sphere.geodesic(q, (0.0, 1.0, 0.0), 2 * math.pi)

    rows = []
    prev = None
    for x in _grid(cfg.steps):
        om = memory_omega(form, gamma, equator, x)
        if is_sentinel(om):
            rows.append(TraceRow(x, None, None, None, False))
            continue
        unwound = unwind(om.value, prev, mu)
        prev = unwound
        phase = 2 * math.pi * cfg.n * unwound / mu
        rows.append(TraceRow(x, om.value, phase, params.weight(om), True))
    return rows


def total_phase(rows: Sequence[TraceRow]) -> float:
    defined = [r for r in rows if r.defined]
    return defined[-1].phase - defined[0].phase


def expected_total_phase(cfg: EquatorTraceConfig) -> float:
    return cfg.n * math.pi * math.copysign(1.0, cfg.scale)


@dataclass(frozen=True)
class TraceStats:
    total: float
    affine_residual: float
    max_jump: float
    max_slope_at: float
    monotone: bool


def trace_stats(rows: Sequence[TraceRow]) -> TraceStats:
    """Shape diagnostics for a trace: fit quality, continuity, steepest point."""
    d = [r for r in rows if r.defined]
    x = np.array([r.x for r in d])
    ph = np.array([r.phase for r in d])
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ph, rcond=None)
    resid = float(np.max(np.abs(A @ coef - ph)))
    dph = np.diff(ph)
    slopes = dph / np.diff(x)
    steep = int(np.argmax(np.abs(slopes)))
    mid = 0.5 * (x[steep] + x[steep + 1])
    sign = np.sign(np.sum(dph))
    monotone = bool(np.all(sign * dph >= -1e-12))
    return TraceStats(float(ph[-1] - ph[0]), resid, float(np.max(np.abs(dph))), float(mid), monotone)


# -- torus deflection ----------------------------------------------------------


@dataclass(frozen=True)
class DeflectionRow:
    angle: float
    weight: complex
    mirror: complex

    @property
    def product(self) -> complex:
        return self.weight * self.mirror


def _rotate(v, theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def torus_deflection(lattice: Lattice, lam: complex, gamma: PathClass, angles: Iterable[float],
                     leg: float, scale: float = 1.0) -> list[DeflectionRow]:
    """Weights for deflecting by each angle after ``gamma``, and for the mirror deflection.

    The mirror leg is the reflection of the deflected leg across the line of
    ``gamma``.
    """
    torus = FlatTorus(lattice)
    params = DeformationParams.continuous(torus.area_form(scale), lam)
    geo = torus.shortest_geodesic(gamma)
    if geo.length == 0:
        raise ValueError("the first path must have positive length to define a line")
    u = np.array(geo.direction)
    end_lift = torus.lift(gamma.start) + torus.displacement(gamma)
    rows = []
    for theta in angles:
        v = _rotate(u, theta)
        mirror = 2 * (v @ u) * u - v
        leg_a = torus.geodesic(gamma.end, v, leg, lift=end_lift).prefix(leg)
        leg_b = torus.geodesic(gamma.end, mirror, leg, lift=end_lift).prefix(leg)
        rows.append(DeflectionRow(float(theta), weight_of_pair(params, gamma, leg_a),
                                  weight_of_pair(params, gamma, leg_b)))
    return rows


# -- CSV output ------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def trace_records(rows: Iterable[TraceRow]):
    for r in rows:
        if r.defined:
            yield (_fmt(r.x), _fmt(r.omega), _fmt(r.phase), _fmt(r.weight.real), _fmt(r.weight.imag), "true")
        else:
            yield (_fmt(r.x), "", "", "", "", "false")


def deflection_records(rows: Iterable[DeflectionRow]):
    for r in rows:
        p = r.product
        yield tuple(_fmt(v) for v in (r.angle, r.weight.real, r.weight.imag, r.mirror.real,
                                      r.mirror.imag, p.real, p.imag))


def emit_csv(rows, sink, header: Sequence[str] = TRACE_HEADER) -> None:
    """Write rows (TraceRow / DeflectionRow) to a path or an open text stream."""
    rows = list(rows)
    if rows and isinstance(rows[0], DeflectionRow):
        records = deflection_records(rows)
        header = DEFLECTION_HEADER
    else:
        records = trace_records(rows)
    if isinstance(sink, (str, Path)):
        path = Path(sink)
        try:
            with path.open("w", newline="") as fh:
                _write(fh, header, records)
        except OSError as exc:
            raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    else:
        _write(sink, header, records)


def _write(fh: IO[str], header, records) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(records)


def csv_text(rows, header: Sequence[str] = TRACE_HEADER) -> str:
    buf = io.StringIO()
    emit_csv(rows, buf, header)
    return buf.getvalue()
