"""Flat torus R^2 / Lambda.

Points are stored by fractional lattice coordinates in [0, 1). A path class
(p, q, k) is the straight segment from the canonical lift B p to the lift
B (q + k); concatenation adds deck vectors. Everything happens on the
universal cover, where the area form has the primitive (x dy - y dx) / 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..coeffs import DEFAULT_TOL, ModReal, canonicalize
from ..monoid import UNDEFINED, ZERO
from .common import PathClass, PiecewisePath, TwoForm

# relative size below which a cross product counts as collinear
_COLLINEAR_RTOL = 1e-14


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _snap_frac(u: float) -> float:
    u = float(u) % 1.0
    if u >= 1.0 - 1e-13:
        u = 0.0
    return u + 0.0


@dataclass(frozen=True)
class TorusPoint:
    u: float
    v: float

    @property
    def frac(self) -> np.ndarray:
        return np.array([self.u, self.v])

    def __repr__(self):
        return f"T({self.u:.6g}, {self.v:.6g})"


@dataclass(frozen=True)
class Lattice:
    """Lattice spanned by two linearly independent plane vectors."""

    b1: tuple[float, float] = (1.0, 0.0)
    b2: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "b1", (float(self.b1[0]), float(self.b1[1])))
        object.__setattr__(self, "b2", (float(self.b2[0]), float(self.b2[1])))
        if abs(self.det) < 1e-12:
            raise ValueError(f"degenerate lattice basis {self.b1}, {self.b2}")

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "Lattice":
        if len(values) != 4:
            raise ValueError("lattice needs four numbers: b1x b1y b2x b2y")
        return cls((values[0], values[1]), (values[2], values[3]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.b1[0], self.b2[0]], [self.b1[1], self.b2[1]]])

    @property
    def det(self) -> float:
        return self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]

    def to_xy(self, frac) -> np.ndarray:
        return self.matrix @ np.asarray(frac, dtype=float)

    def to_frac(self, xy) -> np.ndarray:
        return np.linalg.solve(self.matrix, np.asarray(xy, dtype=float))

    def shortest_vector(self) -> np.ndarray:
        """Shortest nonzero lattice vector by Lagrange-Gauss reduction."""
        u = np.array(self.b1)
        v = np.array(self.b2)
        if u @ u > v @ v:
            u, v = v, u
        while True:
            m = round(float(u @ v) / float(u @ u))
            v = v - m * u
            if v @ v >= u @ u:
                return u
            u, v = v, u


@dataclass(frozen=True)
class TorusGeodesic:
    """Straight segment of the given length leaving ``lift`` along ``direction``."""

    start: TorusPoint
    lift: tuple[float, float]
    direction: tuple[float, float]
    length: float
    torus: "FlatTorus"

    def lift_at(self, t: float) -> np.ndarray:
        return np.array(self.lift) + t * np.array(self.direction)

    def point_at(self, t: float) -> TorusPoint:
        return self.torus.point_from_xy(self.lift_at(t))

    def prefix(self, x: float) -> PathClass:
        """Path class of the initial piece of arclength ``x``."""
        return self.torus.class_between_lifts(self.lift, self.lift_at(x))


@dataclass(frozen=True)
class CoverSegment:
    """A segment in the universal cover, given by plane endpoints."""

    start: tuple[float, float]
    end: tuple[float, float]


class FlatTorus:
    name = "torus"

    def __init__(self, lattice: Lattice | None = None, tol: float = DEFAULT_TOL):
        self.lattice = lattice or Lattice()
        self.tol = tol
        self._orientation = 1.0 if self.lattice.det > 0 else -1.0

    def __repr__(self):
        return f"FlatTorus({self.lattice.b1}, {self.lattice.b2})"

    # points and classes

    def point(self, u: float, v: float) -> TorusPoint:
        return TorusPoint(_snap_frac(u), _snap_frac(v))

    def point_from_xy(self, xy) -> TorusPoint:
        f = self.lattice.to_frac(xy)
        return self.point(f[0], f[1])

    def lift(self, p: TorusPoint) -> np.ndarray:
        return self.lattice.to_xy(p.frac)

    def path_class(self, start: TorusPoint, end: TorusPoint, cls=(0, 0)) -> PathClass:
        return PathClass(start, end, (int(cls[0]), int(cls[1])))

    def displacement(self, pc: PathClass) -> np.ndarray:
        return self.lattice.to_xy(pc.end.frac + np.array(pc.cls) - pc.start.frac)

    def class_between_lifts(self, a, b) -> PathClass:
        fa = self.lattice.to_frac(a)
        fb = self.lattice.to_frac(b)
        p, q = self.point(*fa), self.point(*fb)
        # deck vector = offset of b's lift from canonical q, relative to a's
        ka = np.rint(fa - p.frac)
        kb = np.rint(fb - q.frac)
        k = kb - ka
        return self.path_class(p, q, (int(k[0]), int(k[1])))

    def seam_offset(self, q: TorusPoint, q2: TorusPoint):
        """Integer m with q2 = q + m (within tolerance), or ``None``."""
        diff = q2.frac - q.frac
        m = np.rint(diff)
        if np.linalg.norm(self.lattice.to_xy(diff - m)) <= self.tol:
            return m.astype(int)
        return None

    def same_point(self, p: TorusPoint, q: TorusPoint) -> bool:
        return self.seam_offset(p, q) is not None

    # monoid structure

    def concat(self, a: PathClass, b: PathClass):
        m = self.seam_offset(a.end, b.start)
        if m is None:
            return ZERO
        k = (a.cls[0] + b.cls[0] - int(m[0]), a.cls[1] + b.cls[1] - int(m[1]))
        return PathClass(a.start, b.end, k)

    product = concat

    def reduce_to_class(self, path: PiecewisePath) -> PathClass:
        acc = path.segments[0]
        for seg in path.segments[1:]:
            nxt = self.concat(acc, seg)
            if nxt is ZERO:
                raise ValueError(f"segments do not join: {acc} then {seg}")
            acc = nxt
        return acc

    def path_length(self, path: PiecewisePath) -> float:
        return math.fsum(self.shortest_geodesic(s).length for s in path.segments)

    # metric geometry

    def shortest_geodesic(self, pc: PathClass) -> TorusGeodesic:
        d = self.displacement(pc)
        length = float(np.hypot(d[0], d[1]))
        direction = d / length if length > 0 else np.array([1.0, 0.0])
        lift = self.lift(pc.start)
        return TorusGeodesic(pc.start, (float(lift[0]), float(lift[1])),
                             (float(direction[0]), float(direction[1])), length, self)

    def geodesic(self, start: TorusPoint, direction, length: float, lift=None) -> TorusGeodesic:
        d = np.asarray(direction, dtype=float)
        d = d / np.hypot(d[0], d[1])
        base = self.lift(start) if lift is None else np.asarray(lift, dtype=float)
        return TorusGeodesic(start, (float(base[0]), float(base[1])), (float(d[0]), float(d[1])),
                             float(length), self)

    def injectivity_radius(self, p: TorusPoint | None = None) -> float:
        v = self.lattice.shortest_vector()
        return 0.5 * float(np.hypot(v[0], v[1]))

    def distance(self, p: TorusPoint, q: TorusPoint) -> float:
        d = self.nearest_lift(self.lift(p), q) - self.lift(p)
        return float(np.hypot(d[0], d[1]))

    def nearest_lift(self, anchor, q: TorusPoint) -> np.ndarray:
        """Lift of ``q`` closest to the plane point ``anchor``."""
        base = self.lift(q)
        k0 = np.floor(self.lattice.to_frac(np.asarray(anchor) - base))
        cands = [base + self.lattice.to_xy(k0 + (i, j)) for i in range(-1, 3) for j in range(-1, 3)]
        return min(cands, key=lambda c: float(np.hypot(*(c - anchor))))

    # area form

    def form_modulus(self, scale: float) -> float:
        return 0.0

    def area_form(self, scale: float = 1.0) -> TwoForm:
        return TwoForm(self, scale)

    def signed_area(self, P, Q, R) -> float:
        """Oriented area of the plane triangle P, Q, R (shoelace)."""
        u = np.asarray(Q, dtype=float) - np.asarray(P, dtype=float)
        w = np.asarray(R, dtype=float) - np.asarray(P, dtype=float)
        return self._oriented_half_cross(u, w)

    def _oriented_half_cross(self, u, w) -> float:
        c = _cross(u, w)
        if abs(c) <= _COLLINEAR_RTOL * (np.hypot(*u) * np.hypot(*w)):
            return 0.0
        return 0.5 * self._orientation * c

    def triangle_integral(self, form: TwoForm, P, Q, R) -> ModReal:
        return canonicalize(form.scale * self.signed_area(P, Q, R), 0.0)

    def pair_integral(self, form: TwoForm, a: PathClass, b: PathClass) -> ModReal:
        """Integral of ``form`` over the lifted triangle of a composable pair."""
        da = self.displacement(a)
        db = self.displacement(b)
        return canonicalize(form.scale * self._oriented_half_cross(da, db), 0.0)

    def cone_integral(self, form: TwoForm, base_lift, pc: PathClass, start_lift=None) -> ModReal:
        P = self.lift(pc.start) if start_lift is None else np.asarray(start_lift)
        return self.triangle_integral(form, base_lift, P, P + self.displacement(pc))

    # universal cover

    def project(self, seg: CoverSegment) -> PathClass:
        return self.class_between_lifts(seg.start, seg.end)

    # sampling

    def random_point(self, rng: np.random.Generator) -> TorusPoint:
        u, v = rng.random(2)
        return self.point(u, v)

    def random_class(self, rng: np.random.Generator, start: TorusPoint, end: TorusPoint,
                     max_winding: int = 2) -> PathClass:
        k = rng.integers(-max_winding, max_winding + 1, size=2)
        return self.path_class(start, end, (int(k[0]), int(k[1])))
