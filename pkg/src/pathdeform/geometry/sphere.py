"""Unit sphere S^2 with its area form (modulus 4 pi).

Every class of paths between two points is trivial, so a path class is just
an ordered pair of points. The shortest geodesic is the minor great-circle
arc, which fails to be unique for antipodal endpoints.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..coeffs import DEFAULT_TOL, ModReal, canonicalize
from ..monoid import UNDEFINED, ZERO
from .common import PathClass, PiecewisePath, TwoForm

ANTIPODAL_TOL = 1e-6
# |det| below this (relative to the edge lengths) counts as coplanar
_COPLANAR_ATOL = 1e-15


@dataclass(frozen=True)
class SpherePoint:
    x: float
    y: float
    z: float

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __repr__(self):
        return f"S({self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


def _as_vec(p) -> np.ndarray:
    return p.vec if isinstance(p, SpherePoint) else np.asarray(p, dtype=float)


def _cross3(a, b) -> tuple[float, float, float]:
    # np.cross carries heavy per-call overhead for single 3-vectors
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def angle_between(p, q) -> float:
    """Great-circle distance, stable near 0 and pi."""
    a, b = _as_vec(p), _as_vec(q)
    return math.atan2(math.hypot(*_cross3(a, b)), float(a @ b))


def solid_angle(p, q, r) -> float:
    """Signed area of the spherical triangle with minor-arc edges p, q, r.

    tan(Omega / 2) = det[p q r] / (1 + p.q + q.r + r.p), evaluated with atan2
    so thin triangles keep full relative precision. The sign follows
    det[p q r]. Coplanar vertices give 0, or 2 pi when the three edges wrap
    once around their great circle.
    """
    a, b, c = _as_vec(p), _as_vec(q), _as_vec(r)
    det = float(a @ _cross3(b, c))
    den = 1.0 + float(a @ b) + float(b @ c) + float(c @ a)
    if abs(det) <= _COPLANAR_ATOL:
        return 0.0 if den >= 0 else 2.0 * math.pi
    return 2.0 * math.atan2(det, den)


# fan centres tried for loop integrals: axes and cube diagonals
_FAN_CENTRES = [np.array(v, dtype=float) / np.linalg.norm(v)
                for v in itertools.chain(
                    ([1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]),
                    itertools.product([1, -1], repeat=3))]


def _fan_centre(verts: np.ndarray) -> np.ndarray:
    best, best_score = None, -1.0
    for c in _FAN_CENTRES:
        score = float(np.min(1.0 + verts @ c))
        if score > best_score:
            best, best_score = c, score
    if best_score < 1e-3:
        # golden-spiral fallback
        k = np.arange(200) + 0.5
        phi = np.arccos(1 - 2 * k / 200)
        th = math.pi * (1 + 5 ** 0.5) * k
        pts = np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)
        scores = np.min(1.0 + verts @ pts.T, axis=0)
        best = pts[int(np.argmax(scores))]
    return best


def loop_area(verts: Sequence) -> float:
    """Signed area (mod 4 pi) enclosed by a closed polygon of minor arcs.

    Summed as a fan of cone triangles from a centre kept away from every
    vertex's antipode; any two fillings of the loop differ by whole spheres.
    """
    V = np.array([_as_vec(v) for v in verts])
    c = _fan_centre(V)
    n = len(V)
    return math.fsum(solid_angle(c, V[i], V[(i + 1) % n]) for i in range(n))


@dataclass(frozen=True)
class SphereGeodesic:
    """Great-circle arc of any length from ``start`` along unit tangent ``direction``."""

    start: SpherePoint
    direction: tuple[float, float, float]
    length: float

    def point_at(self, t: float) -> SpherePoint:
        v = math.cos(t) * self.start.vec + math.sin(t) * np.array(self.direction)
        return _normalize(v)

    def prefix(self, x: float) -> "SphereGeodesic":
        return SphereGeodesic(self.start, self.direction, float(x))

    @property
    def end(self) -> SpherePoint:
        return self.point_at(self.length)

    def vertices(self, max_step: float = math.pi / 2) -> list[SpherePoint]:
        """Start, interior subdivision points and end, consecutive gaps <= max_step."""
        pieces = max(1, math.ceil(self.length / max_step))
        return [self.point_at(self.length * i / pieces) for i in range(pieces + 1)]


def _normalize(v) -> SpherePoint:
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0:
        raise ValueError("cannot place the zero vector on the sphere")
    v = v / n
    return SpherePoint(float(v[0]), float(v[1]), float(v[2]))


class UnitSphere:
    name = "sphere"

    def __init__(self, tol: float = DEFAULT_TOL, antipodal_tol: float = ANTIPODAL_TOL):
        self.tol = tol
        self.antipodal_tol = antipodal_tol

    def __repr__(self):
        return "UnitSphere()"

    # points and classes

    def point(self, x, y=None, z=None) -> SpherePoint:
        v = x if y is None else (x, y, z)
        return _normalize(v)

    def from_angles(self, colatitude: float, longitude: float) -> SpherePoint:
        s = math.sin(colatitude)
        return _normalize((s * math.cos(longitude), s * math.sin(longitude), math.cos(colatitude)))

    def same_point(self, p: SpherePoint, q: SpherePoint) -> bool:
        return math.dist((p.x, p.y, p.z), (q.x, q.y, q.z)) <= self.tol

    def is_antipodal(self, p: SpherePoint, q: SpherePoint) -> bool:
        return math.pi - angle_between(p, q) < self.antipodal_tol

    def path_class(self, start: SpherePoint, end: SpherePoint, cls=None):
        if self.is_antipodal(start, end):
            return UNDEFINED
        return PathClass(start, end, None)

    # monoid structure

    def concat(self, a: PathClass, b: PathClass):
        if not self.same_point(a.end, b.start):
            return ZERO
        return self.path_class(a.start, b.end)

    product = concat

    def reduce_to_class(self, path: PiecewisePath):
        for s, t in zip(path.segments, path.segments[1:]):
            if not self.same_point(s.end, t.start):
                raise ValueError(f"segments do not join: {s} then {t}")
        return self.path_class(path.start, path.end)

    def path_length(self, path: PiecewisePath) -> float:
        return math.fsum(angle_between(s.start, s.end) for s in path.segments)

    # metric geometry

    def shortest_geodesic(self, pc: PathClass):
        p, q = pc.start.vec, pc.end.vec
        if self.is_antipodal(pc.start, pc.end):
            return UNDEFINED
        length = angle_between(p, q)
        t = q - (p @ q) * p
        nt = float(np.linalg.norm(t))
        if nt < 1e-300:
            # null path: any tangent will do
            t = np.cross(p, [1.0, 0.0, 0.0])
            if np.linalg.norm(t) < 0.5:
                t = np.cross(p, [0.0, 1.0, 0.0])
            nt = float(np.linalg.norm(t))
        t = t / nt
        return SphereGeodesic(pc.start, (float(t[0]), float(t[1]), float(t[2])), length)

    def geodesic(self, start: SpherePoint, direction, length: float) -> SphereGeodesic:
        p = start.vec
        d = np.asarray(direction, dtype=float)
        d = d - (d @ p) * p
        d = d / np.linalg.norm(d)
        return SphereGeodesic(start, (float(d[0]), float(d[1]), float(d[2])), float(length))

    def injectivity_radius(self, p: SpherePoint | None = None) -> float:
        return math.pi

    def distance(self, p: SpherePoint, q: SpherePoint) -> float:
        return angle_between(p, q)

    # area form

    def form_modulus(self, scale: float) -> float:
        return 4.0 * math.pi * abs(scale)

    def area_form(self, scale: float = 1.0) -> TwoForm:
        return TwoForm(self, scale)

    def triangle_integral(self, form: TwoForm, p, q, r):
        if self.is_antipodal(p, q) or self.is_antipodal(q, r) or self.is_antipodal(r, p):
            return UNDEFINED
        return canonicalize(form.scale * solid_angle(p, q, r), form.modulus)

    def pair_integral(self, form: TwoForm, a: PathClass, b: PathClass):
        return self.triangle_integral(form, a.start, a.end, b.end)

    def geodesic_pair_integral(self, form: TwoForm, first: SphereGeodesic, second: SphereGeodesic):
        """Integral over the triangle with sides ``first``, ``second`` (any lengths)
        and the minor arc joining first.start to second.end.

        This is the product weight of the geodesic algebra, where a basis
        element is an actual geodesic segment rather than its class.
        """
        p = first.start
        r = second.end
        if self.is_antipodal(p, r):
            return UNDEFINED
        verts = first.vertices() + second.vertices()[1:]
        return canonicalize(form.scale * loop_area(verts), form.modulus)

    def cone_integral(self, form: TwoForm, base: SpherePoint, pc: PathClass):
        return self.triangle_integral(form, base, pc.start, pc.end)

    # sampling

    def random_point(self, rng: np.random.Generator) -> SpherePoint:
        return _normalize(rng.normal(size=3))

    def random_class(self, rng: np.random.Generator, start: SpherePoint, end: SpherePoint, **_):
        return self.path_class(start, end)
