"""The geometric 2-cocycle omega-tilde, its weight families, the star product,
and trivializing 1-cochains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .coeffs import Continuous, ModReal, Mode, Quantized, canonicalize, exp_weight
from .geometry.common import PathClass, PiecewisePath, TwoForm
from .geometry.sphere import SphereGeodesic, SpherePoint, UnitSphere
from .geometry.torus import CoverSegment, FlatTorus, TorusGeodesic
from .monoid import (UNDEFINED, ZERO, Cochain, FormalSum, coboundary_multiplicative, deformed_product,
                     is_sentinel)


@dataclass(frozen=True)
class DeformationParams:
    """A weight family: exp(lam w) for modulus 0, exp(2 pi i n w / mu) otherwise."""

    mode: Mode
    form: TwoForm

    def __post_init__(self):
        mu = self.form.modulus
        if isinstance(self.mode, Continuous) and mu != 0:
            raise ValueError(f"a continuous family needs modulus 0, the form has modulus {mu}")
        if isinstance(self.mode, Quantized) and mu <= 0:
            raise ValueError("a quantized family needs a form of positive modulus")

    @classmethod
    def continuous(cls, form: TwoForm, lam: complex) -> "DeformationParams":
        return cls(Continuous(lam), form)

    @classmethod
    def quantized(cls, form: TwoForm, n: int) -> "DeformationParams":
        return cls(Quantized(n), form)

    @property
    def backend(self):
        return self.form.backend

    def weight(self, value: ModReal) -> complex:
        return exp_weight(self.mode, value)

    @property
    def is_identity(self) -> bool:
        m = self.mode
        return (m.lam == 0) if isinstance(m, Continuous) else (m.n == 0)


def _as_class(x, backend):
    if isinstance(x, PiecewisePath):
        return backend.reduce_to_class(x)
    return x


def omega_tilde(form: TwoForm, a, b):
    """omega-tilde(a, b): integral of ``form`` over the geodesic triangle of a, b, ab.

    Returns ZERO for non-concatenable pairs and UNDEFINED when one of the
    three shortest geodesics is not unique. Piecewise paths are reduced to
    their classes first.
    """
    backend = form.backend
    a = _as_class(a, backend)
    b = _as_class(b, backend)
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    if a is ZERO or b is ZERO:
        return ZERO
    ab = backend.concat(a, b)
    if is_sentinel(ab):
        return ab
    return backend.pair_integral(form, a, b)


def weight_of_pair(params: DeformationParams, a, b):
    w = omega_tilde(params.form, a, b)
    return w if is_sentinel(w) else params.weight(w)


def omega_cochain(form: TwoForm) -> Cochain:
    """omega-tilde as an additive 2-cochain (value 0 off the composable pairs)."""
    zero = canonicalize(0.0, form.modulus)

    def F(a, b):
        v = omega_tilde(form, a, b)
        return zero if v is ZERO else v

    return Cochain(2, F, form.backend, form.modulus, "additive")


def weight_cochain(params: DeformationParams) -> Cochain:
    return Cochain(2, lambda a, b: weight_of_pair(params, a, b), params.backend, 0.0, "multiplicative")


def star_product(params: DeformationParams, x: FormalSum, y: FormalSum):
    """Deformed product a * b = f(a, b) ab extended bilinearly."""
    return deformed_product(x, y, weight_cochain(params), params.backend)


# -- memory of the first path ------------------------------------------------


def memory_function(params: DeformationParams, gamma: PathClass, gamma_prime, x: float):
    """Weight of gamma followed by the first ``x`` of the geodesic ``gamma_prime``.

    ``gamma_prime`` is an actual geodesic (possibly longer than pi on the
    sphere), so the triangle uses it as a side instead of its shortest
    representative.
    """
    if x < 0 or x > gamma_prime.length + 1e-12:
        raise ValueError(f"arclength {x} outside [0, {gamma_prime.length}]")
    w = memory_omega(params.form, gamma, gamma_prime, x)
    return w if is_sentinel(w) else params.weight(w)


def memory_omega(form: TwoForm, gamma: PathClass, gamma_prime, x: float):
    backend = form.backend
    if isinstance(backend, UnitSphere):
        first = backend.shortest_geodesic(gamma)
        if first is UNDEFINED:
            return UNDEFINED
        return backend.geodesic_pair_integral(form, first, gamma_prime.prefix(x))
    return omega_tilde(form, gamma, gamma_prime.prefix(x))


# -- trivializers --------------------------------------------------------------


@dataclass
class Trivializer:
    """A 1-cochain g whose coboundary reproduces the weights on its domain."""

    params: DeformationParams
    base: Any
    radius: float
    g: Callable[[Any], Any]
    concat: Callable[[Any, Any], Any]

    def __call__(self, element):
        return self.g(element)

    def coboundary(self, a, b):
        """(dg)(a, b) = g(a) g(b) / g(ab)."""
        ab = self.concat(a, b)
        if is_sentinel(ab):
            return ab
        vals = (self.g(a), self.g(b), self.g(ab))
        if any(is_sentinel(v) for v in vals):
            return UNDEFINED
        return vals[0] * vals[1] / vals[2]

    def as_cochain(self) -> Cochain:
        return Cochain(1, self.g, self.params.backend, 0.0, "multiplicative")


def concat_cover(a: CoverSegment, b: CoverSegment, tol: float = 1e-9):
    if math.dist(a.end, b.start) > tol:
        return ZERO
    return CoverSegment(a.start, b.end)


def global_trivializer_torus(params: DeformationParams, origin=(0.0, 0.0)) -> Trivializer:
    """g(P -> Q) = exp-weight of the area of the plane triangle (O, P, Q).

    The weights are a coboundary on the universal cover: for lifted
    segments a = P -> Q and b = Q -> R the three cone triangles add up to
    (P, Q, R). Path classes are evaluated at the canonical lift of their
    start point, which is generally *not* compatible across a
    concatenation; see :func:`loop_commutator`.
    """
    torus = params.backend
    if not isinstance(torus, FlatTorus):
        raise ValueError("the global trivializer needs the flat torus")
    form = params.form
    O = np.asarray(origin, dtype=float)

    def g(element):
        if isinstance(element, CoverSegment):
            P, Q = np.asarray(element.start), np.asarray(element.end)
        else:
            P = torus.lift(element.start)
            Q = P + torus.displacement(element)
        return params.weight(torus.triangle_integral(form, O, P, Q))

    def concat(a, b):
        if isinstance(a, CoverSegment):
            return concat_cover(a, b, torus.tol)
        return torus.concat(a, b)

    return Trivializer(params, tuple(O), math.inf, g, concat)


def cover_weight(params: DeformationParams, a: CoverSegment, b: CoverSegment):
    """Weight of a lifted pair, computed on the torus after projecting both segments."""
    torus = params.backend
    return weight_of_pair(params, torus.project(a), torus.project(b))


def loop_commutator(params: DeformationParams, p, k1, k2) -> complex:
    """f(a, b) / f(b, a) for the loops a = (p, p, k1), b = (p, p, k2).

    Loops at one point commute in the torus monoid, so any coboundary is
    symmetric on them; a ratio different from 1 shows the weights are not
    a coboundary of a 1-cochain on torus path classes themselves.
    """
    torus = params.backend
    a = torus.path_class(p, p, k1)
    b = torus.path_class(p, p, k2)
    return weight_of_pair(params, a, b) / weight_of_pair(params, b, a)


def local_trivializer(params: DeformationParams, base, radius: float) -> Trivializer:
    """Cone trivializer g(p -> q) = exp-weight of the triangle (base, p, q).

    Valid for path classes whose geodesic stays in the ball of ``radius``
    around ``base``; elsewhere g is UNDEFINED. On the sphere the radius must
    stay below pi/2 so every cone triangle sits in one hemisphere.
    """
    backend = params.backend
    form = params.form
    limit = math.pi / 2 if isinstance(backend, UnitSphere) else backend.injectivity_radius(base)
    if not 0 < radius < limit:
        raise ValueError(f"radius {radius} must lie in (0, {limit})")

    if isinstance(backend, UnitSphere):
        def g(pc):
            if pc is UNDEFINED:
                return UNDEFINED
            if backend.distance(base, pc.start) >= radius or backend.distance(base, pc.end) >= radius:
                return UNDEFINED
            v = backend.cone_integral(form, base, pc)
            return v if is_sentinel(v) else params.weight(v)
    else:
        B = backend.lift(base)

        def g(pc):
            P = backend.nearest_lift(B, pc.start)
            Q = P + backend.displacement(pc)
            if np.hypot(*(P - B)) >= radius or np.hypot(*(Q - B)) >= radius:
                return UNDEFINED
            return params.weight(backend.triangle_integral(form, B, P, Q))

    return Trivializer(params, base, radius, g, backend.concat)
