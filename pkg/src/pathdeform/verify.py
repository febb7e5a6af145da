"""Sampled verification suites over the path monoids of both backends.

Each suite returns :class:`~pathdeform.monoid.Verdict` objects; the CLI
prints them one per line.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .coeffs import canonicalize
from .deformation import (DeformationParams, cover_weight, global_trivializer_torus, local_trivializer,
                          omega_cochain, omega_tilde, star_product, weight_cochain, weight_of_pair)
from .geometry.common import PathClass
from .geometry.sphere import SpherePoint, UnitSphere
from .geometry.torus import CoverSegment, FlatTorus
from .monoid import (UNDEFINED, ZERO, Cochain, FiniteMonoid, FormalSum, UndefinedProduct, Verdict,
                     coboundary_additive, coboundary_multiplicative, delta_squared_residual,
                     is_cocycle_multiplicative, is_sentinel, product_chain, random_cochain, solve_triviality,
                     table_cochain)


def composable_chain(backend, rng: np.random.Generator, length: int):
    """``length`` consecutive random path classes p0 -> p1 -> ... , or UNDEFINED."""
    pts = [backend.random_point(rng) for _ in range(length + 1)]
    chain = [backend.random_class(rng, s, t) for s, t in zip(pts, pts[1:])]
    if any(c is UNDEFINED for c in chain):
        return UNDEFINED
    return chain


def sample_chains(backend, rng: np.random.Generator, count: int, length: int):
    """``count`` chains whose full product and all partial products are defined.

    Returns ``(chains, rejected)``.
    """
    chains, rejected = [], 0
    while len(chains) < count:
        chain = composable_chain(backend, rng, length)
        if chain is UNDEFINED or any(
                is_sentinel(product_chain(backend, chain[i:j]))
                for i in range(length) for j in range(i + 2, length + 1)):
            rejected += 1
            if rejected > 10 * count + 100:
                raise RuntimeError("almost every sampled chain was undefined")
            continue
        chains.append(tuple(chain))
    return chains, rejected


# -- cocycle identity ------------------------------------------------------------


def check_additive_cocycle(form, triples, tol: float = 1e-8) -> Verdict:
    """d(omega-tilde) = 0 modulo the modulus of ``form``."""
    dW = coboundary_additive(omega_cochain(form))
    zero = canonicalize(0.0, form.modulus)
    worst, n, skipped = 0.0, 0, 0
    for t in triples:
        v = dW(*t)
        if v is UNDEFINED:
            skipped += 1
            continue
        n += 1
        worst = max(worst, v.distance(zero))
    return Verdict("cocycle_additive", worst < tol, worst, n, skipped)


def cocycle_suite(params: DeformationParams, samples: int, rng: np.random.Generator) -> list[Verdict]:
    backend = params.backend
    triples, rejected = sample_chains(backend, rng, samples, 3)
    add = check_additive_cocycle(params.form, triples)
    add.undefined += rejected
    mult = is_cocycle_multiplicative(weight_cochain(params), triples, tol=1e-9)
    mult.undefined += rejected
    return [add, mult]


# -- delta delta = 0 ------------------------------------------------------------------


def _features(backend, a) -> np.ndarray:
    if a is ZERO:
        return np.zeros(8)
    if isinstance(backend, UnitSphere):
        return np.concatenate([a.start.vec, a.end.vec, [0.0, 0.0]])
    return np.concatenate([a.start.frac, a.end.frac, np.array(a.cls, dtype=float), [0.0, 0.0]])


def random_path_cochain(backend, rng: np.random.Generator, arity: int, modulus: float = 0.0) -> Cochain:
    """A random smooth additive cochain on path classes."""
    W = rng.normal(size=(8 * arity, 6))
    b = rng.normal(size=6)
    c = rng.normal(scale=3.0, size=6)

    def F(*args):
        x = np.concatenate([_features(backend, a) for a in args])
        return float(np.sin(x @ W + b) @ c)

    return Cochain(arity, F, backend, modulus)


def delta_squared_suite(backend, form, samples: int, rng: np.random.Generator,
                        n_cochains: int = 100) -> list[Verdict]:
    """dd F = 0 for random 1- and 2-cochains and for omega-tilde on sampled chains."""
    quads, rej4 = sample_chains(backend, rng, samples, 4)
    triples = [q[:3] for q in quads]
    out = []
    for arity, tuples in ((1, triples), (2, quads)):
        worst, n, und = 0.0, 0, 0
        per = max(1, len(tuples) // n_cochains)
        for i in range(n_cochains):
            F = random_path_cochain(backend, rng, arity, form.modulus)
            chunk = tuples[(i * per) % len(tuples):][:per]
            w, k, u = delta_squared_residual(F, chunk)
            worst, n, und = max(worst, w), n + k, und + u
        out.append(Verdict(f"delta_squared_arity{arity}", worst < 1e-9, worst, n, und + rej4))
    w, n, u = delta_squared_residual(omega_cochain(form), quads)
    out.append(Verdict("delta_squared_omega", w < 1e-9, w, n, u + rej4))
    return out


def finite_delta_squared(monoid: FiniteMonoid, rng: np.random.Generator, n_cochains: int = 100,
                         modulus: float = 0.0) -> list[Verdict]:
    """Exhaustive dd F = 0 over all element tuples of a finite monoid."""
    import itertools

    out = []
    for arity in (1, 2):
        tuples = list(itertools.product(monoid.elements, repeat=arity + 2))
        worst, n, und = 0.0, 0, 0
        for _ in range(n_cochains):
            F = random_cochain(rng, monoid, arity, modulus)
            w, k, u = delta_squared_residual(F, tuples)
            worst, n, und = max(worst, w), n + k, und + u
        out.append(Verdict(f"delta_squared_arity{arity}", worst < 1e-9, worst, n, und))
    return out


# -- associativity --------------------------------------------------------------------


def _random_coeff(rng) -> complex:
    return complex(rng.normal(), rng.normal())


def associativity_suite(params: DeformationParams, samples: int, rng: np.random.Generator) -> Verdict:
    """(x*y)*z = x*(y*z) on two-term formal sums built around sampled chains."""
    backend = params.backend
    chains, rejected = sample_chains(backend, rng, samples, 3)
    worst, n, und = 0.0, 0, rejected
    for a, b, c in chains:
        # extra terms: one more path into a.end's start-chain, one leaving c.end
        a2 = backend.random_class(rng, backend.random_point(rng), b.start)
        c2 = backend.random_class(rng, c.start, backend.random_point(rng))
        if a2 is UNDEFINED or c2 is UNDEFINED:
            und += 1
            continue
        x = FormalSum([(a, _random_coeff(rng)), (a2, _random_coeff(rng))])
        y = FormalSum([(b, _random_coeff(rng))])
        z = FormalSum([(c, _random_coeff(rng)), (c2, _random_coeff(rng))])
        xy = star_product(params, x, y)
        yz = star_product(params, y, z)
        if isinstance(xy, UndefinedProduct) or isinstance(yz, UndefinedProduct):
            und += 1
            continue
        left = star_product(params, xy, z)
        right = star_product(params, x, yz)
        if isinstance(left, UndefinedProduct) or isinstance(right, UndefinedProduct):
            und += 1
            continue
        n += 1
        worst = max(worst, left.max_abs_diff(right))
    return Verdict("associativity", worst < 1e-9, worst, n, und)


# -- triviality -------------------------------------------------------------------------


def torus_triviality_suite(params: DeformationParams, samples: int, rng: np.random.Generator,
                           box: float = 3.0) -> Verdict:
    """dg = f for the global trivializer on random lifted (universal cover) pairs.

    dg is evaluated on the plane segments; f is evaluated on the torus after
    projecting both segments to path classes.
    """
    triv = global_trivializer_torus(params)
    worst = 0.0
    for _ in range(samples):
        P = rng.uniform(-box, box, size=2)
        Q = P + rng.uniform(-box, box, size=2)
        R = Q + rng.uniform(-box, box, size=2)
        a = CoverSegment(tuple(P), tuple(Q))
        b = CoverSegment(tuple(Q), tuple(R))
        dg = triv.coboundary(a, b)
        f = cover_weight(params, a, b)
        worst = max(worst, abs(dg - f) / abs(f))
    return Verdict("triviality_torus", worst < 1e-9, worst, samples, 0)


def _random_in_cap(rng: np.random.Generator, base: SpherePoint, radius: float) -> SpherePoint:
    z = rng.uniform(math.cos(radius), 1.0)
    phi = rng.uniform(0, 2 * math.pi)
    s = math.sqrt(max(0.0, 1 - z * z))
    local = np.array([s * math.cos(phi), s * math.sin(phi), z])
    # rotate the north pole onto base
    e3 = base.vec
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, e3)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    v = local[0] * e1 + local[1] * e2 + local[2] * e3
    v /= np.linalg.norm(v)
    return SpherePoint(*map(float, v))


def local_triviality_suite(params: DeformationParams, base, radius: float, samples: int,
                           rng: np.random.Generator, tol: float = 1e-8) -> Verdict:
    """dg = f for the cone trivializer on random pairs inside the ball."""
    backend = params.backend
    triv = local_trivializer(params, base, radius)
    worst, n, und = 0.0, 0, 0
    for _ in range(samples):
        if isinstance(backend, UnitSphere):
            p, q, r = (_random_in_cap(rng, base, radius) for _ in range(3))
            a, b = backend.path_class(p, q), backend.path_class(q, r)
        else:
            B = backend.lift(base)
            pts = []
            while len(pts) < 3:
                v = rng.uniform(-radius, radius, size=2)
                if np.hypot(*v) < radius:
                    pts.append(B + v)
            a = backend.class_between_lifts(pts[0], pts[1])
            b = backend.class_between_lifts(pts[1], pts[2])
        dg = triv.coboundary(a, b)
        f = weight_of_pair(params, a, b)
        if is_sentinel(dg) or is_sentinel(f):
            und += 1
            continue
        n += 1
        worst = max(worst, abs(dg - f) / abs(f))
    return Verdict("local_triviality", worst < tol, worst, n, und)


def unit_modulus_suite(params: DeformationParams, samples: int, rng: np.random.Generator) -> Verdict:
    pairs, rejected = sample_chains(params.backend, rng, samples, 2)
    worst = 0.0
    for a, b in pairs:
        w = weight_of_pair(params, a, b)
        worst = max(worst, abs(abs(w) - 1.0))
    return Verdict("unit_modulus", worst < 1e-9, worst, len(pairs), rejected)


# -- finite-monoid triviality ------------------------------------------------------------


def weights_cochain(monoid: FiniteMonoid, weights: dict[tuple[str, str], float]) -> Cochain:
    """Multiplicative 2-cochain from explicit weights; composable pairs default to 1."""
    vals = {}
    for a, b in monoid.composable_pairs():
        vals[(a, b)] = float(weights.get((a, b), 1.0))
    return table_cochain(vals, 2, monoid, kind="multiplicative")


def triviality_roundtrip(monoid: FiniteMonoid, rng: np.random.Generator, tol: float = 1e-9) -> Verdict:
    """Build f = dg0 from a random positive g0, solve, and check dg = f."""
    g0_vals = {e: float(np.exp(rng.normal())) for e in monoid.elements}
    g0 = table_cochain({(e,): v for e, v in g0_vals.items()}, 1, monoid, kind="multiplicative")
    f = coboundary_multiplicative(g0)
    g = solve_triviality(f, monoid)
    pairs = [p for p in monoid.composable_pairs() if monoid.product(*p) is not ZERO]
    if not g:
        return Verdict("solve_triviality", False, g.residual, len(pairs), 0, {"verdict": "not-trivial"})
    dg = coboundary_multiplicative(g)
    worst = max((abs(dg(a, b) - f(a, b)) / abs(f(a, b)) for a, b in pairs), default=0.0)
    return Verdict("solve_triviality", worst < tol, worst, len(pairs), 0, {"verdict": "trivial"})
