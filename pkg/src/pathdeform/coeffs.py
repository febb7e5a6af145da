"""Coefficient groups: reals modulo a modulus, and multiplicative weights.

An additive value lives in R/muR. ``mu == 0`` means plain R. Weights are
plain Python complex numbers; in the quantized case they have modulus one.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

DEFAULT_TOL = 1e-9

Weight = complex


@dataclass(frozen=True)
class ModReal:
    """An element of R/muR stored by its canonical representative.

    With ``modulus > 0`` the stored value lies in ``[0, modulus)``; build
    instances through :func:`canonicalize` to guarantee that.
    """

    value: float
    modulus: float = 0.0

    def __add__(self, other: "ModReal") -> "ModReal":
        return mod_add(self, other)

    def __sub__(self, other: "ModReal") -> "ModReal":
        return mod_add(self, mod_neg(other))

    def __neg__(self) -> "ModReal":
        return mod_neg(self)

    def __float__(self) -> float:
        return float(self.value)

    def distance(self, other: "ModReal") -> float:
        """Circular distance between two classes (plain distance when mu == 0)."""
        _check_same_modulus(self, other)
        d = abs(self.value - other.value)
        if self.modulus > 0:
            d = math.fmod(d, self.modulus)
            d = min(d, self.modulus - d)
        return d


def canonicalize(x: float, mu: float = 0.0) -> ModReal:
    if mu < 0:
        raise ValueError(f"modulus must be non-negative, got {mu!r}")
    x = float(x)
    if mu == 0:
        return ModReal(x, 0.0)
    r = math.fmod(x, mu)
    if r < 0:
        r += mu
    # fmod of a tiny negative number lands on mu after the shift
    if r >= mu:
        r = 0.0
    return ModReal(r, float(mu))


def _check_same_modulus(a: ModReal, b: ModReal) -> None:
    if a.modulus != b.modulus:
        raise ValueError(f"modulus mismatch: {a.modulus!r} vs {b.modulus!r}")


def mod_add(a: ModReal, b: ModReal) -> ModReal:
    _check_same_modulus(a, b)
    return canonicalize(a.value + b.value, a.modulus)


def mod_neg(a: ModReal) -> ModReal:
    return canonicalize(-a.value, a.modulus)


def mod_eq(a: ModReal, b: ModReal, tol: float = DEFAULT_TOL) -> bool:
    return a.distance(b) <= tol


def mod_sum(terms, mu: float = 0.0) -> ModReal:
    """Signed sum of ``(sign, ModReal)`` pairs, reduced once at the end."""
    total = math.fsum(s * t.value for s, t in terms)
    return canonicalize(total, mu)


@dataclass(frozen=True)
class Continuous:
    """Weight family exp(lam * x) for a modulus-zero form."""

    lam: complex = 0.0


@dataclass(frozen=True)
class Quantized:
    """Weight family exp(2 pi i n x / mu) for a form of positive modulus."""

    n: int = 0

    def __post_init__(self):
        if int(self.n) != self.n:
            raise ValueError(f"quantum number must be an integer, got {self.n!r}")


Mode = Union[Continuous, Quantized]


def exp_weight(params, x: ModReal) -> Weight:
    """Exponentiate an additive value into a multiplicative weight.

    ``params`` is a :class:`Continuous` / :class:`Quantized` mode or any
    object carrying one as ``.mode`` (e.g. ``DeformationParams``).
    """
    mode = getattr(params, "mode", params)
    if isinstance(mode, Continuous):
        if x.modulus != 0:
            raise ValueError("continuous weights need a modulus-zero value")
        return complex(cmath.exp(mode.lam * x.value))
    if isinstance(mode, Quantized):
        if x.modulus <= 0:
            raise ValueError("quantized weights need a positive modulus")
        return complex(cmath.exp(2j * math.pi * mode.n * x.value / x.modulus))
    raise TypeError(f"unknown deformation mode {mode!r}")
