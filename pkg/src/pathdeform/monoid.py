"""Partial monoids with zero, their algebras, and monoid cochains.

A product is one of: an element, :data:`ZERO` (the absorbing zero of the
monoid, e.g. non-concatenable paths) or :data:`UNDEFINED` (the product is
left formally undefined, e.g. no unique shortest geodesic). Cochains follow
the same partiality: any evaluation that needs an undefined product is
itself :data:`UNDEFINED`.
"""
from __future__ import annotations

import enum
import functools
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Protocol, Sequence

import numpy as np

from .coeffs import ModReal, canonicalize


class Sentinel(enum.Enum):
    ZERO = "0"
    UNDEFINED = "?"

    def __repr__(self):
        return self.name


ZERO = Sentinel.ZERO
UNDEFINED = Sentinel.UNDEFINED


def is_sentinel(x: Any) -> bool:
    return isinstance(x, Sentinel)


class PartialMonoid(Protocol):
    def product(self, a, b): ...


def product_chain(monoid: PartialMonoid, elems: Sequence):
    """Left-to-right product of ``elems``; stops early on a sentinel."""
    acc = elems[0]
    for e in elems[1:]:
        if acc is UNDEFINED or e is UNDEFINED:
            return UNDEFINED
        if acc is ZERO or e is ZERO:
            acc = ZERO
            continue
        acc = monoid.product(acc, e)
    return acc


# -- finite partial monoids -------------------------------------------------


class MonoidFormatError(ValueError):
    pass


@dataclass
class FiniteMonoid:
    """A finite partial monoid given by its multiplication table.

    ``table`` maps ``(a, b)`` to an element name, ``ZERO`` or ``UNDEFINED``;
    missing pairs use ``default``.
    """

    elements: tuple[str, ...]
    table: dict[tuple[str, str], Any]
    default: Any = ZERO
    name: str = "finite"

    def product(self, a, b):
        if a is UNDEFINED or b is UNDEFINED:
            return UNDEFINED
        if a is ZERO or b is ZERO:
            return ZERO
        return self.table.get((a, b), self.default)

    def composable_pairs(self) -> list[tuple[str, str]]:
        out = []
        for a, b in itertools.product(self.elements, repeat=2):
            if not is_sentinel(self.product(a, b)):
                out.append((a, b))
        return out

    def associativity_violations(self) -> list[tuple[str, str, str]]:
        """Triples where both bracketings are defined and disagree."""
        bad = []
        for a, b, c in itertools.product(self.elements, repeat=3):
            left = self.product(self.product(a, b), c)
            right = self.product(a, self.product(b, c))
            if left is UNDEFINED or right is UNDEFINED:
                continue
            if left != right:
                bad.append((a, b, c))
        return bad

    @classmethod
    def from_dict(cls, data: Mapping, name: str = "finite") -> "FiniteMonoid":
        if not isinstance(data, Mapping):
            raise MonoidFormatError("fixture must be a JSON object")
        try:
            elements = tuple(str(e) for e in data["elements"])
            raw = data["table"]
        except (KeyError, TypeError) as exc:
            raise MonoidFormatError(f"fixture needs 'elements' and 'table': {exc}") from None
        if not isinstance(raw, Mapping):
            raise MonoidFormatError("'table' must be an object")
        for e in elements:
            if e in ("0", "?") or "," in e:
                raise MonoidFormatError(f"reserved or invalid element name {e!r}")
        if len(set(elements)) != len(elements):
            raise MonoidFormatError("duplicate element names")

        def decode(key, value):
            if value == "0":
                return ZERO
            if value == "?":
                return UNDEFINED
            if value not in elements:
                raise MonoidFormatError(f"table key {key!r}: unknown product {value!r}")
            return value

        default = ZERO
        table = {}
        for key, value in raw.items():
            if key == "default":
                default = decode(key, value)
                continue
            parts = key.split(",")
            if len(parts) != 2 or any(p.strip() not in elements for p in parts):
                raise MonoidFormatError(f"table key {key!r}: expected 'a,b' with known elements")
            table[(parts[0].strip(), parts[1].strip())] = decode(key, value)
        return cls(elements, table, default, name)

    @classmethod
    def from_json(cls, path) -> "FiniteMonoid":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise MonoidFormatError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data, name=path.stem)

    def to_dict(self) -> dict:
        enc = lambda v: v.value if is_sentinel(v) else v
        table = {f"{a},{b}": enc(v) for (a, b), v in self.table.items()}
        table["default"] = enc(self.default)
        return {"elements": list(self.elements), "table": table}


def quiver_a2() -> FiniteMonoid:
    """Path monoid of the quiver 1 --a--> 2 (idempotents e1, e2 and arrow a)."""
    table = {("e1", "e1"): "e1", ("e1", "a"): "a", ("a", "e2"): "a", ("e2", "e2"): "e2"}
    return FiniteMonoid(("e1", "e2", "a"), table, ZERO, "quiver_a2")


def quiver_path_monoid(n_vertices: int, arrows: Sequence[tuple[int, int]], max_elements: int | None = None,
                       name: str = "quiver") -> FiniteMonoid:
    """Path monoid (with zero) of an acyclic quiver, paths composed left to right."""
    paths: list[tuple[int, ...]] = [(v,) for v in range(n_vertices)]
    frontier = [(s, t) for s, t in arrows]
    seen = set(paths)
    while frontier:
        nxt = []
        for p in frontier:
            if p in seen:
                continue
            seen.add(p)
            paths.append(p)
            for s, t in arrows:
                if s == p[-1]:
                    nxt.append(p + (t,))
        frontier = nxt
    if max_elements is not None:
        paths = paths[:max_elements]
    names = {p: (f"e{p[0]}" if len(p) == 1 else "p" + "".join(map(str, p))) for p in paths}
    table = {}
    for p, q in itertools.product(paths, repeat=2):
        if p[-1] != q[0]:
            continue
        r = p + q[1:] if len(q) > 1 else p
        if len(p) == 1:
            r = q
        table[(names[p], names[q])] = names[r] if r in names else UNDEFINED
    return FiniteMonoid(tuple(names[p] for p in paths), table, ZERO, name)


def random_finite_monoid(rng: np.random.Generator, max_elements: int = 6, hole_rate: float = 0.1) -> FiniteMonoid:
    """A random associative partial monoid with at most ``max_elements`` elements.

    Drawn from a few associative families; a fraction ``hole_rate`` of the
    defined products is then marked undefined.
    """
    kind = rng.choice(["quiver", "cyclic", "band", "truncated", "null"])
    if kind == "quiver":
        nv = int(rng.integers(1, 4))
        arrows = [(s, t) for s in range(nv) for t in range(s + 1, nv) if rng.random() < 0.7]
        m = quiver_path_monoid(nv, arrows, max_elements, name="random_quiver")
    elif kind == "cyclic":
        k = int(rng.integers(1, max_elements + 1))
        els = tuple(f"g{i}" for i in range(k))
        m = FiniteMonoid(els, {(f"g{i}", f"g{j}"): f"g{(i + j) % k}" for i in range(k) for j in range(k)},
                         ZERO, "random_cyclic")
    elif kind == "band":
        # rectangular band (i, j)(k, l) = (i, l)
        r = int(rng.integers(1, 3))
        c = int(rng.integers(1, 4))
        cells = [(i, j) for i in range(r) for j in range(c)][:max_elements]
        nm = {cell: f"b{cell[0]}{cell[1]}" for cell in cells}
        table = {}
        for x, y in itertools.product(cells, repeat=2):
            z = (x[0], y[1])
            table[(nm[x], nm[y])] = nm.get(z, UNDEFINED)
        m = FiniteMonoid(tuple(nm.values()), table, ZERO, "random_band")
    elif kind == "truncated":
        # x, x^2, ..., x^k with x^j = 0 for j > k
        k = int(rng.integers(1, max_elements + 1))
        els = tuple(f"x{i}" for i in range(1, k + 1))
        table = {(f"x{i}", f"x{j}"): f"x{i + j}" for i in range(1, k + 1) for j in range(1, k + 1) if i + j <= k}
        m = FiniteMonoid(els, table, ZERO, "random_truncated")
    else:
        k = int(rng.integers(1, max_elements + 1))
        m = FiniteMonoid(tuple(f"z{i}" for i in range(k)), {}, ZERO, "random_null")

    if hole_rate > 0:
        for key, val in list(m.table.items()):
            if not is_sentinel(val) and rng.random() < hole_rate:
                m.table[key] = UNDEFINED
    return m


# -- cochains ----------------------------------------------------------------


@dataclass(frozen=True)
class Cochain:
    """An ``arity``-cochain on a partial monoid.

    ``func`` takes ``arity`` monoid elements and returns a value or
    :data:`UNDEFINED`. Additive cochains produce :class:`ModReal` values
    reduced by ``modulus``; multiplicative ones produce complex weights.
    """

    arity: int
    func: Callable[..., Any]
    monoid: PartialMonoid
    modulus: float = 0.0
    kind: str = "additive"

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("there are no 0-cochains")
        if self.kind not in ("additive", "multiplicative"):
            raise ValueError(f"unknown cochain kind {self.kind!r}")

    def __call__(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"{self.arity}-cochain called with {len(args)} arguments")
        if any(a is UNDEFINED for a in args):
            return UNDEFINED
        v = self.func(*args)
        if is_sentinel(v):
            return v
        if self.kind == "additive":
            raw = v.value if isinstance(v, ModReal) else float(v)
            return canonicalize(raw, self.modulus)
        return complex(v)


def table_cochain(values: Mapping[tuple, float], arity: int, monoid: PartialMonoid, modulus: float = 0.0,
                  kind: str = "additive") -> Cochain:
    """Cochain backed by an explicit lookup table; missing tuples are undefined."""
    data = dict(values)
    return Cochain(arity, lambda *a: data.get(tuple(a), UNDEFINED), monoid, modulus, kind)


def random_cochain(rng: np.random.Generator, monoid: FiniteMonoid, arity: int, modulus: float = 0.0,
                   scale: float = 10.0) -> Cochain:
    """Random additive cochain on all tuples of elements, including ZERO."""
    support = list(monoid.elements) + [ZERO]
    vals = {t: float(rng.normal(scale=scale)) for t in itertools.product(support, repeat=arity)}
    return table_cochain(vals, arity, monoid, modulus)


def coboundary_additive(F: Cochain) -> Cochain:
    """The coboundary of an additive n-cochain, an (n+1)-cochain.

    dF(a1..a_{n+1}) = F(a2..) + sum_i (-1)^i F(.., a_i a_{i+1}, ..) + (-1)^{n+1} F(a1..a_n)
    """
    if F.kind != "additive":
        raise ValueError("coboundary_additive needs an additive cochain")
    n = F.arity
    monoid = F.monoid

    def dF(*a):
        terms = [(1, F(*a[1:]))]
        for i in range(n):
            prod = monoid.product(a[i], a[i + 1])
            if prod is UNDEFINED:
                return UNDEFINED
            terms.append(((-1) ** (i + 1), F(*a[:i], prod, *a[i + 2:])))
        terms.append(((-1) ** (n + 1), F(*a[:n])))
        if any(t is UNDEFINED for _, t in terms):
            return UNDEFINED
        return math.fsum(s * t.value for s, t in terms)

    return Cochain(n + 1, dF, monoid, F.modulus, "additive")


def coboundary_multiplicative(g: Cochain) -> Cochain:
    """(dg)(a, b) = g(a) g(b) / g(ab) for a 1-cochain of nonzero weights."""
    if g.arity != 1 or g.kind != "multiplicative":
        raise ValueError("coboundary_multiplicative needs a multiplicative 1-cochain")
    monoid = g.monoid

    def dg(a, b):
        ab = monoid.product(a, b)
        if is_sentinel(ab):
            return ab
        ga, gb, gab = g(a), g(b), g(ab)
        if any(is_sentinel(v) for v in (ga, gb, gab)):
            return UNDEFINED
        return ga * gb / gab

    return Cochain(2, dg, monoid, 0.0, "multiplicative")


def exp_cochain(F: Cochain, weight: Callable[[ModReal], complex]) -> Cochain:
    """Pointwise exponential of an additive cochain into a multiplicative one."""
    def f(*a):
        v = F(*a)
        return v if is_sentinel(v) else weight(v)

    return Cochain(F.arity, f, F.monoid, 0.0, "multiplicative")


# -- verdicts ----------------------------------------------------------------


@dataclass
class Verdict:
    """Outcome of a sampled identity check."""

    name: str
    passed: bool
    residual: float
    samples: int
    undefined: int = 0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name}: {status} residual={self.residual:.3e} "
                f"samples={self.samples} undefined={self.undefined}")


def is_cocycle_multiplicative(f: Cochain, triples: Iterable[tuple], tol: float = 1e-9,
                              name: str = "cocycle_multiplicative") -> Verdict:
    """Check f(a,b) f(ab,c) = f(b,c) f(a,bc) on each triple (relative error)."""
    monoid = f.monoid
    worst = 0.0
    n = skipped = 0
    worst_triple = None
    for a, b, c in triples:
        ab = monoid.product(a, b)
        bc = monoid.product(b, c)
        if is_sentinel(ab) or is_sentinel(bc):
            skipped += 1
            continue
        vals = (f(a, b), f(ab, c), f(b, c), f(a, bc))
        if any(is_sentinel(v) for v in vals):
            skipped += 1
            continue
        lhs = vals[0] * vals[1]
        rhs = vals[2] * vals[3]
        err = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
        n += 1
        if err > worst:
            worst, worst_triple = err, (a, b, c)
    return Verdict(name, worst <= tol, worst, n, skipped, {"worst_triple": worst_triple})


def delta_squared_residual(F: Cochain, tuples: Iterable[tuple]) -> tuple[float, int, int]:
    """Worst |ddF| (circular, mod the cochain modulus) over the given tuples.

    Returns ``(worst, evaluated, undefined)``.
    """
    dF = coboundary_additive(F)
    # the outer coboundary revisits the same inner tuples many times
    dF = replace(dF, func=functools.cache(dF.func))
    ddF = coboundary_additive(dF)
    zero = canonicalize(0.0, F.modulus)
    worst = 0.0
    n = skipped = 0
    for t in tuples:
        v = ddF(*t)
        if v is UNDEFINED:
            skipped += 1
            continue
        n += 1
        worst = max(worst, v.distance(zero))
    return worst, n, skipped


# -- formal sums and the deformed product -------------------------------------


class FormalSum(Mapping):
    """A finite linear combination of monoid elements with complex coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Hashable, complex] | Iterable[tuple[Hashable, complex]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for basis, coeff in items:
            if basis is ZERO:
                continue
            if is_sentinel(basis):
                raise ValueError("formal sums cannot contain UNDEFINED")
            acc[basis] = acc.get(basis, 0) + complex(coeff)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    @classmethod
    def basis(cls, element, coeff: complex = 1.0) -> "FormalSum":
        return cls({element: coeff})

    def __getitem__(self, key):
        return self._terms[key]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __repr__(self):
        return f"FormalSum({self._terms!r})"

    def __add__(self, other: "FormalSum") -> "FormalSum":
        return FormalSum(itertools.chain(self.items(), other.items()))

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-1) * other

    def __rmul__(self, scalar: complex) -> "FormalSum":
        return FormalSum((k, scalar * v) for k, v in self.items())

    def max_abs_diff(self, other: "FormalSum") -> float:
        keys = set(self) | set(other)
        return max((abs(self.get(k, 0) - other.get(k, 0)) for k in keys), default=0.0)


@dataclass(frozen=True)
class UndefinedProduct:
    """Result of a deformed product that hit undefined basis products."""

    pairs: tuple

    def __bool__(self):
        return False


def deformed_product(x: FormalSum, y: FormalSum, f: Cochain | None, monoid: PartialMonoid | None = None):
    """Bilinear extension of a*b = f(a,b) ab; ``f=None`` gives the undeformed product."""
    monoid = monoid if monoid is not None else f.monoid
    out: list = []
    bad = []
    for a, alpha in x.items():
        for b, beta in y.items():
            ab = monoid.product(a, b)
            if ab is ZERO:
                continue
            if ab is UNDEFINED:
                bad.append((a, b))
                continue
            w = 1.0 if f is None else f(a, b)
            if is_sentinel(w):
                bad.append((a, b))
                continue
            out.append((ab, alpha * beta * w))
    if bad:
        return UndefinedProduct(tuple(bad))
    return FormalSum(out)


# -- triviality on finite monoids ----------------------------------------------


@dataclass(frozen=True)
class NotTrivial:
    residual: float

    def __bool__(self):
        return False


def solve_triviality(f: Cochain, monoid: FiniteMonoid, tol: float = 1e-8):
    """Look for g with dg = f by least squares on log f = d(log g).

    ``f`` must be positive-real valued on every composable pair. Returns a
    multiplicative 1-cochain ``g`` (one of many: constants per component are
    free) or :class:`NotTrivial` carrying the least-squares residual.
    """
    elems = list(monoid.elements)
    index = {e: i for i, e in enumerate(elems)}
    rows, rhs = [], []
    for a, b in monoid.composable_pairs():
        ab = monoid.product(a, b)
        if ab is ZERO:
            continue
        v = f(a, b)
        if is_sentinel(v):
            continue
        v = complex(v)
        if v.real <= 0 or abs(v.imag) > 1e-12 * abs(v):
            raise ValueError(f"f({a},{b}) = {v} is not a positive real")
        row = np.zeros(len(elems))
        row[index[a]] += 1.0
        row[index[b]] += 1.0
        row[index[ab]] -= 1.0
        rows.append(row)
        rhs.append(math.log(v.real))
    if not rows:
        sol = np.zeros(len(elems))
        residual = 0.0
    else:
        A = np.array(rows)
        y = np.array(rhs)
        sol, *_ = np.linalg.lstsq(A, y, rcond=None)
        residual = float(np.max(np.abs(A @ sol - y)))
    if residual > tol:
        return NotTrivial(residual)
    values = {e: math.exp(sol[index[e]]) for e in elems}
    return Cochain(1, lambda a: values.get(a, UNDEFINED), monoid, 0.0, "multiplicative")
