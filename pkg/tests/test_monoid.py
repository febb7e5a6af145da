import itertools
import json
import math

import numpy as np
import pytest

from pathdeform.monoid import (UNDEFINED, ZERO, Cochain, FiniteMonoid, FormalSum, MonoidFormatError, NotTrivial,
                               UndefinedProduct, coboundary_additive, coboundary_multiplicative,
                               deformed_product, delta_squared_residual, exp_cochain, is_cocycle_multiplicative,
                               quiver_a2, quiver_path_monoid, random_cochain, random_finite_monoid,
                               solve_triviality, table_cochain)


@pytest.fixture
def a2():
    return quiver_a2()


def mult_table(monoid, values):
    return table_cochain(values, len(next(iter(values))), monoid, kind="multiplicative")


def all_triples(monoid):
    return list(itertools.product(monoid.elements, repeat=3))


class TestFiniteMonoid:
    def test_products(self, a2):
        assert a2.product("e1", "a") == "a"
        assert a2.product("a", "e1") is ZERO
        assert a2.product(ZERO, "a") is ZERO
        assert a2.product(UNDEFINED, "a") is UNDEFINED

    def test_json_roundtrip(self, a2, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(a2.to_dict()))
        m = FiniteMonoid.from_json(path)
        for x, y in itertools.product(a2.elements, repeat=2):
            assert m.product(x, y) == a2.product(x, y)

    def test_question_mark_is_undefined(self):
        m = FiniteMonoid.from_dict({"elements": ["x"], "table": {"x,x": "?"}})
        assert m.product("x", "x") is UNDEFINED

    def test_default_fallback(self):
        m = FiniteMonoid.from_dict({"elements": ["x", "y"], "table": {"x,x": "x", "default": "?"}})
        assert m.product("x", "y") is UNDEFINED

    @pytest.mark.parametrize("table,needle", [
        ({"x,z": "x"}, "x,z"),
        ({"x": "x"}, "'x'"),
        ({"x,x": "w"}, "x,x"),
    ])
    def test_malformed_key_named(self, table, needle):
        with pytest.raises(MonoidFormatError, match=needle):
            FiniteMonoid.from_dict({"elements": ["x"], "table": table})

    def test_reserved_names(self):
        with pytest.raises(MonoidFormatError):
            FiniteMonoid.from_dict({"elements": ["0"], "table": {}})

    @pytest.mark.parametrize("seed", range(40))
    def test_random_monoids_associative(self, seed):
        m = random_finite_monoid(np.random.default_rng(seed))
        assert 1 <= len(m.elements) <= 6
        assert m.associativity_violations() == []

    def test_quiver_a3_composites(self):
        m = quiver_path_monoid(3, [(0, 1), (1, 2)])
        assert m.product("p01", "p12") == "p012"
        assert m.product("e0", "p012") == "p012"
        assert m.product("p12", "p01") is ZERO


class TestCoboundary:
    def test_degree_one_formula(self, a2):
        G = table_cochain({("e1",): 1.0, ("e2",): 2.0, ("a",): 5.0, (ZERO,): 0.0}, 1, a2)
        dG = coboundary_additive(G)
        # G(a) - G(e1 a) + G(e1) = 5 - 5 + 1
        assert dG("e1", "a").value == pytest.approx(1.0)
        # non-composable: G(e1) - G(0) + G(a)
        assert dG("a", "e1").value == pytest.approx(6.0)

    def test_zero_cochain(self, a2):
        F = Cochain(2, lambda a, b: 0.0, a2)
        dF = coboundary_additive(F)
        assert all(dF(*t).value == 0.0 for t in itertools.product(a2.elements, repeat=3))

    def test_undefined_propagates(self):
        m = FiniteMonoid(("x",), {("x", "x"): UNDEFINED})
        F = random_cochain(np.random.default_rng(0), m, 1)
        assert coboundary_additive(F)("x", "x") is UNDEFINED

    @pytest.mark.parametrize("seed", range(20))
    def test_delta_squared_random_monoids(self, seed):
        rng = np.random.default_rng(seed)
        m = random_finite_monoid(rng)
        for arity in (1, 2):
            tuples = list(itertools.product(m.elements, repeat=arity + 2))
            for _ in range(5):
                worst, n, _ = delta_squared_residual(random_cochain(rng, m, arity), tuples)
                assert worst < 1e-9

    def test_delta_squared_with_modulus(self, a2):
        rng = np.random.default_rng(1)
        F = random_cochain(rng, a2, 2, modulus=4 * math.pi)
        worst, n, _ = delta_squared_residual(F, itertools.product(a2.elements, repeat=4))
        assert n == 81 and worst < 1e-9

    def test_multiplicative_of_one(self, a2):
        one = mult_table(a2, {(e,): 1.0 for e in a2.elements})
        d = coboundary_multiplicative(one)
        assert all(d(x, y) == 1 for x, y in a2.composable_pairs())

    def test_multiplicative_matches_exp_of_additive(self, a2):
        rng = np.random.default_rng(5)
        vals = {(e,): float(rng.normal()) for e in a2.elements}
        G = table_cochain(vals, 1, a2)
        g = exp_cochain(G, lambda v: math.exp(v.value))
        d_mult = coboundary_multiplicative(g)
        d_add = coboundary_additive(G)
        for x, y in a2.composable_pairs():
            assert d_mult(x, y) == pytest.approx(math.exp(d_add(x, y).value), rel=1e-12)


class TestCocycleCheck:
    def test_coboundary_is_cocycle(self, a2):
        rng = np.random.default_rng(2)
        g = mult_table(a2, {(e,): float(np.exp(rng.normal())) for e in a2.elements})
        v = is_cocycle_multiplicative(coboundary_multiplicative(g), all_triples(a2))
        assert v.passed and v.residual < 1e-12
        # composable triples of A2: (e1,e1,e1) (e1,e1,a) (e1,a,e2) (a,e2,e2) (e2,e2,e2)
        assert v.samples == 5

    def test_constant_one(self, a2):
        f = mult_table(a2, {p: 1.0 for p in a2.composable_pairs()})
        assert is_cocycle_multiplicative(f, all_triples(a2)).passed

    def test_detects_non_cocycle(self, a2):
        vals = {p: 1.0 for p in a2.composable_pairs()}
        vals[("e1", "a")] = 2.0
        v = is_cocycle_multiplicative(mult_table(a2, vals), all_triples(a2))
        assert not v.passed
        # (e1,e1,a): f(e1,e1) f(e1,a) = 2 against f(e1,a) f(e1,a) = 4
        assert v.residual == pytest.approx(0.5)


class TestSolveTriviality:
    def test_one(self, a2):
        f = mult_table(a2, {p: 1.0 for p in a2.composable_pairs()})
        g = solve_triviality(f, a2)
        assert all(g(e) == pytest.approx(1.0) for e in a2.elements)

    @pytest.mark.parametrize("seed", range(10))
    def test_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        m = random_finite_monoid(rng, hole_rate=0.0)
        g0 = mult_table(m, {(e,): float(np.exp(rng.normal())) for e in m.elements})
        f = coboundary_multiplicative(g0)
        g = solve_triviality(f, m)
        assert g
        dg = coboundary_multiplicative(g)
        for x, y in m.composable_pairs():
            if m.product(x, y) is ZERO:
                continue
            assert dg(x, y) == pytest.approx(f(x, y), rel=1e-9)

    def test_weight_on_arrow_alone_is_not_trivial(self, a2):
        vals = {p: 1.0 for p in a2.composable_pairs()}
        vals[("e1", "a")] = 2.0
        res = solve_triviality(mult_table(a2, vals), a2)
        assert isinstance(res, NotTrivial)
        assert res.residual > 1e-8

    def test_weight_on_first_vertex_is_trivial(self, a2):
        # hand solve: log g(e1) = log 2 from (e1,e1) and (e1,a); g(e2) = 1; g(a) free
        vals = {p: 1.0 for p in a2.composable_pairs()}
        vals[("e1", "e1")] = vals[("e1", "a")] = 2.0
        g = solve_triviality(mult_table(a2, vals), a2)
        assert g("e1") == pytest.approx(2.0)
        assert g("e2") == pytest.approx(1.0)

    def test_rejects_non_positive(self, a2):
        f = mult_table(a2, {p: -1.0 for p in a2.composable_pairs()})
        with pytest.raises(ValueError):
            solve_triviality(f, a2)


class TestFormalSum:
    def test_zero_terms_dropped(self):
        s = FormalSum([("a", 1.0), ("a", -1.0), ("b", 2.0), (ZERO, 5.0)])
        assert dict(s) == {"b": 2.0}

    def test_linear_ops(self):
        s = FormalSum({"a": 1.0}) + 2 * FormalSum({"a": 1.0, "b": 1j})
        assert dict(s) == {"a": 3.0, "b": 2j}


class TestDeformedProduct:
    def test_undeformed(self, a2):
        x = FormalSum({"e1": 1.0, "a": 2.0})
        y = FormalSum({"a": 1.0, "e2": 3.0})
        assert dict(deformed_product(x, y, None, a2)) == {"a": 1.0 + 6.0}

    def test_single_and_bilinear(self, a2):
        f = mult_table(a2, {p: (0.5 if p == ("e1", "a") else 1.0) for p in a2.composable_pairs()})
        assert dict(deformed_product(FormalSum({"e1": 1}), FormalSum({"a": 1}), f)) == {"a": 0.5}
        assert dict(deformed_product(FormalSum({"e1": 2}), FormalSum({"a": 3j}), f)) == {"a": 3j}

    def test_undefined_pairs_reported(self):
        m = FiniteMonoid(("x", "y"), {("x", "y"): UNDEFINED, ("x", "x"): "x"})
        out = deformed_product(FormalSum({"x": 1}), FormalSum({"x": 1, "y": 1}), None, m)
        assert isinstance(out, UndefinedProduct)
        assert out.pairs == (("x", "y"),)

    @pytest.mark.parametrize("seed", range(10))
    def test_associative_for_cocycle(self, seed):
        rng = np.random.default_rng(seed)
        m = random_finite_monoid(rng, hole_rate=0.0)
        g = mult_table(m, {(e,): complex(np.exp(rng.normal() + 1j * rng.normal())) for e in m.elements})
        f = coboundary_multiplicative(g)

        def rand_sum():
            return FormalSum((e, complex(*rng.normal(size=2))) for e in m.elements)

        x, y, z = rand_sum(), rand_sum(), rand_sum()
        left = deformed_product(deformed_product(x, y, f), z, f)
        right = deformed_product(x, deformed_product(y, z, f), f)
        assert left.max_abs_diff(right) < 1e-9

    def test_bilinear_mixing(self, a2):
        rng = np.random.default_rng(9)
        f = mult_table(a2, {p: float(np.exp(rng.normal())) for p in a2.composable_pairs()})
        x1, x2 = FormalSum({"e1": 1.0, "a": 2.0}), FormalSum({"e1": -1j})
        y = FormalSum({"a": 0.5, "e2": 1.5})
        s, t = 2 - 1j, 0.25j
        lhs = deformed_product(s * x1 + t * x2, y, f)
        rhs = s * deformed_product(x1, y, f) + t * deformed_product(x2, y, f)
        assert lhs.max_abs_diff(rhs) < 1e-12
