import math

import numpy as np
import pytest

from oracles import (random_unit_vectors, shoelace, sphere_triangle_area_girard,
                     sphere_triangle_area_quadrature)
from pathdeform.coeffs import canonicalize, mod_eq
from pathdeform.geometry import (FlatTorus, Lattice, PiecewisePath, UnitSphere, angle_between,
                                 concat_classes, injectivity_radius, loop_area, reduce_to_class,
                                 shortest_geodesic, solid_angle, triangle_integral)
from pathdeform.monoid import UNDEFINED, ZERO

FOUR_PI = 4 * math.pi


@pytest.fixture
def torus():
    return FlatTorus()


@pytest.fixture
def sphere():
    return UnitSphere()


def rand_sphere_pts(sphere, rng, n):
    return [sphere.point(*v) for v in random_unit_vectors(rng, n)]


class TestConcat:
    def test_torus_adds_deck_vectors(self, torus):
        p, q, r = torus.point(0.1, 0.1), torus.point(0.5, 0.2), torus.point(0.3, 0.9)
        ab = concat_classes(torus.path_class(p, q, (1, 0)), torus.path_class(q, r, (0, 2)), torus)
        assert ab == torus.path_class(p, r, (1, 2))

    def test_mismatched_endpoints_give_zero(self, torus, sphere):
        p, q, r = torus.point(0.1, 0.1), torus.point(0.5, 0.2), torus.point(0.3, 0.9)
        assert torus.concat(torus.path_class(p, q), torus.path_class(r, p)) is ZERO
        N, X, Y = sphere.point(0, 0, 1), sphere.point(1, 0, 0), sphere.point(0, 1, 0)
        assert sphere.concat(sphere.path_class(N, X), sphere.path_class(Y, N)) is ZERO

    def test_antipodal_product_undefined(self, sphere):
        N, X, S = sphere.point(0, 0, 1), sphere.point(1, 0, 0), sphere.point(0, 0, -1)
        assert sphere.concat(sphere.path_class(N, X), sphere.path_class(X, S)) is UNDEFINED

    def test_antipodal_threshold(self, sphere):
        p = sphere.point(0, 0, 1)
        assert sphere.path_class(p, sphere.from_angles(math.pi - 1e-7, 0.0)) is UNDEFINED
        assert sphere.path_class(p, sphere.from_angles(math.pi - 1e-5, 0.0)) is not UNDEFINED

    def test_seam_offset_absorbed(self, torus):
        # a ends at u = 1 - 1e-15, which is the same point as u = 0
        p = torus.point(0.5, 0.5)
        a = torus.class_between_lifts(torus.lift(p), (1.0 - 1e-15, 0.5))
        b = torus.path_class(torus.point(0.0, 0.5), torus.point(0.25, 0.5))
        ab = torus.concat(a, b)
        assert ab is not ZERO
        assert np.allclose(torus.displacement(ab), [0.75, 0.0])

    def test_seam_snap_in_point(self, torus):
        assert torus.point(1.0, -1e-17) == torus.point(0.0, 0.0)

    def test_class_between_lifts_crosses_seam(self, torus):
        pc = torus.class_between_lifts((0.9, 0.5), (1.3, -0.2))
        assert torus.same_point(pc.start, torus.point(0.9, 0.5))
        assert torus.same_point(pc.end, torus.point(0.3, 0.8))
        assert pc.cls == (1, -1)
        assert np.allclose(torus.displacement(pc), [0.4, -0.7])


class TestShortestGeodesic:
    def test_torus_winding(self, torus):
        pc = torus.path_class(torus.point(0.1, 0.1), torus.point(0.2, 0.1), (1, 0))
        assert shortest_geodesic(pc, torus).length == pytest.approx(1.1)

    def test_sphere_quarter(self, sphere):
        pc = sphere.path_class(sphere.point(0, 0, 1), sphere.point(1, 0, 0))
        assert shortest_geodesic(pc, sphere).length == pytest.approx(math.pi / 2)

    def test_null_paths(self, torus, sphere):
        p = torus.point(0.3, 0.3)
        assert torus.shortest_geodesic(torus.path_class(p, p)).length == 0
        s = sphere.point(0.2, -0.4, 0.9)
        assert sphere.shortest_geodesic(sphere.path_class(s, s)).length == 0

    def test_sphere_endpoint_reproduced(self, sphere):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p, q = rand_sphere_pts(sphere, rng, 2)
            geo = sphere.shortest_geodesic(sphere.path_class(p, q))
            assert np.allclose(geo.end.vec, q.vec, atol=1e-12)

    def test_reversal_symmetry(self, torus, sphere):
        rng = np.random.default_rng(1)
        for _ in range(100):
            p, q = torus.random_point(rng), torus.random_point(rng)
            a = torus.random_class(rng, p, q)
            rev = torus.path_class(q, p, (-a.cls[0], -a.cls[1]))
            assert torus.shortest_geodesic(a).length == pytest.approx(torus.shortest_geodesic(rev).length,
                                                                       rel=1e-14)
            s, t = rand_sphere_pts(sphere, rng, 2)
            assert (sphere.shortest_geodesic(sphere.path_class(s, t)).length
                    == pytest.approx(sphere.shortest_geodesic(sphere.path_class(t, s)).length, rel=1e-14))

    def test_sphere_long_geodesic_subdivision(self, sphere):
        g = sphere.geodesic(sphere.point(1, 0, 0), (0, 1, 0), 1.9 * math.pi)
        verts = g.vertices()
        assert len(verts) == 5
        assert max(angle_between(a, b) for a, b in zip(verts, verts[1:])) <= math.pi / 2 + 1e-12

    def test_torus_distance_wraps(self, torus):
        assert torus.distance(torus.point(0.05, 0.5), torus.point(0.95, 0.5)) == pytest.approx(0.1)


class TestTriangleIntegral:
    def test_octant(self, sphere):
        form = sphere.area_form()
        v = triangle_integral(form, sphere.point(0, 0, 1), sphere.point(1, 0, 0), sphere.point(0, 1, 0))
        assert v.modulus == pytest.approx(FOUR_PI)
        assert v.value == pytest.approx(math.pi / 2, abs=1e-14)

    def test_torus_unit_triangle(self, torus):
        v = torus.triangle_integral(torus.area_form(), (0, 0), (1, 0), (0, 1))
        assert v.value == 0.5 and v.modulus == 0.0

    def test_torus_orientation_follows_lattice(self):
        flipped = FlatTorus(Lattice((0.0, 1.0), (1.0, 0.0)))
        assert flipped.signed_area((0, 0), (0, 1), (1, 0)) == 0.5

    def test_degenerate_is_exact_zero(self, torus, sphere):
        assert torus.signed_area((0.1, 0.2), (0.4, 0.5), (1.3, 1.4)) == 0.0
        p, q = sphere.point(0, 0, 1), sphere.point(1, 0, 0)
        r = sphere.shortest_geodesic(sphere.path_class(p, q)).point_at(0.3)
        assert solid_angle(p, r, q) == 0.0

    def test_edges_wrapping_great_circle(self, sphere):
        pts = [sphere.from_angles(math.pi / 2, 2 * math.pi * k / 3) for k in range(3)]
        assert solid_angle(*pts) == pytest.approx(2 * math.pi)

    def test_scale_and_modulus(self, sphere):
        form = sphere.area_form(-0.5)
        assert form.modulus == pytest.approx(2 * math.pi)
        v = form.backend.triangle_integral(form, sphere.point(0, 0, 1), sphere.point(1, 0, 0),
                                           sphere.point(0, 1, 0))
        assert mod_eq(v, canonicalize(-math.pi / 4, 2 * math.pi), 1e-12)

    @pytest.mark.parametrize("backend", ["torus", "sphere"])
    def test_alternating(self, backend, torus, sphere):
        rng = np.random.default_rng(2)
        if backend == "torus":
            form = torus.area_form(1.7)
            tris = [tuple(rng.uniform(-3, 3, size=2) for _ in range(3)) for _ in range(1000)]
        else:
            form = sphere.area_form()
            tris = [tuple(rand_sphere_pts(sphere, rng, 3)) for _ in range(1000)]
        back = form.backend
        zero = canonicalize(0.0, form.modulus)
        for p, q, r in tris:
            t = back.triangle_integral(form, p, q, r)
            for perm in ((q, p, r), (p, r, q), (r, q, p)):
                s = back.triangle_integral(form, *perm)
                assert (t + s).distance(zero) < 1e-9

    def test_fan_split(self, sphere):
        rng = np.random.default_rng(3)
        form = sphere.area_form()
        zero = canonicalize(0.0, FOUR_PI)
        for _ in range(1000):
            p, q, r, s = rand_sphere_pts(sphere, rng, 4)
            one = sphere.triangle_integral(form, p, q, r) + sphere.triangle_integral(form, p, r, s)
            two = sphere.triangle_integral(form, q, r, s) + sphere.triangle_integral(form, q, s, p)
            assert (one - two).distance(zero) < 1e-8

    def test_shoelace_cocycle(self, torus):
        rng = np.random.default_rng(4)
        O = (0.0, 0.0)
        for _ in range(1000):
            P, Q, R = (rng.uniform(-5, 5, size=2) for _ in range(3))
            lhs = torus.signed_area(O, Q, R) - torus.signed_area(O, P, R) + torus.signed_area(O, P, Q)
            assert lhs == pytest.approx(torus.signed_area(P, Q, R), abs=1e-12)
            assert torus.signed_area(P, Q, R) == pytest.approx(shoelace(P, Q, R), abs=1e-12)

    def test_quadrature_and_girard(self, sphere):
        rng = np.random.default_rng(5)
        for _ in range(5):
            p, q, r = random_unit_vectors(rng, 3)
            ours = solid_angle(p, q, r)
            assert ours == pytest.approx(sphere_triangle_area_quadrature(p, q, r), abs=1e-6)
            assert abs(ours) == pytest.approx(sphere_triangle_area_girard(p, q, r), abs=1e-9)

    def test_thin_triangle_relative_precision(self):
        eps = 1e-7
        p = np.array([0.0, 0.0, 1.0])
        q = np.array([math.sin(eps), 0.0, math.cos(eps)])
        r = np.array([0.0, math.sin(eps), math.cos(eps)])
        # right isosceles with legs eps: area ~ eps^2 / 2
        assert solid_angle(p, q, r) == pytest.approx(eps ** 2 / 2, rel=1e-6)


class TestLoopArea:
    def test_equator_loop_is_hemisphere(self, sphere):
        pts = [sphere.from_angles(math.pi / 2, k * math.pi / 2) for k in range(4)]
        assert canonicalize(loop_area(pts), FOUR_PI).value == pytest.approx(2 * math.pi)

    def test_matches_fan_of_triangles(self, sphere):
        rng = np.random.default_rng(6)
        for _ in range(100):
            p, q, r, s = rand_sphere_pts(sphere, rng, 4)
            direct = solid_angle(p, q, r) + solid_angle(p, r, s)
            v = canonicalize(loop_area([p, q, r, s]) - direct, FOUR_PI)
            assert min(v.value, FOUR_PI - v.value) < 1e-9


class TestInjectivityRadius:
    def test_values(self, torus, sphere):
        assert injectivity_radius(sphere) == math.pi
        assert injectivity_radius(torus) == 0.5
        assert FlatTorus(Lattice((2, 0), (0, 3))).injectivity_radius() == 1.0

    def test_reduction_needed(self):
        assert FlatTorus(Lattice((1, 0), (5, 0.2))).injectivity_radius() == pytest.approx(0.1)

    def test_degenerate_lattice(self):
        with pytest.raises(ValueError):
            Lattice((1, 2), (2, 4))


class TestReduceToClass:
    def test_collinear_torus_segments(self, torus):
        a = torus.class_between_lifts((0.1, 0.1), (0.5, 0.3))
        b = torus.class_between_lifts((0.5, 0.3), (1.3, 0.7))
        pc = reduce_to_class(PiecewisePath([a, b]), torus)
        assert np.allclose(torus.displacement(pc), [1.2, 0.6])
        assert pc.cls == (1, 0)

    def test_equator_in_four_arcs(self, sphere):
        pts = [sphere.from_angles(math.pi / 2, k * math.pi / 2) for k in range(5)]
        segs = [sphere.path_class(a, b) for a, b in zip(pts, pts[1:])]
        pc = reduce_to_class(PiecewisePath(segs), sphere)
        assert sphere.same_point(pc.start, pc.end)
        assert sphere.path_length(PiecewisePath(segs)) == pytest.approx(2 * math.pi)

    def test_torus_loop_winding_once(self, torus):
        p = torus.point(0.2, 0.6)
        segs = [torus.class_between_lifts((0.2 + 0.25 * i, 0.6), (0.45 + 0.25 * i, 0.6)) for i in range(4)]
        pc = reduce_to_class(PiecewisePath(segs), torus)
        assert torus.same_point(pc.start, p) and torus.same_point(pc.end, p)
        assert pc.cls == (1, 0)

    def test_refinement_invariant(self, torus):
        rng = np.random.default_rng(7)
        for _ in range(100):
            pts = [rng.uniform(-2, 2, size=2) for _ in range(4)]
            coarse = [torus.class_between_lifts(a, b) for a, b in zip(pts, pts[1:])]
            fine_pts = []
            for a, b in zip(pts, pts[1:]):
                fine_pts += [a, 0.3 * a + 0.7 * b]
            fine_pts.append(pts[-1])
            fine = [torus.class_between_lifts(a, b) for a, b in zip(fine_pts, fine_pts[1:])]
            c, f = torus.reduce_to_class(PiecewisePath(coarse)), torus.reduce_to_class(PiecewisePath(fine))
            assert torus.same_point(c.end, f.end) and c.cls == f.cls
            assert np.allclose(torus.displacement(c), torus.displacement(f), atol=1e-12)

    def test_gap_rejected(self, torus):
        a = torus.class_between_lifts((0.1, 0.1), (0.2, 0.2))
        b = torus.class_between_lifts((0.5, 0.5), (0.6, 0.6))
        with pytest.raises(ValueError):
            torus.reduce_to_class(PiecewisePath([a, b]))
