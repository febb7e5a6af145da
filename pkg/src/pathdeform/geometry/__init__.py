"""Manifold backends: the flat torus and the unit sphere."""
from .common import PathClass, PiecewisePath, TwoForm
from .sphere import SphereGeodesic, SpherePoint, UnitSphere, angle_between, loop_area, solid_angle
from .torus import CoverSegment, FlatTorus, Lattice, TorusGeodesic, TorusPoint


def concat_classes(a: PathClass, b: PathClass, backend):
    return backend.concat(a, b)


def shortest_geodesic(pc: PathClass, backend):
    return backend.shortest_geodesic(pc)


def triangle_integral(form: TwoForm, p, q, r):
    return form.backend.triangle_integral(form, p, q, r)


def injectivity_radius(backend, p=None) -> float:
    return backend.injectivity_radius(p)


def reduce_to_class(path: PiecewisePath, backend):
    return backend.reduce_to_class(path)


__all__ = [
    "CoverSegment", "FlatTorus", "Lattice", "PathClass", "PiecewisePath", "SphereGeodesic",
    "SpherePoint", "TorusGeodesic", "TorusPoint", "TwoForm", "UnitSphere", "angle_between",
    "concat_classes", "injectivity_radius", "loop_area", "reduce_to_class", "shortest_geodesic",
    "solid_angle", "triangle_integral",
]
