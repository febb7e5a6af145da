"""Deformations of path algebras of the flat torus and the unit sphere."""
from .coeffs import Continuous, ModReal, Quantized, canonicalize, exp_weight, mod_add, mod_eq, mod_neg
from .deformation import (DeformationParams, global_trivializer_torus, local_trivializer, memory_function,
                          omega_tilde, star_product, weight_of_pair)
from .geometry import FlatTorus, Lattice, PathClass, PiecewisePath, TwoForm, UnitSphere
from .monoid import UNDEFINED, ZERO, Cochain, FiniteMonoid, FormalSum

__version__ = "0.1.0"
