"""Exact verification toolkit for quantum principal bundles over finite quantum groups."""
from .scalars import CycScalar, cyc, as_scalar
from .linalg import Matrix, LinearMap
from .groups import FiniteGroup, cyclic_group, symmetric_group
from .hopf import Algebra, HopfAlgebra, function_algebra, group_algebra, check_hopf, haar
from .corep import Corep, irreducible_set, mor_space, decompose, tensor, conjugate, direct_sum
from .forms import PathCalculus
from .calculus import build_fodc, Exterior
from .bundle import (QPBundle, HorizontalModel, CovariantDerivative, matrix_algebra, point_bundle,
                     trivial_bundle, check_derivative, derivative_space)
from .assoc import SectionFrame, InducedConnection
from .functor import MorphismImage, ConjugateIso, TensorIso
from .reconstruct import Reconstruction
from .fileformat import load_scenario, parse_scenario, FormatError
from .suites import run_suite, SUITES

__version__ = "0.1.0"
