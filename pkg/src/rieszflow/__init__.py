"""rieszflow: cone subequations, hyperbolic operators, plane families and the
tangential blow-up flow, with a seeded experiment CLI."""

from .linalg import (
    ComplexStructure,
    QuaternionStructure,
    eigenvalues_sorted,
    hermitian_part_complex,
    hermitian_part_quaternionic,
    projector,
    skew_hermitian_eigenvalue_pairs,
    trace_on_plane,
)
from .subeq import (
    RieszCharacteristic,
    Subequation,
    dual,
    dual_member,
    expand,
    member,
    minmax,
    min2,
    orphant,
    pconvex,
    predicted_expansion_characteristic,
    riesz_decreasing,
    riesz_increasing,
    trace_cone,
)
from .garding import (
    GardingOperator,
    HyperbolicityViolation,
    certify_garding,
    garding_eigenvalues,
)
from .grassmann import PlaneFamily, intersection_dim, sample_plane, transitivity_check
from .fields import ScalarField, catalog_field, parse_field_expression
from .flow import FlowSchedule, density, flow_rescale, riesz_kernel, tangent_convergence
from .sphjet import SphericalJet, assemble_phi, fd_cross_check, jet_from_function

__version__ = "0.1.0"
