"""Graded linear algebra over F_p: cohomology of line-bundle complexes, point ideals, interpolation."""

from .cohomology import (
    CohomologyReport,
    LineComplex,
    cohomology_of_length2,
    cohomology_of_presentation,
    hypercohomology,
    line_cohomology,
    sheaf_cohomology,
    tensor_cohomology,
    tensor_complex,
)
from .field import DEFAULT_PRIME, check_prime
from .ideals import (
    euler_presentation,
    hilbert_burch,
    maximal_minors,
    qk_matrix,
    qk_shape,
    resolution_of_ideal,
    tangent_section_zero_locus,
)
from .interpolation import (
    InterpolationResult,
    minimal_k,
    qk_section_count,
    verify_interpolation_tangential,
    verify_interpolation_triangular,
)
from .matrix import GradedMatrix, NotAComplex, NotGenericMatrix, induced_h0, induced_h2
from .points import (
    Infeasible,
    PointConfig,
    RetryWithNewSeed,
    hilbert_function,
    ideal_betti,
    ideal_resolution,
    sample_points,
)
from .poly import Poly

__all__ = [
    "CohomologyReport",
    "DEFAULT_PRIME",
    "GradedMatrix",
    "Infeasible",
    "InterpolationResult",
    "LineComplex",
    "NotAComplex",
    "NotGenericMatrix",
    "PointConfig",
    "Poly",
    "RetryWithNewSeed",
    "check_prime",
    "cohomology_of_length2",
    "cohomology_of_presentation",
    "euler_presentation",
    "hilbert_burch",
    "hilbert_function",
    "hypercohomology",
    "ideal_betti",
    "ideal_resolution",
    "induced_h0",
    "induced_h2",
    "line_cohomology",
    "maximal_minors",
    "minimal_k",
    "qk_matrix",
    "qk_section_count",
    "qk_shape",
    "resolution_of_ideal",
    "sample_points",
    "sheaf_cohomology",
    "tangent_section_zero_locus",
    "tensor_cohomology",
    "tensor_complex",
    "verify_interpolation_tangential",
    "verify_interpolation_triangular",
]
