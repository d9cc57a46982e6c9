"""Flat-ring cyclide coordinates, simply-periodic Lame functions, and
expansions of the fundamental solution of the 3-D Laplace equation."""

__version__ = "0.1.0"

from .coords import (
    AlgebraicFlatRing,
    CartesianPoint,
    FlatRingPoint,
    ToroidalPoint,
    Variant,
    algebraic_to_cartesian,
    cartesian_to_algebraic,
    cartesian_to_flatring,
    cartesian_to_toroidal,
    chi_cylindrical,
    chi_flatring,
    coordinate_surface_residual,
    flatring_to_cartesian,
    metric_h,
    toroidal_to_cartesian,
)
from .dirichlet import (
    BoundaryData,
    CoefficientTable,
    FlatRingDomain,
    coefficients,
    external_from_boundary,
    solve_interior,
    solve_point_source,
)
from .elliptic import (
    JacobiImag,
    JacobiTriple,
    Modulus,
    complete_k,
    glaisher,
    jacobi_imag,
    jacobi_real,
    ns2_series_coeffs,
)
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    OrderingError,
    PoleError,
    QuadratureWarning,
)
from .harmonics import (
    HarmonicIndex,
    HarmonicKind,
    Truncation,
    addition_theorem_rhs,
    external_harmonic,
    flatring_summand,
    green_expansion,
    integral_relation_check,
    internal_harmonic,
    limit_comparison,
    toroidal_green_expansion,
    toroidal_harmonic,
    toroidal_limit_summand,
    warm_cache,
)
from .lame import (
    LameEigenpair,
    LameFamily,
    LameSecondKind,
    eigenpair,
    eigenvalue_bracket,
    eval_e_imag,
    eval_e_real,
    eval_f_imag,
    family_of_superscript,
    second_kind,
    second_kind_cached,
    solve_eigenpair,
    solve_eigenpairs,
)
from .legendre import LegendreIndex, gamma_ratio, hyp2f1, legendre_p, legendre_q
