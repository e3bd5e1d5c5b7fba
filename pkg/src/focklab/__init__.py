"""Numerical laboratory for Toeplitz operators on the Gaussian Fock space (n = 1).

Truncated operator matrices in the monomial basis, Berezin / heat transforms
computed by independent routes, essential-spectrum and essential-positivity
estimators, and a seeded derivative-free search over radial symbols.
"""

from .fock import (
    FockParams,
    PolarGrid,
    QuadratureRule,
    gauss_laguerre,
    kernel,
    kernel_coeff_vector,
    normalized_kernel_coeff,
    polar_grid,
    truncation_dim,
)
from .symbols import (
    AtomicMeasure,
    Constant,
    General,
    Indicator,
    PiecewiseConstant,
    Power,
    Radial,
    Rational,
    Sampled,
    Scaled,
    SignedAtomicMeasure,
    Translated,
    WeylPhase,
    carleson_ball_bound,
    directional_clamp,
    evaluate,
    format_symbol,
    hahn_jordan,
    parse_symbol,
    translate,
    vo_modulus,
)
from .toeplitz import (
    ComplexMatrix,
    EigenSequence,
    assemble,
    assemble_general,
    assemble_measure,
    assemble_weyl_phase,
    radial_eigenvalues,
)
from .berezin import (
    BerezinValue,
    berezin_from_matrix,
    heat_transform_measure,
    heat_transform_symbol,
    radial_berezin_series,
)
from .spectra import (
    EssPosReport,
    SpectrumEstimate,
    ess_positivity_limitops,
    ess_positivity_radial,
    ess_positivity_symbol_liminf,
    ess_positivity_vo,
    hermitian_eigs,
    limit_operator_sample,
    radial_essential_spectrum,
    singular_values,
)
from .experiments import (
    RatioRow,
    SearchResult,
    counterexample_table,
    ratio_objective,
    search_minimize,
    vo_corollary_demo,
)

__version__ = "0.1.0"
