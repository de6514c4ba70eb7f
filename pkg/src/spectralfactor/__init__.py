"""Spectral factorization, causal Wiener filtering and FIR approximation.

Densities live on a uniform frequency grid and are factored by the cepstral
method into an outer function and its causal square root; the causal Wiener
filter is built as a whitening/estimation cascade and approximated by
de la Vallée-Poussin means, whose sup-norm errors expose the Hölder
smoothness of the data.
"""

from .approx import (
    PolynomialApproximant,
    RateFit,
    approx_error,
    approximant,
    best_approx_upper,
    error_sweep,
    fejer_mean,
    rate_fit,
    truncation,
    vallee_poussin_mean,
)
from .errors import (
    AdmissibilityError,
    AliasingError,
    ConditioningWarning,
    DiagnosticError,
    DomainError,
    GridMismatchError,
    QuadratureWarning,
    SingularQuotientError,
    SpectralError,
)
from .factorization import (
    OuterFunction,
    SpectralDensity,
    SpectralFactors,
    check_admissible,
    factorize,
    outer_function,
    poisson_radial,
    rational_factor_oracle,
    spectral_factors,
    whitening_filter,
)
from .models import build_model, holder_corpus, smooth_corpus
from .pathology import (
    disk_algebra_gap,
    gamma_divergence_probe,
    make_pathological,
    make_pathological_gamma,
    outer_divergence_probe,
)
from .simulate import apply_fir, sample_autocorrelation, simulate_process
from .spectra import (
    BoundaryFunction,
    CausalSeries,
    FrequencyGrid,
    HarmonicSeries,
    analyze,
    holder_fit,
    holder_modulus,
    positive_part,
    synthesize,
)
from .wiener import CrossSpectrum, gamma, toeplitz_fir_oracle, wiener_filter

__version__ = "0.1.0"
