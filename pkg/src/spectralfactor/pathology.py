"""Continuous densities without Hölder smoothness, and radial divergence probes.

The constructions are finite truncations of sine series

    h(omega) = sum_k b_k sin(k omega),    b_k > 0 nonincreasing, k*b_k -> 0,

which converge uniformly to a continuous function while the conjugate
series ``-sum_k b_k cos(k omega)`` diverges to ``-inf`` at ``omega = 0``.

``slow_log_modulus``
    ``b_k = 1/(k log k)`` for ``2 <= k <= K``.
``lacunary_log``
    Blocks of the bounded polynomials ``Q_n = sum_{k<=n} sin(k omega)/k``
    at lacunary lengths: ``h = sum_j j**-2 Q_{2**j}`` for ``2**j <= K``.

Both diverge like ``log log K``, so at any finite truncation the effect is
an ordering, not a magnitude.  The density is ``phi = exp(h)``.  Angles in
``E`` shift copies of ``h`` so each angle carries the singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .approx import truncation, vallee_poussin_mean
from .errors import DomainError
from .factorization import SpectralDensity, poisson_radial
from .spectra import (
    BoundaryFunction,
    CausalSeries,
    FrequencyGrid,
    HarmonicSeries,
    analyze,
    cauchy_positive_radial,
    positive_part,
    synthesize,
)

__all__ = [
    "PathologicalSpectrum",
    "DivergenceRecord",
    "GapResult",
    "sine_coefficients",
    "make_pathological",
    "make_pathological_gamma",
    "conjugate_partial_sum",
    "outer_divergence_probe",
    "gamma_divergence_probe",
    "disk_algebra_gap",
    "R_PROBE",
    "PROBE_RADII",
]

R_PROBE = 1.0 - 2.0 ** -14
PROBE_RADII = (0.9, 0.99, 0.999, 0.9999)


def sine_coefficients(kind: str, K_terms: int) -> np.ndarray:
    """Sine-series coefficients ``b_0 .. b_K`` of the chosen construction."""
    if K_terms < 8:
        raise DomainError("K_terms must be at least 8")
    b = np.zeros(K_terms + 1)
    k = np.arange(2, K_terms + 1)
    if kind == "slow_log_modulus":
        b[2:] = 1.0 / (k * np.log(k))
    elif kind == "lacunary_log":
        J = int(np.floor(np.log2(K_terms)))
        for j in range(1, J + 1):
            n = 2 ** j
            b[1:n + 1] += j ** -2.0 / np.arange(1, n + 1)
    else:
        raise DomainError(f"unknown construction {kind!r}")
    return b


def _sine_series(b: np.ndarray, angles: Sequence[float], grid: FrequencyGrid, kind: str = "sine"):
    """Samples of ``sum_theta sum_k b_k trig(k (omega - theta))`` by one FFT."""
    K = b.shape[0] - 1
    if K > grid.max_half_width:
        raise DomainError(f"{K} terms need a grid of at least {2 * K + 2} points")
    c = np.zeros(2 * K + 1, dtype=complex)
    k = np.arange(K + 1)
    for theta in angles:
        shift = np.exp(1j * k * theta)
        if kind == "sine":
            # sin(k w) = (e^{ikw} - e^{-ikw}) / 2i; index +k carries e^{-ikw}
            c[K + k] += 0.5j * b * shift
            c[K - k] += -0.5j * b * np.conj(shift)
        elif kind == "cosine":
            c[K + k] += 0.5 * b * shift
            c[K - k] += 0.5 * b * np.conj(shift)
        else:
            raise DomainError(f"unknown series kind {kind!r}")
    return synthesize(HarmonicSeries(c), grid).values.real


@dataclass(frozen=True, eq=False)
class PathologicalSpectrum:
    """``phi = exp(h)`` for a truncated sine series ``h`` with singular angles ``E``."""

    kind: str
    K_terms: int
    angles: tuple
    coefficients: np.ndarray
    log_boundary: BoundaryFunction
    density: SpectralDensity

    @property
    def boundary(self) -> BoundaryFunction:
        return self.density.boundary

    @property
    def grid(self) -> FrequencyGrid:
        return self.density.grid


@dataclass(frozen=True, eq=False)
class DivergenceRecord:
    """Magnitudes along a radius towards the boundary point of frequency ``theta``.

    ``values`` holds ``|v|`` for outer-function probes and ``|gamma_plus|``
    for positive-part probes.  ``nondecreasing`` and ``increments`` describe
    the trend across the radii.
    """

    theta: float
    radii: np.ndarray
    values: np.ndarray
    nondecreasing: bool
    max_value: float
    F_values: Optional[np.ndarray] = None
    phi_theta: float = float("nan")
    extra: dict = field(default_factory=dict)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def shrinking(self, tol: float = 1e-12) -> bool:
        """Successive absolute differences do not grow."""
        d = np.abs(self.increments)
        return bool(np.all(d[1:] <= d[:-1] + tol))

    @property
    def oscillation(self) -> float:
        """Spread of ``Re F`` over the radii (outer probes only)."""
        if self.F_values is None:
            return float("nan")
        return float(np.ptp(self.F_values.real))


@dataclass(frozen=True, eq=False)
class GapResult:
    """Smallest sup-norm distance from a radial outer function to a candidate set."""

    gap: float
    winner: str
    norm: float
    errors: dict
    r_probe: float


def make_pathological(
    kind: str = "slow_log_modulus",
    K_terms: int = 4096,
    grid: Optional[FrequencyGrid] = None,
    angles: Sequence[float] = (0.0,),
) -> PathologicalSpectrum:
    """Continuous, strictly positive density with a divergent conjugate at ``angles``."""
    if grid is None:
        grid = FrequencyGrid(max(8, 1 << int(np.ceil(np.log2(2 * K_terms + 2)))))
    b = sine_coefficients(kind, K_terms)
    h = _sine_series(b, angles, grid)
    logb = BoundaryFunction(grid, h, real=True)
    return PathologicalSpectrum(kind, K_terms, tuple(float(a) for a in angles), b, logb,
                                SpectralDensity.from_values(grid, np.exp(h)))


def make_pathological_gamma(
    K_terms: int = 4096,
    grid: Optional[FrequencyGrid] = None,
    kind: str = "sine",
    angle: float = 0.0,
) -> BoundaryFunction:
    """Boundary function whose positive-time part is unbounded near ``angle``.

    ``kind="sine"`` gives ``sum_{k>=2} sin(k(omega - angle))/(k log k)``,
    continuous on the circle.  ``kind="cosine"`` gives the cosine series,
    which itself diverges at ``angle``.
    """
    if grid is None:
        grid = FrequencyGrid(max(8, 1 << int(np.ceil(np.log2(2 * K_terms + 2)))))
    b = sine_coefficients("slow_log_modulus", K_terms)
    return BoundaryFunction(grid, _sine_series(b, (angle,), grid, kind=kind), real=True)


def conjugate_partial_sum(spec_or_coeffs, theta: float = 0.0, angles: Sequence[float] = (0.0,)) -> float:
    """Conjugate series ``-sum_theta0 sum_k b_k cos(k (theta - theta0))`` at ``theta``."""
    if isinstance(spec_or_coeffs, PathologicalSpectrum):
        b = spec_or_coeffs.coefficients
        angles = spec_or_coeffs.angles
    else:
        b = np.asarray(spec_or_coeffs, dtype=float)
    k = np.arange(b.shape[0])
    return float(-sum(np.sum(b * np.cos(k * (theta - t0))) for t0 in angles))


def _as_density(phi) -> SpectralDensity:
    if isinstance(phi, PathologicalSpectrum):
        return phi.density
    if isinstance(phi, SpectralDensity):
        return phi
    return SpectralDensity(phi)


def outer_divergence_probe(phi, theta: float = 0.0, radii: Sequence[float] = PROBE_RADII) -> DivergenceRecord:
    """Track ``|v|`` and ``F = exp(u + iv)`` along a radius.

    ``u`` and ``v`` come from the Poisson quadrature of ``log(phi)``; the grid
    must resolve the kernel at the largest radius.
    """
    dens = _as_density(phi)
    tr = poisson_radial(dens, theta, radii)
    absv = np.abs(tr.v)
    F = np.exp(tr.g)
    return DivergenceRecord(
        theta=float(theta),
        radii=tr.radii,
        values=absv,
        nondecreasing=bool(np.all(np.diff(absv) >= 0)),
        max_value=float(np.max(absv)),
        F_values=F,
        phi_theta=float(dens.boundary.at(theta).real),
        extra={"u": tr.u, "v": tr.v},
    )


def gamma_divergence_probe(Gamma: BoundaryFunction, theta: float = 0.0,
                           radii: Sequence[float] = PROBE_RADII) -> DivergenceRecord:
    """Track ``|gamma_plus(r exp(-i theta))|`` by Cauchy-integral quadrature."""
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be strictly increasing")
    vals = np.abs(cauchy_positive_radial(Gamma, radii, theta))
    return DivergenceRecord(
        theta=float(theta),
        radii=radii,
        values=vals,
        nondecreasing=bool(np.all(np.diff(vals) >= 0)),
        max_value=float(np.max(vals)),
    )


def disk_algebra_gap(
    F,
    r_probe: float = R_PROBE,
    Ns: Sequence[int] = (1, 2, 4, 8, 16, 32),
    include_zero: bool = True,
    oversample: int = 4,
) -> GapResult:
    """Distance from ``F(r_probe * .)`` to ``{0} ∪ {V_N} ∪ {T_N}``.

    ``F`` is a causal series or a boundary function (whose positive-time part
    is used).  Boundary values of a pathological outer function need not
    exist, so everything is measured on the circle of radius ``r_probe``.
    """
    if not Ns and not include_zero:
        raise DomainError("candidate set is empty")
    if isinstance(F, BoundaryFunction):
        F = positive_part(analyze(F))
    k = np.arange(F.degree + 1)
    Fr = CausalSeries(F.coeffs * r_probe ** k)
    size = 8
    while size <= max(Fr.degree, 2 * max(Ns, default=0)):
        size *= 2
    grid = FrequencyGrid(size * oversample)
    ref = Fr.boundary(grid).values
    norm = float(np.max(np.abs(ref)))
    errors = {}
    if include_zero:
        errors["zero"] = norm
    for n in Ns:
        errors[f"V_{n}"] = float(np.max(np.abs(ref - vallee_poussin_mean(Fr, n).series.boundary(grid).values)))
        errors[f"T_{n}"] = float(np.max(np.abs(ref - truncation(Fr, n).series.boundary(grid).values)))
    winner = min(errors, key=errors.get)
    return GapResult(errors[winner], winner, norm, errors, r_probe)
