"""Spectral factorization of strictly positive densities.

The outer function is built by the cepstral route.  With ``c_k`` the
coefficients of ``log(phi)``, the analytic logarithm is

    g(z) = c_0 + 2 * sum_{k>=1} c_k z**k,

and ``F = exp(g)`` satisfies ``|F| = phi`` on the circle.  The spectral factor
is ``exp(g/2)`` and the whitening filter ``exp(-g/2)``.  Non-polynomial
functions of ``g`` are evaluated pointwise on the grid and analysed back
into coefficients; the energy that lands on negative indices measures the
aliasing of that step and is checked against ``tol_causal``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import AdmissibilityError, DiagnosticError, DomainError, QuadratureWarning
from .spectra import (
    BoundaryFunction,
    CausalSeries,
    FrequencyGrid,
    analyze,
    anticausal_leakage,
    positive_part,
)

__all__ = [
    "SpectralDensity",
    "AdmissibilityReport",
    "OuterFunction",
    "SpectralFactors",
    "RadialTrace",
    "check_admissible",
    "outer_function",
    "spectral_factors",
    "whitening_filter",
    "factorize",
    "poisson_radial",
    "rational_factor_oracle",
    "DELTA_MIN",
    "TOL_RECON",
    "TOL_CAUSAL",
]

DELTA_MIN = 1e-6
TOL_RECON = 1e-8
TOL_CAUSAL = 1e-6


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """A strictly positive, real-valued density sampled on a grid."""

    boundary: BoundaryFunction

    def __post_init__(self):
        b = self.boundary
        if not b.real:
            b = BoundaryFunction(b.grid, b.values, real=True)
            object.__setattr__(self, "boundary", b)
        v = b.values.real
        j = int(np.argmin(v))
        if not v[j] > 0.0:
            raise AdmissibilityError(
                f"density is not strictly positive: value {v[j]:.6g} at omega={b.grid.nodes[j]:.6g}",
                omega=float(b.grid.nodes[j]),
                value=float(v[j]),
            )

    @classmethod
    def from_values(cls, grid: FrequencyGrid, values) -> "SpectralDensity":
        return cls(BoundaryFunction(grid, np.asarray(values), real=True))

    @classmethod
    def from_function(cls, grid: FrequencyGrid, fn) -> "SpectralDensity":
        return cls.from_values(grid, fn(grid.nodes))

    @property
    def grid(self) -> FrequencyGrid:
        return self.boundary.grid

    @property
    def values(self) -> np.ndarray:
        return self.boundary.values.real

    @property
    def delta(self) -> float:
        """Observed floor ``min_j phi(omega_j)``."""
        return float(np.min(self.values))

    def plus(self, eps: float) -> "SpectralDensity":
        """The density shifted up by ``eps``."""
        return SpectralDensity.from_values(self.grid, self.values + eps)


@dataclass(frozen=True)
class AdmissibilityReport:
    delta: float
    omega_min: float
    pw_integral: float
    delta_min: float
    passed: bool


@dataclass(frozen=True, eq=False)
class OuterFunction:
    """Outer function ``F = exp(g)`` of a density.

    Attributes
    ----------
    g_plus : CausalSeries
        Coefficients of the analytic logarithm ``g = u + i v``.
    F_plus_boundary : BoundaryFunction
        ``exp(g)`` on the density's grid.
    density : SpectralDensity
    recon_residual : float
        ``max | |F| - phi | / max phi`` on the grid.
    truncation_energy : float
        Grid energy of ``log(phi)`` not represented by ``g_plus``.
    """

    g_plus: CausalSeries
    F_plus_boundary: BoundaryFunction
    density: SpectralDensity
    recon_residual: float
    truncation_energy: float

    @property
    def degree(self) -> int:
        return self.g_plus.degree

    @property
    def grid(self) -> FrequencyGrid:
        return self.density.grid

    def log_boundary(self) -> np.ndarray:
        """``g(exp(-1j*omega_j))`` on the grid."""
        return self.g_plus.boundary(self.grid).values

    def __call__(self, z):
        return np.exp(self.g_plus(z))


@dataclass(frozen=True, eq=False)
class SpectralFactors:
    """``phi_plus`` (causal) and ``phi_minus`` with ``phi = phi_plus * phi_minus``.

    ``phi_minus_conj`` holds the causal series ``p`` with
    ``phi_minus(1/z) = p(z)``; its coefficients are the conjugates of
    ``phi_plus``.  The boundary arrays are samples on the density grid.
    """

    phi_plus: CausalSeries
    phi_minus_conj: CausalSeries
    phi_plus_boundary: BoundaryFunction
    phi_minus_boundary: BoundaryFunction
    leakage: float

    def product(self) -> np.ndarray:
        return self.phi_plus_boundary.values * self.phi_minus_boundary.values


@dataclass(frozen=True, eq=False)
class RadialTrace:
    """Poisson (``u``) and conjugate Poisson (``v``) integrals along a radius."""

    theta: float
    radii: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if np.any(np.diff(r) <= 0) or np.any(r < 0) or np.any(r >= 1):
            raise DomainError("radii must be strictly increasing within [0, 1)")

    @property
    def g(self) -> np.ndarray:
        return self.u + 1j * self.v


def _as_density(phi) -> SpectralDensity:
    if isinstance(phi, SpectralDensity):
        return phi
    if isinstance(phi, BoundaryFunction):
        return SpectralDensity(phi)
    raise TypeError(f"expected a SpectralDensity, got {type(phi).__name__}")


def check_admissible(phi, delta_min: float = DELTA_MIN) -> AdmissibilityReport:
    """Positivity floor and the grid value of ``(1/2pi) * integral log(phi)``.

    A nonpositive sample raises :class:`AdmissibilityError` naming its
    frequency.  A floor below ``delta_min`` is reported as ``passed=False``.
    """
    if isinstance(phi, BoundaryFunction) and not isinstance(phi, SpectralDensity):
        phi = SpectralDensity(phi)
    phi = _as_density(phi)
    v = phi.values
    j = int(np.argmin(v))
    pw = float(np.mean(np.log(v)))
    return AdmissibilityReport(
        delta=float(v[j]),
        omega_min=float(phi.grid.nodes[j]),
        pw_integral=pw,
        delta_min=delta_min,
        passed=bool(v[j] >= delta_min and np.isfinite(pw)),
    )


def outer_function(
    phi,
    K: Optional[int] = None,
    tol_recon: float = TOL_RECON,
    delta_min: float = DELTA_MIN,
) -> OuterFunction:
    """Outer function of ``phi`` by the cepstral method.

    Parameters
    ----------
    phi : SpectralDensity
    K : int, optional
        Highest cepstral index doubled into ``g_plus`` (at most ``M/2 - 1``).
        By default all indices up to ``M/2 - 1`` are used and the Nyquist
        coefficient is appended with weight one (the folded cepstrum), which
        makes ``exp(Re g)`` equal ``phi`` at every grid node even when
        ``log(phi)`` is not band-limited.
    tol_recon : float
        Bound on the relative boundary-modulus residual.
    delta_min : float
        Smallest admissible sample value.

    Raises
    ------
    AdmissibilityError
        If ``min(phi) < delta_min``.
    DiagnosticError
        If ``| |F| - phi |`` exceeds ``tol_recon * max(phi)`` somewhere.
    """
    phi = _as_density(phi)
    rep = check_admissible(phi, delta_min)
    if not rep.passed:
        raise AdmissibilityError(
            f"density floor {rep.delta:.3e} at omega={rep.omega_min:.6g} is below {delta_min:.1e}",
            omega=rep.omega_min,
            value=rep.delta,
        )
    logphi = np.log(phi.values)
    folded = K is None
    c = analyze(phi.boundary.with_values(logphi, real=True), K)
    K = c.half_width
    g = np.empty(K + 1 + folded, dtype=complex)
    g[0] = c[0].real
    g[1:K + 1] = 2.0 * c.coeffs[K + 1:]
    if folded:
        # Nyquist term: on the grid exp(-1j*(M/2)*omega_j) = (-1)**j and the
        # coefficient is counted once, so Re g reproduces log(phi) exactly.
        g[-1] = 0.5 * (np.mean(logphi[::2]) - np.mean(logphi[1::2]))
    g_plus = CausalSeries(g)
    gb = g_plus.boundary(phi.grid).values
    F = np.exp(gb)
    resid = float(np.max(np.abs(np.abs(F) - phi.values)) / np.max(phi.values))
    trunc = max(0.0, float(np.mean(logphi ** 2)) - c.energy() - (abs(g[-1]) ** 2 if folded else 0.0))
    if not resid <= tol_recon:
        raise DiagnosticError(
            f"outer-function modulus residual {resid:.3e} exceeds {tol_recon:.1e}",
            residual=resid,
            tolerance=tol_recon,
        )
    return OuterFunction(g_plus, BoundaryFunction(phi.grid, F), phi, resid, trunc)


def _reanalyze_causal(values: BoundaryFunction, tol_causal: float, what: str):
    leak = anticausal_leakage(values)
    if not leak <= tol_causal:
        raise DiagnosticError(
            f"{what}: anti-causal energy fraction {leak:.3e} exceeds {tol_causal:.1e}",
            residual=leak,
            tolerance=tol_causal,
        )
    return positive_part(analyze(values)), leak


def spectral_factors(F: OuterFunction, tol_causal: float = TOL_CAUSAL) -> SpectralFactors:
    """``phi_plus = exp(g/2)`` and its reflection ``phi_minus``."""
    grid = F.grid
    pb = np.exp(0.5 * F.log_boundary())
    plus_b = BoundaryFunction(grid, pb)
    phi_plus, leak = _reanalyze_causal(plus_b, tol_causal, "spectral factor")
    return SpectralFactors(
        phi_plus=phi_plus,
        phi_minus_conj=CausalSeries(np.conj(phi_plus.coeffs)),
        phi_plus_boundary=plus_b,
        phi_minus_boundary=BoundaryFunction(grid, np.conj(pb)),
        leakage=leak,
    )


def whitening_filter(F: OuterFunction, tol_causal: float = TOL_CAUSAL, tol_norm: float = 1e-8) -> CausalSeries:
    """Causal inverse spectral factor ``exp(-g/2)``.

    Its sup-norm is bounded by ``delta**-0.5``; exceeding that bound by more
    than ``tol_norm`` (relative) raises :class:`DiagnosticError`.
    """
    wb = BoundaryFunction(F.grid, np.exp(-0.5 * F.log_boundary()))
    hw, _ = _reanalyze_causal(wb, tol_causal, "whitening filter")
    bound = F.density.delta ** -0.5
    sup = wb.sup_norm()
    if sup > bound * (1.0 + tol_norm):
        raise DiagnosticError(
            f"whitening filter norm {sup:.6g} exceeds delta^-1/2 = {bound:.6g}",
            residual=sup,
            tolerance=bound,
        )
    return hw


def factorize(phi, K=None, tol_recon=TOL_RECON, tol_causal=TOL_CAUSAL, delta_min=DELTA_MIN):
    """Run the outer function, spectral factors and whitening filter in one go.

    Returns ``(outer, factors, whitening)``.
    """
    F = outer_function(phi, K, tol_recon=tol_recon, delta_min=delta_min)
    return F, spectral_factors(F, tol_causal), whitening_filter(F, tol_causal)


def poisson_radial(phi, theta: float, radii: Sequence[float]) -> RadialTrace:
    """Trapezoid quadrature of the Poisson and conjugate Poisson integrals of ``log(phi)``.

    Evaluated at ``z = r*exp(-1j*theta)``, the point approaching the boundary
    sample of frequency ``theta``.  With that orientation

        u = (1/2pi) * integral log phi(t) (1 - r^2) / (1 - 2r cos(theta - t) + r^2) dt
        v = -(1/2pi) * integral log phi(t) 2r sin(theta - t) / (1 - 2r cos(theta - t) + r^2) dt

    and ``u + 1j*v`` equals ``g_plus(r*exp(-1j*theta))`` from
    :func:`outer_function`.  A :class:`QuadratureWarning` is issued when the
    grid cannot resolve the kernel (``M*(1 - r) < 14``).
    """
    phi = _as_density(phi)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if np.any(radii < 0) or np.any(radii >= 1):
        raise DomainError("radii must lie in [0, 1)")
    M = phi.grid.size
    if np.any(M * (1.0 - radii) < 14.0):
        warnings.warn(
            f"grid of {M} points under-resolves the Poisson kernel at r={radii.max():.6g}",
            QuadratureWarning,
            stacklevel=2,
        )
    logphi = np.log(phi.values)
    d = theta - phi.grid.nodes
    cos_d = np.cos(d)
    sin_d = np.sin(d)
    u = np.empty(radii.shape)
    v = np.empty(radii.shape)
    for i, r in enumerate(radii):
        den = 1.0 - 2.0 * r * cos_d + r * r
        u[i] = np.mean(logphi * (1.0 - r * r) / den)
        v[i] = -np.mean(logphi * 2.0 * r * sin_d / den)
    return RadialTrace(float(theta), radii, u, v)


def rational_factor_oracle(cosine_coeffs, circle_tol: float = 1e-10) -> CausalSeries:
    """Minimum-phase factor of a trigonometric polynomial by root splitting.

    ``cosine_coeffs = [a_0, a_1, ..., a_n]`` describes
    ``phi(omega) = a_0 + 2 * sum a_k cos(k omega)``.  The roots of
    ``z**n * sum_{|k|<=n} a_|k| z**k`` come in pairs ``(rho, 1/conj(rho))``;
    the factor keeps the roots outside the unit circle, is normalized to
    ``p(0) > 0`` and scaled so that ``|p|**2 = phi`` on the circle.

    Raises
    ------
    DomainError
        If a root lies within ``circle_tol`` of the unit circle (the density
        touches zero).
    """
    a = np.asarray(cosine_coeffs, dtype=float).reshape(-1)
    while a.size > 1 and a[-1] == 0.0:
        a = a[:-1]
    n = a.size - 1
    if n == 0:
        if a[0] <= 0:
            raise DomainError("constant density must be positive")
        return CausalSeries([np.sqrt(a[0])])
    poly = np.concatenate([a[::-1], a[1:]])  # highest power first
    roots = np.roots(poly)
    if np.any(np.abs(np.abs(roots) - 1.0) < circle_tol):
        raise DomainError("root on the unit circle: density is not strictly positive")
    outside = roots[np.abs(roots) > 1.0]
    if outside.size != n:
        raise DomainError(f"expected {n} roots outside the circle, found {outside.size}")
    # q(z) = prod (1 - z/rho), ascending powers
    q = np.array([1.0 + 0j])
    for rho in outside:
        q = np.convolve(q, [1.0, -1.0 / rho])
    w = np.linspace(-np.pi, np.pi, 4 * n + 8, endpoint=False)
    k = np.arange(1, n + 1)
    phi_w = a[0] + 2.0 * np.cos(np.outer(w, k)) @ a[1:]
    qw = np.polynomial.polynomial.polyval(np.exp(-1j * w), q)
    scale = np.sqrt(np.mean(phi_w / np.abs(qw) ** 2))
    coeffs = scale * q
    if np.max(np.abs(coeffs.imag)) < 1e-12 * np.max(np.abs(coeffs)):
        coeffs = coeffs.real
    return CausalSeries(coeffs)
