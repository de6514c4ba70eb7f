"""Causal Wiener filter as a whitening/estimation cascade.

``H = H_W * H_E`` with ``H_W = 1/phi_plus`` and ``H_E = [psi/phi_minus]^+``.
Cross-spectra follow the same D-transform convention as densities:
``psi(omega) = sum_k r_xy(k) exp(-1j*k*omega)`` with
``r_xy(k) = E[x_n * conj(y_{n-k})]``, so the normal equations of a causal
FIR estimator ``x_hat_n = sum_k h_k y_{n-k}`` read
``sum_j h_j r_y(k - j) = r_xy(k)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import ConditioningWarning, DiagnosticError, DomainError, GridMismatchError, SingularQuotientError
from .factorization import (
    TOL_CAUSAL,
    TOL_RECON,
    DELTA_MIN,
    SpectralDensity,
    SpectralFactors,
    factorize,
)
from .spectra import (
    BoundaryFunction,
    CausalSeries,
    FrequencyGrid,
    analyze,
    anticausal_leakage,
    positive_part,
)

__all__ = [
    "CrossSpectrum",
    "WienerSolution",
    "ToeplitzSolution",
    "gamma",
    "estimation_filter",
    "wiener_cascade",
    "wiener_filter",
    "toeplitz_fir_oracle",
    "correlations",
    "spectral_mse",
]

DEFAULT_TAPS = 256


@dataclass(frozen=True, eq=False)
class CrossSpectrum:
    """Cross-spectral density ``psi`` between desired signal and observation."""

    boundary: BoundaryFunction
    provenance: str = "user"

    @classmethod
    def from_values(cls, grid: FrequencyGrid, values, provenance: str = "user"):
        return cls(BoundaryFunction(grid, np.asarray(values)), provenance)

    @property
    def grid(self) -> FrequencyGrid:
        return self.boundary.grid

    @property
    def values(self) -> np.ndarray:
        return self.boundary.values


@dataclass(frozen=True, eq=False)
class WienerSolution:
    """Whitening filter, estimation filter and their cascade.

    ``H_E`` and ``H`` are truncated to ``K``; ``gamma_plus`` and ``H_full``
    keep every coefficient the grid resolves (degree ``M/2 - 1``).
    """

    H_W: CausalSeries
    H_E: CausalSeries
    H: CausalSeries
    gamma_plus: CausalSeries
    H_full: CausalSeries
    grid: FrequencyGrid
    factors: SpectralFactors
    tail_energy: float

    @property
    def K(self) -> int:
        return self.H.degree


@dataclass(frozen=True, eq=False)
class ToeplitzSolution:
    """Finite-length Wiener-Hopf solution."""

    length: int
    coeffs: np.ndarray
    mmse: float
    condition: float


def _psi_values(psi):
    if isinstance(psi, CrossSpectrum):
        return psi.boundary
    if isinstance(psi, SpectralDensity):
        return psi.boundary
    if isinstance(psi, BoundaryFunction):
        return psi
    raise TypeError(f"expected a CrossSpectrum, got {type(psi).__name__}")


def gamma(psi, factors: SpectralFactors, singular_tol: float = 1e-12) -> BoundaryFunction:
    """Pointwise quotient ``psi / phi_minus`` on the grid."""
    pb = _psi_values(psi)
    pm = factors.phi_minus_boundary
    if pb.grid != pm.grid:
        raise GridMismatchError("cross-spectrum and spectral factors use different grids")
    if np.min(np.abs(pm.values)) < singular_tol:
        j = int(np.argmin(np.abs(pm.values)))
        raise SingularQuotientError(f"|phi_minus| vanishes at omega={pm.grid.nodes[j]:.6g}")
    return BoundaryFunction(pb.grid, pb.values / pm.values)


def estimation_filter(Gamma: BoundaryFunction, K: Optional[int] = None) -> CausalSeries:
    """Positive-time part of ``Gamma``, truncated to degree ``K``."""
    return positive_part(analyze(Gamma, K))


def _next_pow2(n: int) -> int:
    return 1 << max(3, int(np.ceil(np.log2(max(n, 1)))))


def wiener_cascade(
    W: CausalSeries,
    E: CausalSeries,
    K: Optional[int] = None,
    tol_causal: float = 1e-14,
) -> CausalSeries:
    """Product ``W * E`` formed on the circle and analysed back.

    The product is sampled on a grid fine enough to hold its full degree,
    so the re-analysis is exact up to rounding; the result is truncated to
    degree ``K`` (default ``deg W + deg E``).
    """
    full = W.degree + E.degree
    grid = FrequencyGrid(_next_pow2(2 * full + 2))
    prod = BoundaryFunction(grid, W.boundary(grid).values * E.boundary(grid).values)
    leak = anticausal_leakage(prod)
    if not leak <= tol_causal:
        raise DiagnosticError(
            f"cascade anti-causal energy fraction {leak:.3e} exceeds {tol_causal:.1e}",
            residual=leak,
            tolerance=tol_causal,
        )
    H = positive_part(analyze(prod, full))
    return H.truncate(full if K is None else K)


def wiener_filter(
    phi: SpectralDensity,
    psi,
    K: int = DEFAULT_TAPS,
    tol_recon: float = TOL_RECON,
    tol_causal: float = TOL_CAUSAL,
    delta_min: float = DELTA_MIN,
) -> WienerSolution:
    """Causal Wiener filter for observation density ``phi`` and cross-spectrum ``psi``."""
    grid = phi.grid
    if _psi_values(psi).grid != grid:
        raise GridMismatchError("density and cross-spectrum use different grids")
    kmax = grid.max_half_width
    if K > kmax:
        raise DomainError(f"K={K} exceeds the grid resolution {kmax}")
    _, factors, hw = factorize(phi, tol_recon=tol_recon, tol_causal=tol_causal, delta_min=delta_min)
    gp = estimation_filter(gamma(psi, factors))
    H_full = wiener_cascade(hw, gp, K=kmax)
    return WienerSolution(
        H_W=hw,
        H_E=gp.truncate(K),
        H=H_full.truncate(K),
        gamma_plus=gp,
        H_full=H_full,
        grid=grid,
        factors=factors,
        tail_energy=H_full.tail_energy(K),
    )


def correlations(phi, psi, L: int):
    """Autocorrelation ``r_y(0..L-1)`` and cross-correlation ``r_xy(0..L-1)``."""
    pb = phi.boundary if hasattr(phi, "boundary") else phi
    M = pb.grid.size
    if L > M // 2 - 1:
        raise DomainError(f"L={L} exceeds the grid resolution")
    ry = analyze(pb, L)
    rxy = analyze(_psi_values(psi), L)
    return ry.coeffs[L:L + L], rxy.coeffs[L:L + L]


def _toeplitz(ry: np.ndarray) -> np.ndarray:
    # R[k, j] = r_y(k - j), r_y(-m) = conj(r_y(m))
    return scipy.linalg.toeplitz(ry, np.conj(ry))


def toeplitz_fir_oracle(
    phi: SpectralDensity,
    psi,
    rx0: float,
    L: int,
    cond_limit: float = 1e12,
) -> ToeplitzSolution:
    """Optimal length-``L`` FIR estimator from the Wiener-Hopf normal equations.

    Solves ``R_y h = r_xy`` directly and returns
    ``mmse = r_x(0) - Re sum_k h_k conj(r_xy(k))``.  A
    :class:`ConditioningWarning` is issued when ``cond(R_y) > cond_limit``.
    """
    if L < 1:
        raise DomainError("L must be positive")
    if L > phi.grid.size // 4:
        raise DomainError(f"L={L} exceeds M/4 = {phi.grid.size // 4}")
    ry, rxy = correlations(phi, psi, L)
    R = _toeplitz(ry)
    cond = float(np.linalg.cond(R))
    if cond > cond_limit:
        warnings.warn(f"Toeplitz matrix condition number {cond:.3e}", ConditioningWarning, stacklevel=2)
    h = scipy.linalg.solve(R, rxy, assume_a="her")
    if np.max(np.abs(h.imag)) <= 1e-12 * max(1.0, np.max(np.abs(h))):
        h = h.real
    mmse = float(rx0 - np.real(np.sum(h * np.conj(rxy))))
    return ToeplitzSolution(L, h, mmse, cond)


def spectral_mse(H, phi, psi, rx0: float) -> float:
    """Mean-square error of the causal FIR estimator with coefficients ``H``.

    ``r_x(0) - 2 Re sum_k h_k conj(r_xy(k)) + sum_{j,k} conj(h_j) h_k r_y(j - k)``.
    """
    h = np.asarray(H.coeffs if isinstance(H, CausalSeries) else H, dtype=complex)
    L = h.shape[0]
    ry, rxy = correlations(phi, psi, L)
    R = _toeplitz(ry)
    quad = np.real(np.conj(h) @ R @ h)
    cross = np.real(np.sum(h * np.conj(rxy)))
    return float(rx0 - 2.0 * cross + quad)
