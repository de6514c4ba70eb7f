"""FIR approximation by Fejér and de la Vallée-Poussin means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DomainError
from .spectra import BoundaryFunction, CausalSeries, FrequencyGrid, analyze, synthesize

__all__ = [
    "PolynomialApproximant",
    "RateFit",
    "fejer_weights",
    "fejer_mean",
    "vallee_poussin_mean",
    "truncation",
    "approximant",
    "approx_error",
    "error_sweep",
    "rate_fit",
    "best_approx_upper",
    "ERROR_FLOOR",
]

ERROR_FLOOR = 1e-8
KINDS = ("fejer", "vallee_poussin", "truncation")
_ALIASES = {"vp": "vallee_poussin", "trunc": "truncation", "fejer": "fejer",
            "vallee_poussin": "vallee_poussin", "truncation": "truncation"}


@dataclass(frozen=True, eq=False)
class PolynomialApproximant:
    """A polynomial approximant of a causal series.

    ``N`` is the mean's parameter; the degree is ``N`` for Fejér means and
    truncations and ``2N - 1`` for de la Vallée-Poussin means.
    """

    kind: str
    N: int
    series: CausalSeries
    source: str = ""

    @property
    def degree(self) -> int:
        return self.series.degree

    @property
    def coeffs(self) -> np.ndarray:
        return self.series.coeffs


@dataclass(frozen=True, eq=False)
class RateFit:
    """Power-law fit ``error ~ C * N**-alpha`` in log-log coordinates.

    ``used`` flags the sweep entries that entered the least-squares fit and
    ``residual`` is the RMS of the log residuals over those entries.
    """

    degrees: np.ndarray
    errors: np.ndarray
    alpha_hat: float
    C_hat: float
    residual: float
    used: np.ndarray


def fejer_weights(N: int, length: int) -> np.ndarray:
    """Triangular weights ``1 - k/(N+1)`` for ``k <= N``, zero beyond."""
    k = np.arange(length)
    return np.where(k <= N, 1.0 - k / (N + 1.0), 0.0)


def _resolve_kind(kind: str) -> str:
    try:
        return _ALIASES[kind]
    except KeyError:
        raise DomainError(f"unknown approximant kind {kind!r}") from None


def fejer_mean(H: CausalSeries, N: int, source: str = "") -> PolynomialApproximant:
    """``F_N(z; H) = sum_{k<=N} (1 - k/(N+1)) H_k z**k``."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    c = H.truncate(N).coeffs * fejer_weights(N, N + 1)
    return PolynomialApproximant("fejer", N, CausalSeries(c), source)


def vallee_poussin_mean(H: CausalSeries, N: int, source: str = "") -> PolynomialApproximant:
    """``V_N = 2 F_{2N-1} - F_{N-1}``, a polynomial of degree ``2N - 1``.

    Coefficients with ``k <= N`` carry weight exactly one.
    """
    if N < 1:
        raise DomainError("the de la Vallée-Poussin mean needs N >= 1")
    D = 2 * N - 1
    w = 2.0 * fejer_weights(D, D + 1) - fejer_weights(N - 1, D + 1)
    w[: N + 1] = 1.0
    c = H.truncate(D).coeffs * w
    return PolynomialApproximant("vallee_poussin", N, CausalSeries(c), source)


def truncation(H: CausalSeries, N: int, source: str = "") -> PolynomialApproximant:
    """Partial sum ``sum_{k<=N} H_k z**k``."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    return PolynomialApproximant("truncation", N, H.truncate(N), source)


def approximant(H: CausalSeries, N: int, kind: str = "vallee_poussin", source: str = ""):
    """Dispatch on ``kind`` (``fejer``, ``vp``/``vallee_poussin``, ``trunc``/``truncation``)."""
    kind = _resolve_kind(kind)
    fn = {"fejer": fejer_mean, "vallee_poussin": vallee_poussin_mean, "truncation": truncation}[kind]
    return fn(H, N, source)


def _fine_grid(H, P_degree: int, oversample: int) -> FrequencyGrid:
    deg = H.degree if isinstance(H, CausalSeries) else H.grid.size // 2 - 1
    base = 8
    while base <= max(deg, P_degree):
        base *= 2
    if isinstance(H, BoundaryFunction):
        base = max(base, H.grid.size)
    return FrequencyGrid(base * oversample)


def _target_values(H, grid: FrequencyGrid) -> np.ndarray:
    if isinstance(H, CausalSeries):
        return H.boundary(grid).values
    return synthesize(analyze(H), grid).values


def approx_error(
    H: Union[CausalSeries, BoundaryFunction],
    P: Union[PolynomialApproximant, CausalSeries],
    oversample: int = 4,
) -> float:
    """Sup-norm distance ``||H - P||`` on an oversampled grid.

    ``H`` is either a causal series or a boundary function; boundary
    functions are refined by trigonometric interpolation.
    """
    Ps = P.series if isinstance(P, PolynomialApproximant) else P
    grid = _fine_grid(H, Ps.degree, oversample)
    return float(np.max(np.abs(_target_values(H, grid) - Ps.boundary(grid).values)))


def error_sweep(
    H: CausalSeries,
    Ns: Iterable[int],
    kind: str = "vallee_poussin",
    oversample: int = 4,
) -> np.ndarray:
    """Approximation errors ``||H - P_N||`` for each ``N``, on one shared grid."""
    Ns = [int(n) for n in Ns]
    kind = _resolve_kind(kind)
    Ps = [approximant(H, n, kind) for n in Ns]
    grid = _fine_grid(H, max(p.degree for p in Ps), oversample)
    target = H.boundary(grid).values
    return np.array([np.max(np.abs(target - p.series.boundary(grid).values)) for p in Ps])


def rate_fit(
    degrees: Sequence[float],
    errors: Sequence[float],
    floor: float = ERROR_FLOOR,
    min_degree: int = 4,
) -> RateFit:
    """Least-squares fit of ``log e = log C - alpha log N``.

    Entries with ``N < min_degree`` or with errors within a factor ten of
    ``floor`` are left out of the fit; at least four entries must remain.
    """
    N = np.asarray(degrees, dtype=float).reshape(-1)
    e = np.asarray(errors, dtype=float).reshape(-1)
    if N.shape != e.shape:
        raise DomainError("degrees and errors must have equal length")
    if np.any(~np.isfinite(e)) or np.any(e < 0):
        raise DomainError("errors must be finite and nonnegative")
    e = np.maximum(e, np.finfo(float).tiny)
    used = (N >= min_degree) & (e > 10.0 * floor)
    if np.count_nonzero(used) < 4:
        raise DomainError(f"rate fit needs at least 4 usable entries, got {np.count_nonzero(used)}")
    x = np.log(N[used])
    y = np.log(e[used])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return RateFit(N, e, float(-slope), float(np.exp(intercept)), resid, used)


def best_approx_upper(
    H: CausalSeries,
    N: int,
    candidates: Sequence[Union[PolynomialApproximant, CausalSeries]],
    oversample: int = 4,
) -> float:
    """Smallest error among candidate polynomials of degree at most ``N``.

    The best approximation of order ``N`` is never larger than the value
    returned here.
    """
    if not candidates:
        raise DomainError("candidate set is empty")
    errs = []
    for P in candidates:
        Ps = P.series if isinstance(P, PolynomialApproximant) else P
        deg = int(np.max(np.nonzero(np.abs(Ps.coeffs) > 0)[0], initial=0))
        if deg > N:
            raise DomainError(f"candidate of degree {deg} exceeds N={N}")
        errs.append(approx_error(H, Ps, oversample))
    return float(min(errs))
