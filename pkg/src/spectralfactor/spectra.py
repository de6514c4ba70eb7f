"""Frequency grids, boundary functions and coefficient sequences.

All transforms use the D-transform convention: a sequence ``x_k`` has
transfer function ``x(z) = sum_k x_k z**k`` and frequency response
``x(exp(-1j*omega))``.  Index ``k = +1`` therefore corresponds to
``exp(-1j*omega)``, and causal sequences are power series analytic in the
open unit disk.  Coefficients of a boundary function are

    f_k = (1/2pi) * integral f(omega) exp(1j*k*omega) d omega,

computed on the uniform grid ``omega_j = -pi + 2*pi*j/M`` with one FFT.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import AliasingError, DomainError, GridMismatchError, QuadratureWarning

__all__ = [
    "FrequencyGrid",
    "BoundaryFunction",
    "HarmonicSeries",
    "CausalSeries",
    "HolderEstimate",
    "analyze",
    "synthesize",
    "positive_part",
    "embed",
    "anticausal_leakage",
    "cauchy_positive_radial",
    "dyadic_increments",
    "holder_modulus",
    "holder_fit",
    "sup_distance",
    "resample",
]


QUADRATURE_CELLS = 14


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _sign_alternation(k: np.ndarray) -> np.ndarray:
    # exp(1j*k*pi) for integer k, exact
    return np.where(np.asarray(k) % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of ``size`` points covering [-pi, pi) exactly once."""

    size: int

    def __post_init__(self):
        M = int(self.size)
        if M != self.size or M < 8 or M & (M - 1):
            raise DomainError(f"grid size must be a power of two >= 8, got {self.size!r}")
        object.__setattr__(self, "size", M)

    @property
    def nodes(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.size) / self.size

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.size

    @property
    def max_half_width(self) -> int:
        """Largest K for which ``analyze`` is alias-free on this grid."""
        return self.size // 2 - 1

    def index_of(self, omega: float) -> int:
        """Index of the node nearest to ``omega`` (taken modulo 2pi)."""
        w = (omega + np.pi) % (2.0 * np.pi)
        return int(np.round(w / self.spacing)) % self.size

    def oversampled(self, factor: int = 4) -> "FrequencyGrid":
        return FrequencyGrid(self.size * int(factor))


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Samples ``f(exp(-1j*omega_j))`` of a function on the unit circle.

    Parameters
    ----------
    grid : FrequencyGrid
    values : array_like
        Complex samples, one per grid node.
    real : bool
        Declare the function real-valued.  The imaginary parts must then be
        below ``real_tol`` (relative to the largest magnitude).
    """

    grid: FrequencyGrid
    values: np.ndarray
    real: bool = False
    real_tol: float = 1e-12

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).reshape(-1)
        if v.shape[0] != self.grid.size:
            raise GridMismatchError(
                f"{v.shape[0]} samples do not match grid of size {self.grid.size}"
            )
        if self.real:
            scale = max(1.0, float(np.max(np.abs(v))))
            worst = float(np.max(np.abs(v.imag)))
            if worst > self.real_tol * scale:
                raise DomainError(
                    f"function flagged real has imaginary part {worst:.3e} "
                    f"above tolerance {self.real_tol:.1e}"
                )
            v = v.real.astype(complex)
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_function(cls, grid: FrequencyGrid, fn: Callable, real: bool = False):
        """Sample ``fn(omega)`` on the grid nodes."""
        return cls(grid, np.asarray(fn(grid.nodes)), real=real)

    @property
    def omega(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def size(self) -> int:
        return self.grid.size

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def at(self, omega: float) -> complex:
        """Sample at the node nearest to ``omega``."""
        return complex(self.values[self.grid.index_of(omega)])

    def with_values(self, values, real: bool = False) -> "BoundaryFunction":
        return BoundaryFunction(self.grid, values, real=real)


@dataclass(frozen=True, eq=False)
class HarmonicSeries:
    """Two-sided coefficients ``f_k`` for ``-K <= k <= K``.

    ``coeffs[K + k]`` holds ``f_k``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] % 2 != 1:
            raise DomainError("a harmonic series needs an odd number (2K+1) of coefficients")
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "HarmonicSeries":
        """Build from ``{k: f_k}``; missing indices are zero."""
        K = max((abs(int(k)) for k in mapping), default=0)
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, val in mapping.items():
            c[K + int(k)] = val
        return cls(c)

    @property
    def half_width(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    K = half_width

    @property
    def indices(self) -> np.ndarray:
        K = self.half_width
        return np.arange(-K, K + 1)

    def __getitem__(self, k: int) -> complex:
        K = self.half_width
        if abs(k) > K:
            return 0j
        return complex(self.coeffs[K + k])

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


@dataclass(frozen=True, eq=False)
class CausalSeries:
    """One-sided coefficients ``h_0 .. h_K`` of ``h(z) = sum h_k z**k``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] == 0:
            c = np.zeros(1, dtype=complex)
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    K = degree

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, k):
        return self.coeffs[k]

    def __call__(self, z):
        """Evaluate ``h(z)`` at arbitrary complex points (Horner)."""
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def boundary(self, grid: FrequencyGrid) -> BoundaryFunction:
        """Exact frequency response ``h(exp(-1j*omega_j))`` on ``grid``.

        Requires ``degree < grid.size`` so distinct powers stay distinct.
        """
        if self.degree >= grid.size:
            raise AliasingError(
                f"degree {self.degree} cannot be sampled without aliasing on {grid.size} points"
            )
        a = np.zeros(grid.size, dtype=complex)
        k = np.arange(self.degree + 1)
        a[k] = self.coeffs * _sign_alternation(k)
        return BoundaryFunction(grid, np.fft.fft(a))

    def truncate(self, K: int) -> "CausalSeries":
        """Keep ``h_0 .. h_K`` (zero-padding when ``K`` exceeds the degree)."""
        out = np.zeros(K + 1, dtype=complex)
        n = min(K, self.degree) + 1
        out[:n] = self.coeffs[:n]
        return CausalSeries(out)

    def tail_energy(self, K: int) -> float:
        """Sum of ``|h_k|**2`` for ``k > K``."""
        return float(np.sum(np.abs(self.coeffs[K + 1:]) ** 2))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def real_if_close(self, tol: float = 1e-12) -> np.ndarray:
        """Coefficients as a real array when every imaginary part is below ``tol``."""
        c = self.coeffs
        if np.max(np.abs(c.imag), initial=0.0) <= tol * max(1.0, np.max(np.abs(c))):
            return c.real.copy()
        return c.copy()


@dataclass(frozen=True, eq=False)
class HolderEstimate:
    """Hölder exponent, seminorm and the sample set they were measured on.

    ``seminorm`` is ``max |f(w+d) - f(w)| / d**exponent`` over ``lags``;
    ``value_at_zero`` is ``|f(0)|``, reported apart from the seminorm.
    """

    exponent: float
    seminorm: float
    lags: np.ndarray
    increments: np.ndarray
    value_at_zero: float
    slope: float = float("nan")
    fit_lags: np.ndarray = field(default_factory=lambda: np.zeros(0))


def analyze(f: BoundaryFunction, K: Optional[int] = None) -> HarmonicSeries:
    """Fourier coefficients ``f_{-K} .. f_K`` of a sampled boundary function.

    ``K`` defaults to ``M/2 - 1``, the largest alias-free half-width.
    """
    M = f.grid.size
    if K is None:
        K = f.grid.max_half_width
    if K < 0:
        raise DomainError("K must be nonnegative")
    if K > M // 2 - 1:
        raise AliasingError(f"K={K} aliases on a grid of {M} points (need K <= {M // 2 - 1})")
    c = np.fft.ifft(f.values)
    k = np.arange(-K, K + 1)
    return HarmonicSeries(c[k % M] * _sign_alternation(k))


def synthesize(s: HarmonicSeries, grid: FrequencyGrid) -> BoundaryFunction:
    """Samples of ``sum_k f_k exp(-1j*k*omega)`` on ``grid``."""
    K = s.half_width
    if grid.size < 2 * K + 2:
        raise AliasingError(f"half-width {K} needs at least {2 * K + 2} grid points, got {grid.size}")
    a = np.zeros(grid.size, dtype=complex)
    k = s.indices
    a[k % grid.size] = s.coeffs * _sign_alternation(k)
    return BoundaryFunction(grid, np.fft.fft(a))


def positive_part(s: HarmonicSeries) -> CausalSeries:
    """Keep the coefficients with ``k >= 0``."""
    return CausalSeries(s.coeffs[s.half_width:])


def embed(h: CausalSeries, K: Optional[int] = None) -> HarmonicSeries:
    """Two-sided series whose negative-index coefficients are zero."""
    K = h.degree if K is None else K
    c = np.zeros(2 * K + 1, dtype=complex)
    n = min(K, h.degree) + 1
    c[K:K + n] = h.coeffs[:n]
    return HarmonicSeries(c)


def anticausal_leakage(f: BoundaryFunction) -> float:
    """Fraction of coefficient energy sitting at negative indices."""
    s = analyze(f)
    K = s.half_width
    e = np.abs(s.coeffs) ** 2
    total = float(np.sum(e))
    if total == 0.0:
        return 0.0
    return float(np.sum(e[:K]) / total)


def cauchy_positive_radial(f: BoundaryFunction, r, theta):
    """Cauchy-integral value of the positive-time part at ``z = r*exp(-1j*theta)``.

    Trapezoid rule on the grid of

        f+(z) = (1/2pi) * integral f(tau) / (1 - z*exp(1j*tau)) d tau,

    which is the analytic continuation of ``sum_{k>=0} f_k z**k`` into the
    disk.  ``theta`` is a frequency, so the radial path ends at the boundary
    point ``exp(-1j*theta)`` where the frequency response is sampled.
    Accepts scalars or broadcastable arrays for ``r`` and ``theta``.

    The rule aliases index ``k`` onto ``k + M``, an error of order
    ``r**M``; a :class:`QuadratureWarning` is issued when
    ``M*(1 - r) < 14``.
    """
    r_arr, th_arr = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    if np.any(r_arr < 0) or np.any(r_arr >= 1):
        raise DomainError("radius must satisfy 0 <= r < 1")
    if r_arr.size and f.grid.size * (1.0 - np.max(r_arr)) < QUADRATURE_CELLS:
        warnings.warn(
            f"grid of {f.grid.size} points under-resolves the Cauchy kernel at r={np.max(r_arr):.6g}",
            QuadratureWarning,
            stacklevel=2,
        )
    e = np.exp(1j * f.grid.nodes)
    out = np.empty(r_arr.shape, dtype=complex)
    for idx in np.ndindex(r_arr.shape):
        z = r_arr[idx] * np.exp(-1j * th_arr[idx])
        out[idx] = np.mean(f.values / (1.0 - z * e))
    if out.ndim == 0:
        return complex(out)
    return out


def dyadic_increments(f: BoundaryFunction, max_lag: float = np.pi):
    """Largest circular increment of ``f`` at each dyadic lag.

    Returns ``(lags, increments)`` for lags ``2pi*m/M`` with
    ``m = 1, 2, 4, ..., M/2`` and lag ``<= max_lag``.
    """
    M = f.grid.size
    v = f.values
    steps = []
    m = 1
    while m <= M // 2:
        if 2.0 * np.pi * m / M <= max_lag * (1 + 1e-12):
            steps.append(m)
        m *= 2
    steps = np.array(steps, dtype=int)
    inc = np.array([np.max(np.abs(np.roll(v, -m) - v)) for m in steps])
    return 2.0 * np.pi * steps / M, inc


def _value_at_zero(f: BoundaryFunction) -> float:
    return float(abs(f.values[f.grid.size // 2]))


def holder_modulus(f: BoundaryFunction, alpha: float, max_lag: float = np.pi) -> HolderEstimate:
    """Hölder seminorm of order ``alpha`` over the dyadic lag set."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"Hölder order must lie in (0, 1], got {alpha}")
    lags, inc = dyadic_increments(f, max_lag)
    semi = float(np.max(inc / lags ** alpha))
    return HolderEstimate(alpha, semi, lags, inc, _value_at_zero(f))


def holder_fit(
    f: BoundaryFunction,
    min_steps: int = 8,
    max_steps: int = 128,
) -> HolderEstimate:
    """Estimate the Hölder exponent from the log-log slope of the increments.

    The least-squares fit uses dyadic lags between ``min_steps`` and
    ``max_steps`` grid spacings.  Lags of a few grid cells are dominated by
    discretization ringing of conjugate functions; long lags see the global
    shape of ``f`` rather than its local regularity.  When the grid is too
    small to hold two lags in that window, all dyadic lags are used.

    The exponent is clipped into ``(0, 1]``; the raw slope is kept in
    ``slope``.  A constant function reports exponent 1 and seminorm 0.
    """
    lags, inc = dyadic_increments(f)
    steps = np.round(lags / f.grid.spacing).astype(int)
    sel = (steps >= min_steps) & (steps <= max_steps)
    if np.count_nonzero(sel) < 2:
        sel = np.ones_like(sel, dtype=bool)
    scale = max(1.0, float(np.max(np.abs(f.values))))
    sel &= inc > 1e-14 * scale
    if np.count_nonzero(sel) < 2:
        return HolderEstimate(1.0, 0.0, lags, inc, _value_at_zero(f), slope=float("nan"),
                              fit_lags=lags[sel])
    slope = float(np.polyfit(np.log(lags[sel]), np.log(inc[sel]), 1)[0])
    alpha = float(np.clip(slope, 1e-6, 1.0))
    semi = float(np.max(inc / lags ** alpha))
    return HolderEstimate(alpha, semi, lags, inc, _value_at_zero(f), slope=slope, fit_lags=lags[sel])


def resample(f: BoundaryFunction, grid: FrequencyGrid) -> BoundaryFunction:
    """Trigonometric interpolation of ``f`` onto a finer grid."""
    if grid.size == f.grid.size:
        return f
    if grid.size < f.grid.size:
        raise DomainError("resample only refines the grid")
    return synthesize(analyze(f), grid)


def sup_distance(f: BoundaryFunction, g: BoundaryFunction, oversample: int = 1) -> float:
    """``max_j |f_j - g_j|`` on the common grid, optionally after refinement."""
    if f.grid != g.grid:
        raise GridMismatchError(f"grids differ: {f.grid.size} vs {g.grid.size}")
    if oversample > 1:
        fine = f.grid.oversampled(oversample)
        d = synthesize(analyze(f.with_values(f.values - g.values)), fine)
        return d.sup_norm()
    return float(np.max(np.abs(f.values - g.values)))
