"""Stationary-process simulation and Monte Carlo checks.

Sample paths are produced by driving the truncated causal factor
``phi_plus`` with unit-variance white noise from NumPy's PCG64 generator.
Replica ``r`` of an experiment with seed ``s`` uses ``default_rng(s + r)``
and nothing else, so replicas can run in any order or in parallel.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np
import scipy.signal

from .errors import DomainError
from .factorization import SpectralDensity, factorize
from .spectra import CausalSeries, analyze

__all__ = [
    "GENERATOR",
    "MIN_SAMPLES",
    "WHITENESS_LAGS",
    "SimulationResult",
    "WhitenessResult",
    "MSEEstimate",
    "PeriodogramCheck",
    "worker_count",
    "simulate_process",
    "apply_fir",
    "sample_autocorrelation",
    "whiteness_bound",
    "whiteness_experiment",
    "mse_experiment",
    "periodogram_check",
]

GENERATOR = "numpy.random.PCG64"
MIN_SAMPLES = 4096
WHITENESS_LAGS = 10


def worker_count(tasks: int) -> int:
    """Thread count for ``tasks`` independent jobs, capped by ``SPECTRALFACTOR_THREADS``."""
    cap = os.environ.get("SPECTRALFACTOR_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise DomainError(f"SPECTRALFACTOR_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(tasks, limit))


def _parallel_map(fn, items):
    items = list(items)
    workers = worker_count(len(items))
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _white(rng: np.random.Generator, n: int, complex_valued: bool) -> np.ndarray:
    if complex_valued:
        z = rng.standard_normal((2, n))
        return (z[0] + 1j * z[1]) / np.sqrt(2.0)
    return rng.standard_normal(n)


def _factor_taps(phi, K: int) -> np.ndarray:
    if isinstance(phi, CausalSeries):
        return phi.truncate(K).real_if_close()
    _, factors, _ = factorize(phi)
    return factors.phi_plus.truncate(K).real_if_close()


def _drive(taps: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    K = taps.shape[0] - 1
    w = _white(rng, n + K, np.iscomplexobj(taps))
    return scipy.signal.lfilter(taps, [1.0], w)[K:]


def simulate_process(phi, n: int, seed: int, K: int = 256) -> np.ndarray:
    """Sample path of length ``n`` with spectral density ``phi``.

    Parameters
    ----------
    phi : SpectralDensity or CausalSeries
        Target density, or an already computed causal factor.
    n : int
        Number of samples returned; at least 4096.
    seed : int
        Seed of the PCG64 generator.
    K : int
        Degree of the FIR truncation of ``phi_plus``; the first ``K`` output
        samples are discarded as warm-up.

    Returns
    -------
    numpy.ndarray
        Real samples when ``phi_plus`` has real coefficients (``phi`` even),
        complex samples otherwise.
    """
    if n < MIN_SAMPLES:
        raise DomainError(f"n must be at least {MIN_SAMPLES}, got {n}")
    taps = _factor_taps(phi, K)
    return _drive(taps, n, np.random.default_rng(seed))


def apply_fir(h, x) -> np.ndarray:
    """Causal direct-form convolution ``sum_k h_k x_{n-k}`` with zero initial state."""
    taps = h.real_if_close() if isinstance(h, CausalSeries) else np.asarray(h)
    return scipy.signal.lfilter(taps, [1.0], np.asarray(x))


def sample_autocorrelation(x, max_lag: int = WHITENESS_LAGS) -> np.ndarray:
    """Normalized sample autocorrelations ``rho_1 .. rho_max_lag``.

    Uses the biased estimator ``sum_t x_{t+k} conj(x_t) / sum_t |x_t|**2``
    after removing the sample mean, so every value has modulus at most one.
    Complex input yields complex values.
    """
    x = np.asarray(x)
    x = x - np.mean(x)
    den = np.real(np.vdot(x, x))
    if den == 0:
        raise DomainError("autocorrelation of a constant sequence is undefined")
    rho = np.array([np.vdot(x[:-k], x[k:]) for k in range(1, max_lag + 1)]) / den
    return rho.real if not np.iscomplexobj(x) else rho


def whiteness_bound(n: int) -> float:
    """Three-standard-error band ``3/sqrt(n)`` for white-noise autocorrelations."""
    return 3.0 / np.sqrt(n)


@dataclass(frozen=True, eq=False)
class WhitenessResult:
    """Lag ``1..L`` autocorrelations of whitened sequences over replicas.

    The gate is applied to the replica mean; ``exceedances`` counts the
    single-replica values outside the band for reference.
    """

    n: int
    seed: int
    autocorr: np.ndarray
    bound: float
    generator: str = GENERATOR

    @property
    def mean(self) -> np.ndarray:
        return np.mean(self.autocorr, axis=0)

    @property
    def exceedances(self) -> int:
        return int(np.count_nonzero(np.abs(self.autocorr) > self.bound))

    @property
    def passed(self) -> bool:
        return bool(np.all(np.abs(self.mean) <= self.bound))


@dataclass(frozen=True, eq=False)
class MSEEstimate:
    """Replica mean of a realized mean-square error and its standard error."""

    mean: float
    se: float
    replicas: np.ndarray

    @classmethod
    def from_replicas(cls, values) -> "MSEEstimate":
        v = np.asarray(values, dtype=float)
        se = float(np.std(v, ddof=1) / np.sqrt(v.size)) if v.size > 1 else float("nan")
        return cls(float(np.mean(v)), se, v)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Outcome of a filtering experiment on simulated data."""

    n: int
    mse: float
    mse_se: float
    mmse_ref: float
    autocorr: np.ndarray
    seed: int
    replicas: int
    generator: str = GENERATOR
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mse < 0:
            raise DomainError("realized MSE must be nonnegative")
        if np.any(np.abs(self.autocorr) > 1.0 + 1e-12):
            raise DomainError("autocorrelation estimates must lie in [-1, 1]")


def whiteness_experiment(
    phi: SpectralDensity,
    n: int = 2 ** 17,
    seed: int = 0,
    replicas: int = 16,
    K: int = 256,
    whitening: Optional[CausalSeries] = None,
    max_lag: int = WHITENESS_LAGS,
) -> WhitenessResult:
    """Simulate ``phi``, apply the whitening filter, and measure whiteness.

    The first ``K`` filtered samples are dropped as warm-up of the FIR
    whitening filter.
    """
    if n < MIN_SAMPLES:
        raise DomainError(f"n must be at least {MIN_SAMPLES}, got {n}")
    _, factors, hw = factorize(phi)
    taps = factors.phi_plus.truncate(K).real_if_close()
    hw = (whitening if whitening is not None else hw).truncate(K)

    def one(r):
        y = _drive(taps, n + K, np.random.default_rng(seed + r))
        e = apply_fir(hw, y)[K:]
        return sample_autocorrelation(e, max_lag)

    rho = np.array(_parallel_map(one, range(replicas)))
    return WhitenessResult(n, seed, rho, whiteness_bound(n))


def mse_experiment(
    signal,
    noise_var: float,
    filters: Mapping[str, CausalSeries],
    n: int = 2 ** 17,
    seed: int = 0,
    replicas: int = 16,
    K: int = 256,
) -> Dict[str, MSEEstimate]:
    """Realized MSE of causal FIR estimators of ``x`` from ``y = x + v``.

    ``x`` is simulated from ``signal`` (a density or its causal factor) and
    ``v`` is white noise of variance ``noise_var``.  Every filter sees the
    same sample paths within a replica.  The first ``len(h) - 1`` estimates
    of each filter are discarded.
    """
    if n < MIN_SAMPLES:
        raise DomainError(f"n must be at least {MIN_SAMPLES}, got {n}")
    if noise_var < 0:
        raise DomainError("noise variance must be nonnegative")
    taps = _factor_taps(signal, K)
    names = list(filters)
    coeffs = [filters[k].real_if_close() if isinstance(filters[k], CausalSeries) else np.asarray(filters[k])
              for k in names]

    def one(r):
        rng = np.random.default_rng(seed + r)
        x = _drive(taps, n, rng)
        v = _white(rng, n, np.iscomplexobj(x))
        y = x + np.sqrt(noise_var) * v
        out = []
        for h in coeffs:
            d = h.shape[0] - 1
            err = x[d:] - scipy.signal.lfilter(h, [1.0], y)[d:]
            out.append(float(np.mean(np.abs(err) ** 2)))
        return out

    per = np.array(_parallel_map(one, range(replicas)))
    return {name: MSEEstimate.from_replicas(per[:, i]) for i, name in enumerate(names)}


@dataclass(frozen=True, eq=False)
class PeriodogramCheck:
    """Welch estimate compared bin by bin with the target density."""

    omega: np.ndarray
    estimate: np.ndarray
    reference: np.ndarray
    segments: int
    fraction: float


def periodogram_check(x, phi: SpectralDensity, nperseg: int = 256, nsigma: float = 3.0) -> PeriodogramCheck:
    """Fraction of Welch bins within ``nsigma`` standard errors of ``phi``.

    Non-overlapping Hann segments are averaged; the standard error of a bin
    is ``phi / sqrt(segments)``.  The reference is the trigonometric
    interpolant of ``phi`` evaluated at the Welch frequencies.
    """
    x = np.asarray(x)
    segments = x.shape[0] // nperseg
    if segments < 2:
        raise DomainError("sequence too short for the requested segment length")
    f, p = scipy.signal.welch(x, fs=2 * np.pi, window="hann", nperseg=nperseg, noverlap=0,
                              return_onesided=False, detrend=False, scaling="density")
    est = 2 * np.pi * p
    s = analyze(phi.boundary)
    ref = np.real(np.exp(-1j * np.outer(f, s.indices)) @ s.coeffs)
    within = np.abs(est - ref) <= nsigma * ref / np.sqrt(segments)
    order = np.argsort(f)
    return PeriodogramCheck(f[order], est[order], ref[order], segments, float(np.mean(within)))
