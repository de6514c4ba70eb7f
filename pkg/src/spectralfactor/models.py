"""Builtin signal-plus-noise models.

Every model is an observation ``y = x + v`` with ``x`` of spectrum
``phi_x`` and white noise ``v`` of variance ``sigma2`` independent of ``x``,
so ``phi = phi_x + sigma2``, ``psi = phi_x`` and ``r_x(0)`` is the mean of
``phi_x``.  With ``sigma2 = 0`` the desired signal is the observation
itself and the Wiener filter is the identity.

For ``ar1`` and ``ar1_plus_noise`` the parameters describe the signal
spectrum ``phi_x``; for the other models they describe the observation
density ``phi`` and the signal is ``phi - sigma2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import AdmissibilityError, DomainError
from .factorization import SpectralDensity
from .spectra import FrequencyGrid
from .wiener import CrossSpectrum

__all__ = [
    "Model",
    "BUILTINS",
    "build_model",
    "from_density",
    "smooth_corpus",
    "holder_corpus",
    "sin_power_mean",
]


@dataclass(frozen=True, eq=False)
class Model:
    name: str
    signal: np.ndarray
    noise_var: float
    grid: FrequencyGrid
    rx0: float
    params: dict = field(default_factory=dict)
    holder_alpha: Optional[float] = None
    cross_values: Optional[np.ndarray] = None

    @property
    def simulable(self) -> bool:
        """Whether the joint law of signal and observation is known."""
        return self.cross_values is None

    @property
    def density(self) -> SpectralDensity:
        return SpectralDensity.from_values(self.grid, self.signal + self.noise_var)

    @property
    def cross(self) -> CrossSpectrum:
        if self.cross_values is not None:
            return CrossSpectrum.from_values(self.grid, self.cross_values, provenance=f"file:{self.name}")
        return CrossSpectrum.from_values(self.grid, self.signal, provenance=f"builtin:{self.name}")

    @property
    def signal_density(self) -> SpectralDensity:
        if not self.simulable:
            raise DomainError("the signal spectrum is unknown when only a cross-spectrum is given")
        return SpectralDensity.from_values(self.grid, self.signal)


def sin_power_mean(alpha: float) -> float:
    """``(1/2pi) * integral |sin(omega/2)|**alpha``."""
    return float(gamma_fn((alpha + 1) / 2) / (np.sqrt(np.pi) * gamma_fn(alpha / 2 + 1)))


def _poly_response(coeffs, w):
    return np.polynomial.polynomial.polyval(np.exp(-1j * w), np.asarray(coeffs, dtype=complex))


def _constant(grid, c=1.0, sigma2=0.0):
    return np.full(grid.size, float(c) - sigma2), float(c) - sigma2, None


def _cosine(grid, coeffs=(1.25, 0.5), sigma2=0.0):
    a = np.asarray(coeffs, dtype=float)
    k = np.arange(1, a.size)
    w = grid.nodes
    phi = a[0] + 2.0 * (np.cos(np.outer(w, k)) @ a[1:]) if a.size > 1 else np.full(grid.size, a[0])
    return phi - sigma2, a[0] - sigma2, None


def _ma(grid, coeffs=(1.0, 0.5), sigma2=0.0):
    b = np.asarray(coeffs, dtype=float)
    phi = np.abs(_poly_response(b, grid.nodes)) ** 2
    return phi - sigma2, float(np.sum(b ** 2)) - sigma2, None


def _ar1(grid, a=0.8, sigma2=0.0, unit_variance=False):
    scale = (1.0 - a * a) if unit_variance else 1.0
    phi_x = scale / np.abs(1.0 - a * np.exp(-1j * grid.nodes)) ** 2
    return phi_x, scale / (1.0 - a * a), None


def _ar1_plus_noise(grid, a=0.8, sigma2=1.0):
    phi_x, rx0, _ = _ar1(grid, a=a, unit_variance=True)
    return phi_x, rx0, None


def _asymmetric(grid, sigma2=0.0):
    w = grid.nodes
    return 1.5 + np.cos(w) + 0.4 * np.sin(2 * w) - sigma2, 1.5 - sigma2, None


def _holder(grid, alpha=0.5, c=0.5, sigma2=0.25):
    phi_x = (c - sigma2) + np.abs(np.sin(grid.nodes / 2.0)) ** alpha
    return phi_x, (c - sigma2) + sin_power_mean(alpha), alpha


def _pathological(grid, kind="slow_log_modulus", terms=4096, sigma2=0.0):
    from .pathology import make_pathological

    patho = make_pathological(kind, int(terms), grid)
    phi = patho.density.values - sigma2
    return phi, float(np.mean(phi)), None


# name -> (builder, default noise variance)
BUILTINS: Dict[str, tuple] = {
    "constant": (_constant, 0.0),
    "cosine": (_cosine, 0.0),
    "ma": (_ma, 0.0),
    "ar1": (_ar1, 0.0),
    "ar1_plus_noise": (_ar1_plus_noise, 1.0),
    "asymmetric": (_asymmetric, 0.0),
    "holder": (_holder, 0.25),
    "pathological": (_pathological, 0.0),
}


def build_model(name: str, grid: FrequencyGrid, density_floor: float = 0.0, **params) -> Model:
    """Instantiate a builtin model on ``grid``.

    ``sigma2`` sets the observation noise variance; each model has its own
    default (zero for pure densities).  ``density_floor`` is added to ``phi``
    as extra white observation noise, leaving ``psi`` unchanged.
    """
    try:
        builder, default_sigma2 = BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown model {name!r}; choose from {sorted(BUILTINS)}") from None
    sigma2 = float(params.pop("sigma2", default_sigma2))
    if sigma2 < 0 or density_floor < 0:
        raise DomainError("sigma2 and density_floor must be nonnegative")
    try:
        signal, rx0, alpha = builder(grid, sigma2=sigma2, **params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for model {name!r}: {exc}") from None
    signal = np.asarray(signal, dtype=float)
    noise = sigma2 + density_floor
    phi = signal + noise
    if np.min(phi) <= 0:
        j = int(np.argmin(phi))
        raise AdmissibilityError(
            f"model {name!r} is not strictly positive: phi={phi[j]:.6g} at omega={grid.nodes[j]:.6g}",
            omega=float(grid.nodes[j]), value=float(phi[j]),
        )
    params = dict(params, sigma2=sigma2)
    if density_floor:
        params["density_floor"] = density_floor
    return Model(name, signal, noise, grid, float(rx0), params, alpha)


def from_density(density, name: str = "file", cross=None, rx0=None, density_floor: float = 0.0) -> Model:
    """Model around arbitrary density samples.

    Without ``cross`` this is the pass-through model ``psi = phi`` with
    ``r_x(0)`` the mean of ``phi``.  With a cross-spectrum the signal
    variance ``rx0`` must be supplied, since it is not determined by
    ``phi`` and ``psi``.  ``density_floor`` is added to ``phi`` only.
    """
    grid = density.grid
    v = np.array(density.values.real, dtype=float)
    if cross is None:
        m = Model(name, v, 0.0, grid, float(np.mean(v)), {})
    else:
        if rx0 is None:
            raise DomainError("rx0 is required together with a cross-spectrum")
        cv = np.asarray(cross.values if hasattr(cross, "values") else cross, dtype=complex)
        if cv.shape != v.shape:
            raise DomainError("density and cross-spectrum have different lengths")
        m = Model(name, v, 0.0, grid, float(rx0), {}, cross_values=cv)
    if density_floor:
        m = Model(m.name, m.signal, density_floor, grid, m.rx0, {"density_floor": density_floor},
                  cross_values=m.cross_values)
    phi = m.signal + m.noise_var
    if np.min(phi) <= 0:
        j = int(np.argmin(phi))
        raise AdmissibilityError(f"density is not strictly positive at omega={grid.nodes[j]:.6g}",
                                 omega=float(grid.nodes[j]), value=float(phi[j]))
    return m


def smooth_corpus(grid: FrequencyGrid) -> Dict[str, SpectralDensity]:
    """Analytic (hence Hölder for every order) test densities."""
    specs = {
        "constant4": build_model("constant", grid, c=4.0),
        "cos125": build_model("cosine", grid, coeffs=[1.25, 0.5]),
        "ma_squared": build_model("ma", grid, coeffs=np.convolve([1, 0.9], [1, -0.4])),
        "ar1": build_model("ar1", grid, a=0.8),
        "asymmetric": build_model("asymmetric", grid),
        "ar1_plus_noise": build_model("ar1_plus_noise", grid),
        "ma3": build_model("ma", grid, coeffs=[1.0, -0.5, 0.3]),
    }
    return {k: m.density for k, m in specs.items()}


def holder_corpus(grid: FrequencyGrid, alphas=(0.3, 0.5, 0.7)) -> Dict[float, Model]:
    """``phi = 0.5 + |sin(omega/2)|**alpha`` observed in noise of variance 0.25."""
    return {a: build_model("holder", grid, alpha=a) for a in alphas}
