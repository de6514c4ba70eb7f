import numpy as np
import pytest

from spectralfactor.approx import error_sweep, rate_fit
from spectralfactor.errors import DomainError
from spectralfactor.factorization import SpectralDensity, factorize, outer_function
from spectralfactor.models import smooth_corpus
from spectralfactor.pathology import (
    PROBE_RADII,
    conjugate_partial_sum,
    disk_algebra_gap,
    gamma_divergence_probe,
    make_pathological,
    make_pathological_gamma,
    outer_divergence_probe,
    sine_coefficients,
)
from spectralfactor.spectra import BoundaryFunction, CausalSeries, FrequencyGrid, holder_fit

BIG = FrequencyGrid(2 ** 18)


@pytest.fixture(scope="module")
def patho():
    return make_pathological("slow_log_modulus", 4096, BIG)


class TestConstruction:
    def test_small_truncation(self):
        P = make_pathological(K_terms=8)
        k = np.arange(2, 9)
        assert conjugate_partial_sum(P, 0.0) == pytest.approx(-np.sum(1 / (k * np.log(k))), rel=1e-14)
        assert np.all(P.density.values > 0)
        assert np.max(np.abs(P.log_boundary.values)) <= np.sum(P.coefficients)

    def test_positive_for_both_constructions(self):
        for kind in ("slow_log_modulus", "lacunary_log"):
            P = make_pathological(kind, 1024)
            assert np.all(P.density.values > 0)
            assert P.density.values.dtype.kind == "f"

    def test_sine_series_matches_direct_sum(self):
        P = make_pathological(K_terms=16)
        w = P.grid.nodes
        k = np.arange(2, 17)
        direct = np.sum(np.sin(np.outer(w, k)) / (k * np.log(k)), axis=1)
        assert np.allclose(P.log_boundary.values, direct, atol=1e-13)

    def test_shifted_angle_set(self):
        P = make_pathological(K_terms=64, angles=(0.0, 1.0))
        Q0 = make_pathological(K_terms=64)
        w = P.grid.nodes
        k = np.arange(2, 65)
        shifted = np.sum(np.sin(np.outer(w - 1.0, k)) / (k * np.log(k)), axis=1)
        assert np.allclose(P.log_boundary.values, Q0.log_boundary.values + shifted, atol=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            sine_coefficients("slow_log_modulus", 4)
        with pytest.raises(DomainError):
            sine_coefficients("weierstrass", 64)


class TestConjugateGrowth:
    Ks = [2 ** j for j in range(6, 14)]

    def test_doubling_monotone(self):
        sums = [conjugate_partial_sum(sine_coefficients("slow_log_modulus", K)) for K in self.Ks]
        assert np.all(np.diff(sums) < 0)

    def test_tail_integral_lower_bound(self):
        sums = np.array([conjugate_partial_sum(sine_coefficients("slow_log_modulus", K)) for K in self.Ks])
        Ks = np.array(self.Ks, dtype=float)
        tail = np.log(np.log(Ks[1:])) - np.log(np.log(Ks[:-1]))
        assert np.all(-np.diff(sums) >= 0.5 * tail)

    def test_holder_collapse(self):
        g = FrequencyGrid(2 ** 14)
        alphas = [holder_fit(make_pathological(K_terms=K, grid=g).log_boundary).exponent
                  for K in (64, 256, 1024, 4096)]
        assert alphas[-1] <= alphas[0]


class TestOuterProbe:
    def test_smooth_trace_converges(self):
        for name, d in smooth_corpus(BIG).items():
            assert outer_divergence_probe(d, 0.0).shrinking(), name

    def test_singular_angle(self, patho):
        rec = outer_divergence_probe(patho, 0.0)
        assert rec.nondecreasing
        assert np.all(rec.increments > 0)
        assert rec.oscillation > 0.5 * rec.phi_theta

    def test_off_singular_angle_is_bounded(self, patho):
        for theta in (0.5, np.pi / 2, np.pi):
            rec = outer_divergence_probe(patho, theta)
            assert rec.max_value <= 2 * rec.values[0], theta
            assert rec.shrinking(), theta

    def test_lacunary_surrogate(self):
        P = make_pathological("lacunary_log", 4096, BIG)
        assert outer_divergence_probe(P, 0.0).nondecreasing

    def test_radius_domain(self, patho):
        with pytest.raises(DomainError):
            outer_divergence_probe(patho, 0.0, [0.5, 1.0])


class TestGammaProbe:
    def test_polynomial_gamma(self, grid4096):
        w = grid4096.nodes
        G = BoundaryFunction(grid4096, 2 + 3 * np.exp(-1j * w))
        rec = gamma_divergence_probe(G, 0.0, [0.1, 0.2, 0.3])
        assert np.allclose(rec.values, 2 + 3 * rec.radii, atol=1e-12)

    def test_singular_angle(self):
        rec = gamma_divergence_probe(make_pathological_gamma(4096, BIG), 0.0)
        assert np.all(np.diff(rec.values) > 0)

    def test_oracle_partial_sum(self):
        # gamma_plus of the sine series is (1/2i) sum b_k z**k, so at theta = 0
        # its modulus is half the partial sum sum b_k r**k
        rec = gamma_divergence_probe(make_pathological_gamma(4096, BIG), 0.0, [0.9, 0.99])
        b = sine_coefficients("slow_log_modulus", 4096)
        k = np.arange(b.size)
        oracle = [0.5 * np.sum(b * r ** k) for r in (0.9, 0.99)]
        assert np.allclose(rec.values, oracle, rtol=1e-8)

    def test_alternating_angle_is_bounded(self):
        rec = gamma_divergence_probe(make_pathological_gamma(4096, BIG), np.pi)
        assert rec.max_value <= 2 * rec.values[0]

    def test_radii_order(self, grid4096):
        with pytest.raises(DomainError):
            gamma_divergence_probe(BoundaryFunction(grid4096, np.ones(4096)), 0.0, [0.9, 0.5])


class TestDiskAlgebraGap:
    def test_constant(self):
        res = disk_algebra_gap(CausalSeries(np.array([1.0])))
        assert res.gap < 1e-15 and res.winner != "zero"

    def test_smooth(self, grid4096):
        F = outer_function(SpectralDensity.from_function(grid4096, lambda w: 1.25 + np.cos(w)))
        res = disk_algebra_gap(F.F_plus_boundary, Ns=(32,), include_zero=False)
        assert res.gap <= 1e-3

    def test_empty_candidates(self):
        with pytest.raises(DomainError):
            disk_algebra_gap(CausalSeries(np.array([1.0])), Ns=(), include_zero=False)

    def test_ordering_between_corpora(self, patho):
        bad = disk_algebra_gap(outer_function(patho.density).F_plus_boundary)
        for name, d in smooth_corpus(FrequencyGrid(4096)).items():
            good = disk_algebra_gap(outer_function(d).F_plus_boundary)
            assert good.gap / good.norm < 0.01 * bad.gap / bad.norm, name


class TestConverseDirection:
    def test_rate_degrades_with_truncation(self):
        g = FrequencyGrid(2 ** 15)
        Ns = [4, 8, 16, 32, 64, 128]
        errs, alphas = [], []
        for K in (256, 1024, 4096):
            _, f, _ = factorize(make_pathological(K_terms=K, grid=g).density)
            e = error_sweep(f.phi_plus, Ns)
            errs.append(e)
            alphas.append(rate_fit(Ns, e).alpha_hat)
        assert np.all(np.diff(np.array(errs), axis=0) > 0)
        assert np.all(np.diff(alphas) < 0)


def test_default_radii():
    assert list(PROBE_RADII) == [0.9, 0.99, 0.999, 0.9999]
