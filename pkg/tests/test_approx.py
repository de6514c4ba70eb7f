import numpy as np
import pytest

from spectralfactor.approx import (
    approx_error,
    approximant,
    best_approx_upper,
    error_sweep,
    fejer_mean,
    rate_fit,
    truncation,
    vallee_poussin_mean,
)
from spectralfactor.errors import DomainError
from spectralfactor.spectra import CausalSeries, FrequencyGrid

GEOM = CausalSeries((-0.5) ** np.arange(257))


class TestFejer:
    def test_triangular_weights(self):
        P = fejer_mean(CausalSeries(np.ones(3)), 2)
        assert np.allclose(P.coeffs, [1, 2 / 3, 1 / 3], atol=1e-15)

    def test_constant_fixed_point(self):
        for N in (0, 1, 5):
            assert np.allclose(fejer_mean(CausalSeries(np.array([2.5])), N).coeffs[:1], [2.5])

    def test_order_zero(self):
        assert np.allclose(fejer_mean(CausalSeries(np.ones(2)), 0).coeffs, [1])

    def test_negative_order(self):
        with pytest.raises(DomainError):
            fejer_mean(GEOM, -1)

    def test_positivity_of_real_part(self):
        # H = 1 + 2 sum_{k>=1} r**k z**k has real part (1 - r**2)/|1 - r z|**2 > 0
        r = 0.9
        H = CausalSeries(np.concatenate([[1.0], 2 * r ** np.arange(1, 200)]))
        g = FrequencyGrid(1024)
        for N in (1, 4, 16, 64):
            assert np.min(fejer_mean(H, N).series.boundary(g).values.real) >= -1e-12


class TestValleePoussin:
    def test_direct_formula(self):
        P = vallee_poussin_mean(CausalSeries(np.ones(3)), 1)
        assert np.allclose(P.coeffs, [1, 1], atol=1e-15)
        assert P.degree == 1

    def test_reproduction(self):
        assert np.allclose(vallee_poussin_mean(CausalSeries(np.ones(2)), 1).coeffs, [1, 1])

    def test_identity_with_fejer_means(self):
        N = 6
        lhs = vallee_poussin_mean(GEOM, N).coeffs
        f2 = fejer_mean(GEOM, 2 * N - 1).coeffs
        f1 = np.zeros_like(f2)
        f1[:N] = fejer_mean(GEOM, N - 1).coeffs
        assert np.allclose(lhs, 2 * f2 - f1, atol=1e-15)

    def test_coefficient_preservation(self, rng):
        H = CausalSeries(rng.standard_normal(300) + 1j * rng.standard_normal(300))
        for N in (1, 2, 7, 64, 128):
            P = vallee_poussin_mean(H, N)
            assert P.degree == 2 * N - 1
            assert np.max(np.abs(P.coeffs[: N + 1] - H.coeffs[: N + 1])) <= 1e-15

    def test_order_zero_rejected(self):
        with pytest.raises(DomainError):
            vallee_poussin_mean(GEOM, 0)

    def test_four_times_candidate_bound(self):
        cands = [truncation(GEOM, 8), fejer_mean(GEOM, 8), vallee_poussin_mean(GEOM, 4)]
        best = best_approx_upper(GEOM, 8, cands)
        assert approx_error(GEOM, vallee_poussin_mean(GEOM, 8)) <= 4 * best
        assert best == pytest.approx(min(approx_error(GEOM, c) for c in cands))


class TestApproxError:
    def test_polynomial_self(self):
        H = CausalSeries(np.array([1.0, -2.0, 0.5]))
        assert approx_error(H, H) < 1e-12

    def test_geometric_tail(self):
        for N in (2, 5, 10):
            err = approx_error(GEOM, truncation(GEOM, N))
            assert err == pytest.approx(0.5 ** (N + 1) / 0.5, rel=1e-9)

    def test_sweep_matches_individual(self):
        Ns = [2, 4, 8]
        sweep = error_sweep(GEOM, Ns, kind="trunc")
        assert np.allclose(sweep, [approx_error(GEOM, truncation(GEOM, n)) for n in Ns], rtol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            approximant(GEOM, 4, kind="remez")


class TestRateFit:
    Ns = np.array([8, 16, 32, 64, 128, 256])

    def test_exact_power_law(self):
        fit = rate_fit(self.Ns, self.Ns ** -0.5)
        assert fit.alpha_hat == pytest.approx(0.5, abs=1e-12)
        assert fit.residual < 1e-12

    def test_power_law_with_constant(self):
        fit = rate_fit(self.Ns, 3 * self.Ns ** -0.3)
        assert fit.alpha_hat == pytest.approx(0.3, abs=1e-12)
        assert fit.C_hat == pytest.approx(3, rel=1e-12)

    def test_floor_exclusion(self):
        e = self.Ns ** -0.5
        e[-2:] = 1e-9
        fit = rate_fit(self.Ns, e)
        assert not fit.used[-1] and not fit.used[-2]
        assert fit.alpha_hat == pytest.approx(0.5, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            rate_fit([1, 2, 8, 16], [1, 1, 1, 1])

    def test_negative_error(self):
        with pytest.raises(DomainError):
            rate_fit(self.Ns, -np.ones(6))


class TestBestApproxUpper:
    def test_single_candidate(self):
        assert best_approx_upper(GEOM, 8, [truncation(GEOM, 8)]) == approx_error(GEOM, truncation(GEOM, 8))

    def test_exact_polynomial(self):
        H = CausalSeries(np.array([1.0, 0.5, 0.25]))
        assert best_approx_upper(H, 4, [H]) < 1e-12

    def test_degree_check(self):
        with pytest.raises(DomainError):
            best_approx_upper(GEOM, 4, [truncation(GEOM, 8)])

    def test_empty(self):
        with pytest.raises(DomainError):
            best_approx_upper(GEOM, 4, [])
