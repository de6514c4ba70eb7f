"""Property-based checks of the transform layer and the factorization."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spectralfactor.approx import vallee_poussin_mean
from spectralfactor.factorization import SpectralDensity, factorize
from spectralfactor.spectra import (
    BoundaryFunction,
    CausalSeries,
    FrequencyGrid,
    HarmonicSeries,
    analyze,
    embed,
    positive_part,
    synthesize,
)

small = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
GRID = FrequencyGrid(64)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 31, elements=small), arrays(np.float64, 31, elements=small))
def test_synthesize_analyze_round_trip(re, im):
    s = HarmonicSeries(re + 1j * im)
    back = analyze(synthesize(s, GRID), s.half_width)
    assert np.allclose(back.coeffs, s.coeffs, atol=1e-12 * max(1.0, np.max(np.abs(s.coeffs))))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 64, elements=small))
def test_real_boundary_gives_hermitian_coefficients(v):
    c = analyze(BoundaryFunction(GRID, v)).coeffs
    assert np.allclose(c, np.conj(c[::-1]), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 31, elements=small))
def test_positive_part_is_a_projection(re):
    s = HarmonicSeries(re.astype(complex))
    p = positive_part(s)
    assert np.array_equal(positive_part(embed(p)).coeffs, p.coeffs)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 4, elements=st.floats(-0.6, 0.6)), st.floats(0.05, 2.0))
def test_factorization_identity_for_random_positive_polynomials(b, floor):
    grid = FrequencyGrid(1024)
    w = grid.nodes
    vals = floor + np.abs(np.polynomial.polynomial.polyval(np.exp(-1j * w), np.r_[1.0, b])) ** 2
    d = SpectralDensity.from_values(grid, vals)
    _, f, hw = factorize(d)
    assert np.max(np.abs(f.product() - vals)) / np.max(vals) <= 1e-8
    assert np.max(np.abs(hw.boundary(grid).values * f.phi_plus_boundary.values - 1)) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 200, elements=small), st.integers(1, 90))
def test_vallee_poussin_preserves_low_coefficients(c, N):
    P = vallee_poussin_mean(CausalSeries(c), N)
    assert np.array_equal(P.coeffs[: N + 1], c[: N + 1].astype(complex))
