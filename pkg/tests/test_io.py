import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectralfactor.errors import DomainError
from spectralfactor.io import (
    dumps_report,
    read_boundary_csv,
    read_series_csv,
    to_jsonable,
    write_boundary_csv,
    write_columns_csv,
    write_report,
    write_series_csv,
)
from spectralfactor.spectra import BoundaryFunction, CausalSeries, FrequencyGrid

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestSeriesCsv:
    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(finite, finite), min_size=1, max_size=20))
    def test_exact_round_trip(self, tmp_path_factory, pairs):
        c = np.array([complex(a, b) for a, b in pairs])
        path = tmp_path_factory.mktemp("io") / "s.csv"
        write_series_csv(path, CausalSeries(c))
        assert np.array_equal(read_series_csv(path).coeffs, c)

    def test_header_and_layout(self, tmp_path):
        path = write_series_csv(tmp_path / "s.csv", CausalSeries(np.array([1.0, -0.5j])))
        lines = path.read_text().splitlines()
        assert lines[0] == "k,re,im"
        assert lines[2].startswith("1,0,")

    def test_wrong_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("n,re,im\n0,1,0\n")
        with pytest.raises(DomainError):
            read_series_csv(p)

    def test_negative_index(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("k,re,im\n-1,1,0\n")
        with pytest.raises(DomainError):
            read_series_csv(p)

    def test_sparse_indices_zero_filled(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("k,re,im\n0,1,0\n3,2,0\n")
        assert np.array_equal(read_series_csv(p).coeffs, [1, 0, 0, 2])


class TestBoundaryCsv:
    def test_round_trip(self, tmp_path, rng):
        g = FrequencyGrid(32)
        f = BoundaryFunction(g, rng.standard_normal(32) + 1j * rng.standard_normal(32))
        back = read_boundary_csv(write_boundary_csv(tmp_path / "b.csv", f))
        assert back.grid == g and np.array_equal(back.values, f.values)

    def test_rejects_foreign_grid(self, tmp_path):
        p = tmp_path / "b.csv"
        write_columns_csv(p, ("omega", "re", "im"), np.linspace(0, 1, 8), np.ones(8), np.zeros(8))
        with pytest.raises(DomainError):
            read_boundary_csv(p)


class TestReports:
    def test_seventeen_digits(self):
        text = dumps_report({"x": 0.1, "y": 2.0, "z": 1e-300})
        data = json.loads(text)
        assert "0.10000000000000001" in text and '"y": 2.0' in text
        assert data["x"] == 0.1 and data["z"] == 1e-300

    def test_sorted_keys_and_numpy_values(self):
        rep = {"b": np.float64(1.5), "a": np.arange(3), "c": 1 + 2j, "d": np.bool_(True)}
        data = json.loads(dumps_report(rep))
        assert list(data) == ["a", "b", "c", "d"]
        assert data["a"] == [0, 1, 2] and data["c"] == {"re": 1.0, "im": 2.0} and data["d"] is True

    def test_non_finite_values_are_strings(self):
        assert to_jsonable(float("nan")) == "nan"
        data = json.loads(dumps_report({"v": [math.inf]}))
        assert data["v"] == ["inf"]

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            to_jsonable(object())

    @settings(max_examples=60, deadline=None)
    @given(st.dictionaries(st.text(min_size=1, max_size=5), finite, max_size=6))
    def test_float_round_trip(self, d):
        assert json.loads(dumps_report(d)) == d

    def test_write_creates_directories(self, tmp_path):
        p = write_report(tmp_path / "a" / "b" / "r.json", {"k": 1})
        assert json.loads(p.read_text()) == {"k": 1}
