"""CSV and JSON artifacts.

Series files have columns ``k,re,im`` and boundary files ``omega,re,im``.
Floats are written with 17 significant digits so that values round-trip
exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from .errors import DomainError
from .spectra import BoundaryFunction, CausalSeries, FrequencyGrid

__all__ = [
    "write_series_csv",
    "read_series_csv",
    "write_boundary_csv",
    "write_columns_csv",
    "read_boundary_csv",
    "to_jsonable",
    "dumps_report",
    "write_report",
]

PathLike = Union[str, Path]


def _fmt(x: float) -> str:
    # adding zero turns a negative zero into a positive one
    return format(float(x) + 0.0, ".17g")


def _json_float(x: float) -> str:
    s = _fmt(x)
    return s if any(c in s for c in ".en") else s + ".0"


def _write_rows(path: PathLike, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _read_rows(path: PathLike, header):
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        first = next(r, None)
        if first is None or [c.strip() for c in first] != list(header):
            raise DomainError(f"{path}: expected header {','.join(header)}")
        rows = [row for row in r if row]
    try:
        return np.array([[float(c) for c in row] for row in rows], dtype=float).reshape(-1, len(header))
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None


def write_series_csv(path: PathLike, s: CausalSeries) -> Path:
    """Write causal coefficients as ``k,re,im`` rows."""
    c = s.coeffs
    return _write_rows(path, ("k", "re", "im"),
                       ((k, _fmt(v.real), _fmt(v.imag)) for k, v in enumerate(c)))


def read_series_csv(path: PathLike) -> CausalSeries:
    """Read a ``k,re,im`` file; missing indices are zero."""
    a = _read_rows(path, ("k", "re", "im"))
    if a.size == 0:
        raise DomainError(f"{path}: no coefficients")
    k = a[:, 0].astype(int)
    if np.any(k < 0) or np.any(k != a[:, 0]):
        raise DomainError(f"{path}: indices must be nonnegative integers")
    c = np.zeros(k.max() + 1, dtype=complex)
    c[k] = a[:, 1] + 1j * a[:, 2]
    return CausalSeries(c)


def write_boundary_csv(path: PathLike, f: BoundaryFunction) -> Path:
    """Write boundary samples as ``omega,re,im`` rows in grid order."""
    return _write_rows(path, ("omega", "re", "im"),
                       ((_fmt(w), _fmt(v.real), _fmt(v.imag)) for w, v in zip(f.grid.nodes, f.values)))


def write_columns_csv(path: PathLike, header: Sequence[str], *columns) -> Path:
    """Write equal-length real columns under ``header``."""
    return _write_rows(path, tuple(header), ([_fmt(v) for v in row] for row in zip(*columns)))


def read_boundary_csv(path: PathLike) -> BoundaryFunction:
    """Read ``omega,re,im`` samples; the rows must form a standard grid."""
    a = _read_rows(path, ("omega", "re", "im"))
    grid = FrequencyGrid(a.shape[0])
    if not np.allclose(a[:, 0], grid.nodes, rtol=0, atol=1e-9):
        raise DomainError(f"{path}: omega column is not the grid -pi + 2*pi*j/M")
    return BoundaryFunction(grid, a[:, 1] + 1j * a[:, 2])


def to_jsonable(obj: Any) -> Any:
    """Convert NumPy values and containers to plain JSON types.

    Complex numbers become ``{"re": ..., "im": ...}`` and non-finite floats
    become strings so the output stays strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class _Encoder(json.JSONEncoder):
    def iterencode(self, o, _one_shot=False):
        # the C encoder has a fixed float format, so use the Python path
        return json.encoder._make_iterencode(
            {}, self.default, json.encoder.py_encode_basestring, self.indent, _json_float,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def dumps_report(report: dict) -> str:
    """Serialize a report with sorted keys and 17-digit floats."""
    return json.dumps(to_jsonable(report), cls=_Encoder, indent=2, sort_keys=True) + "\n"


def write_report(path: PathLike, report: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report))
    return path
