"""
CSV + JSON sidecar formats for fields and ensembles.

Field CSV::

    # grid: d,N_1..N_d,L_1..L_d,origin_1..origin_d
    x_1,...,x_d,value

one row per node in C order. Numbers are written with 17 significant
digits so a field read back and written again is byte-identical. The
sidecar ``<stem>.json`` holds the grid, any solve parameters and the
library version.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .core import Grid, ScalarField, VectorField
from .errors import DomainError
from .stochastic import Ensemble

FMT = "%.17g"


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _version():
    from . import __version__
    return __version__


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_sidecar(path, meta: dict):
    meta = {"fracflow_version": _version(), **meta}
    _atomic_write(sidecar_path(path), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_sidecar(path) -> dict:
    p = sidecar_path(path)
    return json.loads(p.read_text()) if p.exists() else {}


def _grid_header(g: Grid) -> str:
    nums = [str(g.dim)] + [str(n) for n in g.N] + [repr(v) for v in g.L] + [repr(v) for v in g.origin]
    return "# grid: " + ",".join(nums)


def _parse_grid_header(line: str) -> Grid:
    if not line.startswith("# grid:"):
        raise DomainError("field file must start with a '# grid:' header")
    parts = [s.strip() for s in line[len("# grid:"):].split(",")]
    try:
        d = int(parts[0])
        if len(parts) != 1 + 3 * d:
            raise ValueError
        N = tuple(int(v) for v in parts[1:1 + d])
        L = tuple(float(v) for v in parts[1 + d:1 + 2 * d])
        origin = tuple(float(v) for v in parts[1 + 2 * d:])
    except ValueError:
        raise DomainError(f"malformed grid header: {line.strip()!r}") from None
    return Grid(N, L, origin)


def _write_grid_csv(path, g: Grid, values: list):
    cols = [np.ravel(a) for a in np.meshgrid(*g.axes(), indexing="ij")]
    cols.extend(np.ravel(v) for v in values)
    body = np.column_stack(cols)
    lines = [_grid_header(g)]
    lines.extend(",".join(FMT % v for v in row) for row in body)
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def _read_grid_csv(path):
    path = Path(path)
    with open(path) as fh:
        header = fh.readline()
    g = _parse_grid_header(header)
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[0] != g.size or data.shape[1] <= g.dim:
        raise DomainError(f"expected {g.size} rows of more than {g.dim} columns, found {data.shape}")
    return g, data[:, g.dim:]


def write_field(path, field: ScalarField, meta: dict | None = None):
    """Write a field CSV and its sidecar."""
    _write_grid_csv(path, field.grid, [field.values])
    _write_sidecar(path, {"type": "field", "grid": field.grid.to_dict(), **(meta or {})})


def read_field(path) -> ScalarField:
    """Read a field CSV with a single value column."""
    g, vals = _read_grid_csv(path)
    if vals.shape[1] != 1:
        raise DomainError(f"expected one value column, found {vals.shape[1]}")
    return ScalarField(g, vals[:, 0].reshape(g.shape))


def write_vector_field(path, vf: VectorField, meta: dict | None = None):
    """Same layout as a field file with d value columns per row."""
    _write_grid_csv(path, vf.grid, list(vf.components))
    _write_sidecar(path, {"type": "vector-field", "grid": vf.grid.to_dict(), **(meta or {})})


def read_vector_field(path) -> VectorField:
    g, vals = _read_grid_csv(path)
    if vals.shape[1] != g.dim:
        raise DomainError(f"expected {g.dim} value columns, found {vals.shape[1]}")
    return VectorField(g, vals.T.reshape((g.dim,) + g.shape))


def write_ensemble(path, ens: Ensemble, meta: dict | None = None):
    """Write ensemble points as CSV (header x_1..x_d) plus sidecar."""
    path = Path(path)
    head = ",".join(f"x_{i + 1}" for i in range(ens.dim))
    lines = [head]
    lines.extend(",".join(FMT % v for v in row) for row in ens.points)
    _atomic_write(path, "\n".join(lines) + "\n")
    _write_sidecar(path, {"type": "ensemble", **ens.metadata(), **(meta or {})})


def read_ensemble(path) -> Ensemble:
    path = Path(path)
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    meta = read_sidecar(path)
    return Ensemble(pts, meta.get("t", 0.0), meta.get("seed", 0), meta.get("descriptor", {}))


def write_report(path, report):
    _atomic_write(Path(path), report.to_json() + "\n")
