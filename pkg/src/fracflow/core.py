"""
Frames, periodic grids, grid fields and the discrete Fourier pair.

Fourier convention (forward carries +ik.x)::

    F(k) = sum_x f(x) exp(+i k.x) dx^d
    f(x) = (2 pi)^-d sum_k F(k) exp(-i k.x) dk^d

With this sign a directional derivative theta.grad has multiplier
``-i k.theta`` and fractional powers copy over directly.

R^d is modelled by a periodic box. Heavy-tailed solutions wrap around the
box; :meth:`ScalarField.boundary_mass_fraction` measures how much mass sits
within one cell of the box edge so callers can decide whether the box is
large enough.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft

from ._config import get_threads
from .errors import DimensionMismatchError, DomainError

ORTHO_TOL = 1e-12


def as_direction(theta, dim=None) -> np.ndarray:
    """Validate a unit vector and return it as a float array."""
    v = np.atleast_1d(np.asarray(theta, dtype=float))
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatchError("direction must be a 1-D vector")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"direction has dimension {v.size}, expected {dim}")
    if abs(np.linalg.norm(v) - 1.0) > ORTHO_TOL:
        raise DomainError(f"direction {v} is not a unit vector")
    return v


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered orthonormal basis; ``matrix[l]`` is the direction theta_l."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.array(self.matrix, dtype=float))
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"frame needs d directions in R^d, got {m.shape}")
        gram = m @ m.T
        if np.max(np.abs(gram - np.eye(m.shape[0]))) > ORTHO_TOL:
            raise DomainError("frame directions are not orthonormal")
        if abs(abs(np.linalg.det(m)) - 1.0) > 1e-10:
            raise DomainError("frame determinant is not +-1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def directions(self) -> list[np.ndarray]:
        return [row for row in self.matrix]

    def __iter__(self):
        return iter(self.directions)

    def __len__(self):
        return self.dim

    def __getitem__(self, l):
        return self.matrix[l]

    def speeds(self, u) -> np.ndarray:
        """Directional speeds lambda_l = u.theta_l."""
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.size != self.dim:
            raise DimensionMismatchError(f"velocity has {u.size} entries, frame is {self.dim}-D")
        if not np.all(np.isfinite(u)):
            raise DomainError("velocity must be finite")
        lam = self.matrix @ u
        # rounding-level speeds (u along another frame direction) are zero
        return np.where(np.abs(lam) <= 1e-13 * np.abs(u).max(initial=0.0), 0.0, lam)

    def to_list(self):
        return self.matrix.tolist()

    @classmethod
    def canonical(cls, dim: int) -> "Frame":
        return cls(np.eye(dim))


def frame_from_angles(angles: Sequence[float] = (), dim: int | None = None) -> Frame:
    """Build a frame by rotating the canonical axes.

    ``d = 2`` takes one angle ``phi`` and yields rows ``(cos phi, sin phi)``
    and ``(-sin phi, cos phi)``. For ``d > 2`` the angles are Givens angles
    applied in pair order (1,2), (1,3), ..., (d-1,d); there are d(d-1)/2 of them.
    """
    angles = [float(a) for a in np.atleast_1d(np.asarray(angles, dtype=float))]
    m = len(angles)
    if dim is None:
        dim = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
    pairs = list(itertools.combinations(range(dim), 2))
    if len(pairs) != m:
        raise DimensionMismatchError(
            f"{dim}-D frame needs {len(pairs)} rotation angles, got {m}")
    rot = np.eye(dim)
    for (i, j), a in zip(pairs, angles):
        g = np.eye(dim)
        c, s = np.cos(a), np.sin(a)
        g[i, i] = g[j, j] = c
        g[i, j], g[j, i] = -s, s
        rot = rot @ g
    # theta_l = R e_l, so the directions are the rows of R^T
    return Frame(rot.T)


def project(x, frame: Frame) -> np.ndarray:
    """Coordinates (theta_1.x, ..., theta_d.x); accepts a batch of points."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != frame.dim:
        raise DimensionMismatchError(f"point dimension {x.shape[-1]} != frame dimension {frame.dim}")
    return x @ frame.matrix.T


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic box. ``origin`` is the coordinate of the first node."""

    N: tuple
    L: tuple
    origin: tuple = None

    def __post_init__(self):
        N = tuple(int(n) for n in np.atleast_1d(self.N))
        L = tuple(float(v) for v in np.atleast_1d(self.L))
        if len(L) == 1 and len(N) > 1:
            L = L * len(N)
        if len(N) != len(L):
            raise DimensionMismatchError("N and L must have one entry per axis")
        for n in N:
            if n < 8 or not _is_pow2(n):
                raise DomainError(f"points per axis must be a power of two >= 8, got {n}")
        if any(not (v > 0 and np.isfinite(v)) for v in L):
            raise DomainError("box extents must be positive")
        if self.origin is None:
            origin = tuple(-v / 2 for v in L)
        else:
            origin = tuple(float(v) for v in np.atleast_1d(self.origin))
            if len(origin) == 1 and len(N) > 1:
                origin = origin * len(N)
            if len(origin) != len(N):
                raise DimensionMismatchError("origin must have one entry per axis")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "origin", origin)

    @property
    def dim(self) -> int:
        return len(self.N)

    @property
    def shape(self) -> tuple:
        return self.N

    @property
    def size(self) -> int:
        return int(np.prod(self.N))

    @property
    def dx(self) -> tuple:
        return tuple(l / n for l, n in zip(self.L, self.N))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.dx))

    @property
    def volume(self) -> float:
        return float(np.prod(self.L))

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.dx, self.N)]

    def mesh(self, sparse=True) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij", sparse=sparse)

    def points(self) -> np.ndarray:
        """All nodes as an (N^d, d) array in C order."""
        return np.stack([m.ravel() for m in self.mesh(sparse=False)], axis=-1)

    def wavenumbers(self) -> list[np.ndarray]:
        """Per-axis k_j = 2 pi j / L in FFT order, j in {-N/2, ..., N/2-1}."""
        return [2 * np.pi * np.fft.fftfreq(n, d=l / n) for n, l in zip(self.N, self.L)]

    def kmesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.wavenumbers(), indexing="ij", sparse=True)

    def k_dot(self, theta) -> np.ndarray:
        """k.theta on the full spectral grid."""
        theta = as_direction(theta, self.dim)
        out = np.zeros(self.shape)
        for kk, th in zip(self.kmesh(), theta):
            out = out + kk * th
        return out

    def contains(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float).reshape(-1, self.dim)
        lo = np.array(self.origin)
        hi = lo + np.array(self.L)
        return np.all((p >= lo) & (p < hi), axis=1)

    def nearest_index(self, point) -> tuple:
        p = np.asarray(point, dtype=float)
        return tuple(int(round((pi - o) / h)) % n
                     for pi, o, h, n in zip(p, self.origin, self.dx, self.N))

    def to_dict(self) -> dict:
        return {"N": list(self.N), "L": list(self.L), "origin": list(self.origin)}

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        return cls(tuple(d["N"]), tuple(d["L"]), tuple(d["origin"]) if d.get("origin") is not None else None)


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.size:
            raise DimensionMismatchError(f"{v.size} values for a grid of {self.grid.size} nodes")
        v = v.reshape(self.grid.shape)
        object.__setattr__(self, "values", v)

    def mass(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_volume)

    def min(self) -> float:
        return float(np.min(self.values))

    def density_issues(self, mass_tol=5e-3, neg_tol=1e-9) -> list[str]:
        """Reasons this field is not a probability density (empty if it is)."""
        issues = []
        if self.min() < -neg_tol:
            issues.append(f"minimum value {self.min():.3e} below -{neg_tol:g}")
        if abs(self.mass() - 1.0) > mass_tol:
            issues.append(f"mass {self.mass():.6f} differs from 1 by more than {mass_tol:g}")
        return issues

    def boundary_mass_fraction(self) -> float:
        """Share of |mass| on the outermost layer of cells."""
        a = np.abs(self.values)
        total = a.sum()
        if total == 0:
            return 0.0
        mask = np.zeros(self.grid.shape, dtype=bool)
        for ax in range(self.grid.dim):
            idx = [slice(None)] * self.grid.dim
            idx[ax] = 0
            mask[tuple(idx)] = True
            idx[ax] = -1
            mask[tuple(idx)] = True
        return float(a[mask].sum() / total)

    def __add__(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * float(c))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Discrete transform values in FFT order on ``grid.wavenumbers()``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.size != self.grid.size:
            raise DimensionMismatchError(f"{v.size} modes for a grid of {self.grid.size} nodes")
        object.__setattr__(self, "values", v.reshape(self.grid.shape))


@dataclass(frozen=True, eq=False)
class VectorField:
    """d scalar components on one grid, stored as an array (d, *grid.shape)."""

    grid: Grid
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        want = (self.grid.dim,) + self.grid.shape
        if c.size != int(np.prod(want)):
            raise DimensionMismatchError(f"vector field needs shape {want}")
        object.__setattr__(self, "components", c.reshape(want))

    def __getitem__(self, i) -> ScalarField:
        return ScalarField(self.grid, self.components[i])

    @classmethod
    def from_fields(cls, fields):
        grid = fields[0].grid
        for f in fields[1:]:
            _same_grid(fields[0], f)
        return cls(grid, np.stack([f.values for f in fields]))

    @classmethod
    def constant_times(cls, u, f: ScalarField):
        """The flux u * rho for a constant velocity u."""
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.size != f.grid.dim:
            raise DimensionMismatchError("velocity dimension does not match grid")
        return cls(f.grid, u.reshape((-1,) + (1,) * f.grid.dim) * f.values[None])


def _same_grid(a, b):
    if a.grid != b.grid:
        raise DimensionMismatchError("fields live on different grids")


def _origin_phase(grid: Grid, sign: int) -> np.ndarray:
    ph = 1.0
    for kk, o in zip(grid.kmesh(), grid.origin):
        ph = ph * np.exp(sign * 1j * kk * o)
    return ph


def fourier_forward(f: ScalarField) -> SpectralField:
    """F(k) = sum_x f(x) exp(+i k.x) dx^d."""
    g = f.grid
    vals = np.asarray(f.values)
    if vals.shape != g.shape:
        raise DimensionMismatchError("field values do not match grid shape")
    raw = scipy.fft.ifftn(vals, norm="forward", workers=get_threads())
    return SpectralField(g, raw * _origin_phase(g, +1) * g.cell_volume)


def fourier_inverse(F: SpectralField, real: bool = True):
    """f(x) = (2 pi)^-d sum_k F(k) exp(-i k.x) dk^d.

    Returns a ScalarField (real part) by default; ``real=False`` returns the
    raw complex array.
    """
    g = F.grid
    vals = np.asarray(F.values)
    if vals.shape != g.shape:
        raise DimensionMismatchError("spectrum does not match grid shape")
    raw = scipy.fft.fftn(vals * _origin_phase(g, -1), workers=get_threads()) / g.volume
    if not real:
        return raw
    return ScalarField(g, raw.real)


def apply_multiplier(f: ScalarField, symbol: np.ndarray) -> ScalarField:
    """Inverse transform of symbol(k) * F(k). The real part is kept, which
    Hermitian-symmetrises the symbol on the Nyquist planes."""
    F = fourier_forward(f)
    return fourier_inverse(SpectralField(f.grid, F.values * symbol))


def delta_spectrum(grid: Grid) -> SpectralField:
    """Band-limited delta at the origin: every mode equals one."""
    return SpectralField(grid, np.ones(grid.shape, dtype=complex))


def delta_field(grid: Grid) -> ScalarField:
    return fourier_inverse(delta_spectrum(grid))


def gaussian_field(grid: Grid, center=None, width=1.0) -> ScalarField:
    """Normalised isotropic Gaussian exp(-|x-c|^2 / (2 width^2)) on the grid."""
    c = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float).reshape(-1)
    if c.size != grid.dim:
        raise DimensionMismatchError("center dimension does not match grid")
    r2 = 0.0
    for m, ci in zip(grid.mesh(), c):
        r2 = r2 + (m - ci) ** 2
    vals = np.exp(-r2 / (2 * width ** 2)) / (2 * np.pi * width ** 2) ** (grid.dim / 2)
    return ScalarField(grid, np.broadcast_to(vals, grid.shape))


def field_from_function(grid: Grid, func) -> ScalarField:
    """Sample ``func(*coords)`` on the grid nodes (coords broadcast, ij order)."""
    return ScalarField(grid, np.broadcast_to(func(*grid.mesh()), grid.shape))
