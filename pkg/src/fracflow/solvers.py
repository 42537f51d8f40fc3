"""
Spectral solvers for the fractional advection, advection-dispersion,
directional heat and Poisson-shift transport equations.

Each solution is an exact Fourier product, so no time stepping is done:
the initial spectrum is multiplied by the exponentiated symbol and
transformed back. Heavy-tailed solutions wrap around the periodic box;
choose the box so that ``boundary_mass_fraction`` stays small.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import poisson

from .core import (Frame, Grid, ScalarField, SpectralField, as_direction, delta_spectrum,
                   fourier_forward, fourier_inverse, gaussian_field)
from .errors import (DimensionMismatchError, DomainError, InstabilityError, OrderError,
                     TruncationError)
from .fracops import directional_operator_symbol, symbol_from_projection
from .stable import StableLaw, _density_unit, _upper_tail, stable_density

KINDS = ("advection", "fade", "heat-directional", "fp-transport")


@dataclass(frozen=True, eq=False)
class SolveSpec:
    """Problem description shared by all solvers.

    ``initial`` is a ScalarField on ``grid`` or a named datum: ``"delta"``,
    ``"gaussian"`` or a mapping ``{"name": "gaussian", "width": w, "center": c}``.
    ``theta`` selects the direction for heat-directional problems and
    defaults to the first frame direction.
    """

    kind: str
    grid: Grid
    alpha: float
    t: float
    frame: Frame | None = None
    u: Any = None
    beta: float | None = None
    lam: float | None = None
    initial: Any = "delta"
    theta: Any = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown equation kind {self.kind!r}; expected one of {KINDS}")
        if not (self.t >= 0 and np.isfinite(self.t)):
            raise DomainError("time must be finite and non-negative")
        _check_alpha(self.alpha)
        if self.kind == "fade" and self.beta is not None and not (1 < float(self.beta) < 2):
            raise OrderError(f"FADE needs beta in (1, 2), got {self.beta}")
        if self.lam is not None and not float(self.lam) >= 0:
            raise DomainError("Poisson rate must be non-negative")
        frame =self.frame if self.frame is not None else Frame.canonical(self.grid.dim)
        if not isinstance(frame, Frame):
            frame = Frame(np.asarray(frame, dtype=float))
        if frame.dim != self.grid.dim:
            raise DimensionMismatchError("frame and grid dimensions differ")
        object.__setattr__(self, "frame", frame)
        if self.u is not None:
            u = np.asarray(self.u, dtype=float).reshape(-1)
            if u.size != self.grid.dim:
                raise DimensionMismatchError("velocity and grid dimensions differ")
            if not np.all(np.isfinite(u)):
                raise DomainError("velocity entries must be finite")
            object.__setattr__(self, "u", u)

    @property
    def speeds(self) -> np.ndarray:
        """lambda_l = u.theta_l."""
        u = self.u if self.u is not None else np.zeros(self.grid.dim)
        return self.frame.speeds(u)

    def with_time(self, t) -> "SolveSpec":
        return replace(self, t=float(t))

    def to_dict(self) -> dict:
        init = self.initial
        if isinstance(init, ScalarField):
            init = "field"
        return {
            "kind": self.kind, "grid": self.grid.to_dict(), "alpha": self.alpha, "t": self.t,
            "frame": self.frame.to_list(), "u": None if self.u is None else list(map(float, self.u)),
            "beta": self.beta, "lam": self.lam, "initial": init,
            "theta": None if self.theta is None else list(map(float, np.atleast_1d(self.theta))),
        }


def initial_field(spec_or_grid, initial=None) -> ScalarField:
    """Realise a named initial datum on the grid."""
    if isinstance(spec_or_grid, SolveSpec):
        grid, initial = spec_or_grid.grid, spec_or_grid.initial
    else:
        grid = spec_or_grid
    return _initial_spectrum(grid, initial)[1]


def _initial_spectrum(grid, initial):
    if isinstance(initial, ScalarField):
        if initial.grid != grid:
            raise DimensionMismatchError("initial field lives on a different grid")
        return fourier_forward(initial).values, initial
    name, opts = initial, {}
    if isinstance(initial, dict):
        opts = {k: v for k, v in initial.items() if k != "name"}
        name = initial.get("name")
    if name == "delta":
        F = delta_spectrum(grid)
        return F.values, fourier_inverse(F)
    if name == "gaussian":
        f = gaussian_field(grid, opts.get("center"), opts.get("width", 1.0))
        return fourier_forward(f).values, f
    raise DomainError(f"unknown initial datum {initial!r}")


def _solve_with_symbol(spec, symbol_fn) -> ScalarField:
    F0, f0 = _initial_spectrum(spec.grid, spec.initial)
    if spec.t == 0:
        return ScalarField(spec.grid, np.array(f0.values, copy=True))
    return fourier_inverse(SpectralField(spec.grid, F0 * symbol_fn(spec)))


# --------------------------------------------------------------------------
# symbols

def _check_speeds(lam):
    if np.any(lam < 0):
        bad = ", ".join(f"{v:.3g}" for v in lam)
        raise InstabilityError(
            f"directional speeds u.theta_l = ({bad}) include negative values; "
            "the advection symbol would grow without bound")


def _check_alpha(alpha, allow_one=True):
    a = float(alpha)
    if not (0 < a < 1 or (allow_one and a == 1)):
        raise OrderError(f"alpha must lie in (0, 1{']' if allow_one else ')'}, got {a}")
    return a


def advection_exponent(grid: Grid, frame: Frame, u, alpha) -> np.ndarray:
    """-sum_l lambda_l (-i k.theta_l)^alpha; the advection symbol is exp(t * this)."""
    a = _check_alpha(alpha)
    lam = frame.speeds(np.asarray(u, dtype=float))
    _check_speeds(lam)
    out = np.zeros(grid.shape, dtype=complex)
    for th, lm in zip(frame, lam):
        if lm != 0:
            out -= lm * symbol_from_projection(a, grid.k_dot(th))
    return out


def advection_symbol(grid, frame, u, alpha, t) -> np.ndarray:
    return np.exp(t * advection_exponent(grid, frame, u, alpha))


def dispersion_symbol(grid, frame, beta, t) -> np.ndarray:
    """exp(t sum_l (-i k.theta_l)^beta), beta in (1, 2]."""
    b = float(beta)
    if not (1 < b <= 2):
        raise OrderError(f"dispersion order must lie in (1, 2], got {b}")
    return np.exp(t * directional_operator_symbol(grid, frame, b))


def heat_directional_symbol(grid, theta, alpha, t) -> np.ndarray:
    zeta = grid.k_dot(as_direction(theta, grid.dim))
    a = _check_alpha(alpha)
    return np.exp(-t * (zeta * zeta if a == 1 else np.abs(zeta) ** (2 * a)))


def poisson_truncation(lam_t) -> int:
    """m_max = ceil(lambda t + 12 sqrt(lambda t) + 20)."""
    return int(math.ceil(lam_t + 12.0 * math.sqrt(lam_t) + 20.0))


def fp_shift_symbol(grid, lam, t, m_max=None) -> np.ndarray:
    """Poisson mixture of diagonal unit shifts: sum_m p_m exp(i m k.1)."""
    lt = float(lam) * float(t)
    m_max = poisson_truncation(lt) if m_max is None else int(m_max)
    kd = sum(grid.kmesh())
    kd = np.broadcast_to(kd, grid.shape)
    w = poisson.pmf(np.arange(m_max + 1), lt)
    out = np.zeros(grid.shape, dtype=complex)
    ph = np.exp(1j * kd)
    term = np.ones(grid.shape, dtype=complex)
    for m in range(m_max + 1):
        out += w[m] * term
        term = term * ph
    return out


# --------------------------------------------------------------------------
# solvers

def solve_advection(spec: SolveSpec) -> ScalarField:
    """rho(t) with spectrum f(k) prod_l exp(-t lambda_l (-i k.theta_l)^alpha).

    Raises InstabilityError when some lambda_l = u.theta_l is negative.
    """
    u = spec.u if spec.u is not None else np.zeros(spec.grid.dim)
    _check_alpha(spec.alpha)
    _check_speeds(spec.frame.speeds(u))
    return _solve_with_symbol(
        spec, lambda s: advection_symbol(s.grid, s.frame, u, s.alpha, s.t))


def greens_function(frame, u, alpha, t, grid: Grid) -> ScalarField:
    """Advection Green function: the solution from the band-limited delta.

    Supported (up to discretisation ripple) in the cone theta_l.x >= 0.
    """
    return solve_advection(SolveSpec("advection", grid, alpha, t, frame=frame, u=u,
                                     initial="delta"))


def solve_dispersion(spec: SolveSpec) -> ScalarField:
    """Pure space-fractional dispersion d_t rho = sum_l (theta_l.grad)^beta rho."""
    if spec.beta is None:
        raise OrderError("dispersion needs beta")
    return _solve_with_symbol(spec, lambda s: dispersion_symbol(s.grid, s.frame, s.beta, s.t))


def solve_fade(spec: SolveSpec) -> ScalarField:
    """Fractional advection-dispersion: advection symbol times dispersion symbol."""
    if spec.beta is None or not (1 < float(spec.beta) < 2):
        raise OrderError(f"FADE needs beta in (1, 2), got {spec.beta}")
    u = spec.u if spec.u is not None else np.zeros(spec.grid.dim)
    _check_alpha(spec.alpha)
    _check_speeds(spec.frame.speeds(u))
    return _solve_with_symbol(
        spec, lambda s: advection_symbol(s.grid, s.frame, u, s.alpha, s.t)
        * dispersion_symbol(s.grid, s.frame, s.beta, s.t))


def subordination_nodes(alpha, t, order=16, per_unit=3.0, tail_tol=1e-12):
    """Quadrature nodes s_i and weights approximating h_alpha(s, t) ds.

    Gauss-Legendre panels in log s over the bulk of the law; the mass above
    the last node is returned separately.
    """
    a = float(alpha)
    c = (1 - a) * a ** (a / (1 - a))
    lo = np.log((c / 700.0) ** ((1 - a) / a))
    hi = 1.0
    while _upper_tail(np.array([np.exp(hi)]), a)[0] > tail_tol:
        hi += 2.0
    edges = np.linspace(lo, hi, int(np.ceil((hi - lo) * per_unit)) + 1)
    z, w = roots_legendre(order)
    half = 0.5 * np.diff(edges)
    v = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half[:, None] * z
    x = np.exp(v).ravel()
    wts = (half[:, None] * w).ravel() * x * _density_unit(x, a)
    scale = t ** (1.0 / a)
    tail = float(_upper_tail(np.array([np.exp(hi)]), a)[0])
    return x * scale, wts, tail, np.exp(hi) * scale


def directional_heat_kernel(x, alpha, t):
    """Free-space kernel of d_t u = -(-(d_x)^2)^alpha u in one dimension,
    int h_alpha(s, t) exp(-x^2 / 4s) / sqrt(4 pi s) ds, by quadrature."""
    x = np.asarray(x, dtype=float)
    a = _check_alpha(alpha)
    if t <= 0:
        raise DomainError("kernel needs t > 0")
    if a == 1:
        return np.exp(-x * x / (4 * t)) / np.sqrt(4 * np.pi * t)
    s, w, _, _ = subordination_nodes(a, t)
    out = np.empty(x.size)
    flat = x.reshape(-1)
    for i in range(0, flat.size, 512):
        xb = flat[i:i + 512, None]
        with np.errstate(under="ignore"):
            g = np.exp(-xb * xb / (4 * s)) / np.sqrt(4 * np.pi * s)
        out[i:i + 512] = g @ w
    return out.reshape(x.shape)


def solve_heat_directional(f0, theta, alpha, t, grid: Grid | None = None,
                           method="spectral") -> ScalarField:
    """u(t) for d_t u = -(-(theta.grad)^2)^alpha u.

    ``method="spectral"`` multiplies by exp(-t |k.theta|^(2 alpha)).
    ``method="subordination"`` averages Gaussian smoothing along theta with
    variance 2s over s ~ h_alpha(s, t) by quadrature. With
    ``method="free-space"`` and a delta datum in one dimension the
    non-periodic kernel is sampled on the grid nodes instead.
    """
    if isinstance(f0, ScalarField):
        grid = f0.grid
    if grid is None:
        raise DimensionMismatchError("a grid is needed for named initial data")
    theta = as_direction(theta, grid.dim)
    a = _check_alpha(alpha)
    F0, field0 = _initial_spectrum(grid, f0)
    if t == 0:
        return ScalarField(grid, np.array(field0.values, copy=True))
    if method == "spectral":
        return fourier_inverse(SpectralField(grid, F0 * heat_directional_symbol(grid, theta, a, t)))
    if method == "subordination":
        zeta2 = grid.k_dot(theta) ** 2
        if a == 1:
            sym = np.exp(-t * zeta2)
        else:
            s, w, tail, s_hi = subordination_nodes(a, t)
            sym = tail * np.exp(-s_hi * zeta2)
            for si, wi in zip(s, w):
                if wi > 0:
                    sym = sym + wi * np.exp(-si * zeta2)
        return fourier_inverse(SpectralField(grid, F0 * sym))
    if method == "free-space":
        if grid.dim != 1 or not (isinstance(f0, str) and f0 == "delta"):
            raise DomainError("the free-space kernel is available for a 1-D delta datum only")
        return ScalarField(grid, directional_heat_kernel(grid.axes()[0] * theta[0], a, t))
    raise DomainError(f"unknown method {method!r}")


def orthonormal_basis(grid: Grid, family: str, count: int) -> list[ScalarField]:
    """First ``count`` functions of a named family on a 1-D grid.

    ``"hermite"``: Hermite functions (orthonormal on R); ``"fourier"``: the
    real trigonometric basis of the periodic box.
    """
    if grid.dim != 1:
        raise DimensionMismatchError("named bases are one-dimensional")
    x = grid.axes()[0]
    out = []
    if family == "hermite":
        prev, cur = np.zeros_like(x), np.pi ** -0.25 * np.exp(-x * x / 2)
        for n in range(count):
            out.append(ScalarField(grid, cur.copy()))
            nxt = np.sqrt(2.0 / (n + 1)) * x * cur - np.sqrt(n / (n + 1)) * prev
            prev, cur = cur, nxt
    elif family == "fourier":
        L = grid.L[0]
        x0 = x - grid.origin[0]
        out.append(ScalarField(grid, np.full_like(x, 1 / np.sqrt(L))))
        j = 1
        while len(out) < count:
            out.append(ScalarField(grid, np.sqrt(2 / L) * np.cos(2 * np.pi * j * x0 / L)))
            if len(out) < count:
                out.append(ScalarField(grid, np.sqrt(2 / L) * np.sin(2 * np.pi * j * x0 / L)))
            j += 1
    else:
        raise DomainError(f"unknown basis family {family!r}")
    return out[:count]


def gram_error(basis) -> float:
    """max |<phi_i, phi_j> - delta_ij| on the grid."""
    M = np.array([[np.sum(a.values * b.values) * a.grid.cell_volume for b in basis] for a in basis])
    return float(np.max(np.abs(M - np.eye(len(basis)))))


def solve_random_ic(coefficients, basis, spec: SolveSpec) -> ScalarField:
    """sum_j c_j P_t phi_j for a truncated random initial condition.

    ``basis`` is a list of ScalarFields or a family name understood by
    :func:`orthonormal_basis`. A basis that is not orthonormal on the grid
    to 1e-6 triggers a warning.
    """
    c = np.asarray(coefficients, dtype=float).reshape(-1)
    if isinstance(basis, str):
        basis = orthonormal_basis(spec.grid, basis, c.size)
    if len(basis) != c.size:
        raise DimensionMismatchError("one coefficient per basis function is needed")
    err = gram_error(basis)
    if err > 1e-6:
        warnings.warn(f"basis is not orthonormal on the grid (Gram error {err:.2e})", stacklevel=2)
    combo = sum(cj * phi.values for cj, phi in zip(c, basis))
    return solve_advection(replace(spec, initial=ScalarField(spec.grid, combo)))


def solve_fp_transport(spec: SolveSpec, m_max=None) -> ScalarField:
    """Poisson-weighted sum of diagonal unit shifts of the advection solution.

    Raises TruncationError when the Poisson mass of shifts that leave the
    box on its positive side exceeds 1e-6.
    """
    lam = float(spec.lam or 0.0)
    if lam < 0:
        raise DomainError("Poisson rate must be non-negative")
    lt = lam * spec.t
    m_max = poisson_truncation(lt) if m_max is None else int(m_max)
    if lt > 0:
        room = min(o + l for o, l in zip(spec.grid.origin, spec.grid.L))
        fit = int(np.floor(room))
        if fit < 0 or poisson.sf(fit, lt) > 1e-6:
            raise TruncationError(
                f"box extends {room:.3g} along the diagonal but Poisson shifts with rate "
                f"{lt:.3g} need more room (m_max = {m_max})")
    u = spec.u if spec.u is not None else np.zeros(spec.grid.dim)
    _check_alpha(spec.alpha)
    _check_speeds(spec.frame.speeds(u))
    if lt == 0:
        return solve_advection(spec)
    return _solve_with_symbol(
        spec, lambda s: advection_symbol(s.grid, s.frame, u, s.alpha, s.t)
        * fp_shift_symbol(s.grid, lam, s.t, m_max))


def solve(spec: SolveSpec) -> ScalarField:
    """Dispatch on ``spec.kind``."""
    if spec.kind == "advection":
        return solve_advection(spec)
    if spec.kind == "fade":
        return solve_fade(spec)
    if spec.kind == "fp-transport":
        return solve_fp_transport(spec)
    theta = spec.theta if spec.theta is not None else spec.frame[0]
    return solve_heat_directional(spec.initial, theta, spec.alpha, spec.t, spec.grid)
