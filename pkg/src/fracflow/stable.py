"""
One-sided alpha-stable subordinator with Laplace transform exp(-t s^alpha).

Density evaluation switches between the convergent large-x series

    h(x, 1) = 1/pi sum_{k>=1} (-1)^{k+1} Gamma(alpha k + 1)/k! sin(pi alpha k) x^{-alpha k - 1}

and, below a per-alpha crossover, Zolotarev's integral representation over
(0, pi), split into panels at level sets of the integrand.
Sampling uses Kanter's representation, exact for every alpha in (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, roots_legendre

from ._rng import chunked, open_uniform
from .errors import DegenerateLawError, DomainError

ZOLOTAREV_ORDER = 32
ZOLOTAREV_LEVELS = np.array([1e-16, 1e-12, 1e-9, 1e-7, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.5, 2.0, 8.0, 30.0, 120.0, 745.0])
SERIES_TERMS = 600
SERIES_RTOL = 1e-12


@dataclass(frozen=True)
class StableLaw:
    """Order alpha in (0, 1]; alpha = 1 is the deterministic subordinator H_t = t."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a <= 1.0):
            raise DomainError(f"stable order must lie in (0, 1], got {a}")
        object.__setattr__(self, "alpha", a)

    @property
    def degenerate(self) -> bool:
        return self.alpha == 1.0

    def laplace(self, s, t=1.0):
        """Analytic Laplace transform E exp(-s H_t) = exp(-t s^alpha)."""
        return np.exp(-t * np.asarray(s, dtype=float) ** self.alpha)


def _as_law(law) -> StableLaw:
    return law if isinstance(law, StableLaw) else StableLaw(law)


def _terms_needed(xmin, alpha, kmax=SERIES_TERMS):
    k = np.arange(1, kmax + 1)
    lg = gammaln(alpha * k + 1) - gammaln(k + 1) - alpha * k * np.log(xmin)
    peak = np.argmax(lg)
    small = np.nonzero((lg < lg[peak] - 42) & (np.arange(kmax) > peak))[0]
    return int(small[0]) + 3 if small.size else kmax


def _series_terms(x, alpha, kmax=SERIES_TERMS, integrated=False):
    k = np.arange(1, kmax + 1)
    x = np.asarray(x, dtype=float)[..., None]
    lg = gammaln(alpha * k + (0 if integrated else 1)) - gammaln(k + 1) - alpha * k * np.log(x)
    sign = np.where(k % 2 == 1, 1.0, -1.0) * np.sin(np.pi * alpha * k)
    with np.errstate(over="ignore", invalid="ignore"):
        return sign * np.exp(lg) / np.pi


def _series_sum(x, alpha, integrated=False, batch=4096):
    """Series value and a conservative absolute error estimate, batched so
    the term matrix stays small."""
    x = np.asarray(x, dtype=float).reshape(-1)
    total = np.empty_like(x)
    err = np.empty_like(x)
    for i in range(0, x.size, batch):
        xb = x[i:i + batch]
        kmax = _terms_needed(xb.min(), alpha)
        terms = _series_terms(xb, alpha, kmax, integrated)
        with np.errstate(invalid="ignore", over="ignore"):
            total[i:i + batch] = terms.sum(axis=-1)
            biggest = np.abs(terms).max(axis=-1)
            tail = np.abs(terms[:, -3:]).max(axis=-1)
            err[i:i + batch] = biggest * 64 * np.finfo(float).eps + tail
    return total, err


def _series_unit(x, alpha):
    x = np.asarray(x, dtype=float)
    total, err = _series_sum(x, alpha)
    return (total / x.reshape(-1)).reshape(x.shape), (err / x.reshape(-1)).reshape(x.shape)


@lru_cache(maxsize=64)
def series_crossover(alpha: float) -> float:
    """Smallest x above which the series is accurate to SERIES_RTOL."""
    xs = np.logspace(-2, 6, 400)
    val, err = _series_unit(xs, alpha)
    ok = np.isfinite(val) & (err <= SERIES_RTOL * np.abs(val)) & (val > 0)
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return float(xs[0])
    if bad[-1] == xs.size - 1:
        return float("inf")
    return float(xs[bad[-1] + 1])


def _log_kanter(u, alpha):
    a = alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a * np.log(np.sin(a * u)) + (1 - a) * np.log(np.sin((1 - a) * u))
                - np.log(np.sin(u))) / (1 - a)


def _panel_edges(logc, alpha, iters=60):
    # A(u) increases on (0, pi); split where c A(u) crosses each level.
    # Levels relative to the minimum c A(0) keep deep left tails resolved.
    a = alpha
    log_a0 = (a * np.log(a) + (1 - a) * np.log1p(-a)) / (1 - a)
    m0 = np.exp(np.minimum(log_a0 + logc, 700.0))
    levels = np.concatenate([np.broadcast_to(ZOLOTAREV_LEVELS, (logc.size, ZOLOTAREV_LEVELS.size)),
                             m0[:, None] + ZOLOTAREV_LEVELS[None, 1:]], axis=1)
    tgt = np.sort(np.log(levels), axis=1) - logc[:, None]
    lo = np.zeros_like(tgt)
    hi = np.full_like(tgt, np.pi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        big = _log_kanter(mid, alpha) > tgt
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    inner = 0.5 * (lo + hi)
    n = logc.size
    return np.concatenate([np.zeros((n, 1)), inner, np.full((n, 1), np.pi)], axis=1)


def _zolotarev_unit(x, alpha, cdf=False, order=ZOLOTAREV_ORDER):
    """h(x, 1), or P(H_1 <= x) when cdf is set, from

        h(x) = g/(pi x) int_0^pi c A(u) exp(-c A(u)) du,   c = x^(-g), g = alpha/(1-alpha)
        F(x) = 1/pi int_0^pi exp(-c A(u)) du
    """
    shape = np.shape(x)
    x = np.asarray(x, dtype=float).reshape(-1)
    out = np.empty_like(x)
    z, w = roots_legendre(order)
    g = alpha / (1 - alpha)
    for i in range(0, x.size, 2048):
        xb = x[i:i + 2048]
        logc = -g * np.log(xb)
        e = _panel_edges(logc, alpha)
        half = 0.5 * (e[:, 1:] - e[:, :-1])
        mid = 0.5 * (e[:, 1:] + e[:, :-1])
        u = mid[..., None] + half[..., None] * z
        with np.errstate(over="ignore", invalid="ignore"):
            ca = np.exp(_log_kanter(u, alpha) + logc[:, None, None])
            f = np.exp(-ca) if cdf else ca * np.exp(-ca)
        f = np.where(np.isfinite(f), f, 0.0)
        s = (half[..., None] * w * f).sum(axis=(1, 2)) / np.pi
        out[i:i + 2048] = s if cdf else g * s / xb
    return out.reshape(shape)


def _density_unit(x, alpha):
    """h(x, 1) for x > 0; zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    if not np.any(pos):
        return out
    xc = series_crossover(alpha)
    xp = x[pos]
    vals = np.empty_like(xp)
    hi = xp >= xc
    if np.any(hi):
        vals[hi] = _series_unit(xp[hi], alpha)[0]
    if np.any(~hi):
        vals[~hi] = _zolotarev_unit(xp[~hi], alpha)
    out[pos] = np.maximum(vals, 0.0)
    return out


def stable_density(law, x, t=1.0):
    """Density h_alpha(x, t) of the subordinator at time t.

    Raises DegenerateLawError for alpha = 1 (a point mass at t) and
    DomainError for x <= 0 or t <= 0.
    """
    law = _as_law(law)
    if law.degenerate:
        raise DegenerateLawError("alpha = 1 is the point mass at t; it has no density")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("stable density is defined for x > 0")
    if t <= 0:
        raise DomainError("time must be positive")
    a = law.alpha
    scale = t ** (-1.0 / a)
    out = scale * _density_unit(x * scale, a)
    return out if out.ndim else float(out)


def _upper_tail(x, alpha):
    """P(H_1 > x) by termwise integration of the density series."""
    x = np.asarray(x, dtype=float)
    return _series_sum(x, alpha, integrated=True)[0].reshape(x.shape)


def _cdf_unit(x, alpha):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    hi = pos & (x >= series_crossover(alpha))
    lo = pos & ~hi
    if np.any(lo):
        out[lo] = _zolotarev_unit(x[lo], alpha, cdf=True)
    if np.any(hi):
        out[hi] = 1.0 - _upper_tail(x[hi], alpha)
    return np.clip(out, 0.0, 1.0)


def stable_cdf(law, x, t=1.0):
    """P(H_t <= x).

    Below the series crossover this uses the integral representation of the
    distribution function; above it the termwise-integrated series.
    """
    law = _as_law(law)
    x = np.asarray(x, dtype=float)
    if law.degenerate:
        return np.where(x >= t, 1.0, 0.0)
    scale = t ** (-1.0 / law.alpha)
    out = _cdf_unit(x * scale, law.alpha)
    return out if out.ndim else float(out)


def total_mass(law, t=1.0) -> float:
    """Integral of h(., t) over (0, inf), by Gauss-Legendre quadrature of the
    density in log x up to the series crossover plus the analytic upper tail.
    Should equal one."""
    law = _as_law(law)
    a = law.alpha
    xc = series_crossover(a)
    # h(x, 1) < exp(-700) below the lower cut
    c = (1 - a) * a ** (a / (1 - a))
    lo = np.log((c / 700.0) ** ((1 - a) / a))
    edges = np.linspace(lo, np.log(xc), 401)
    z, w = roots_legendre(16)
    half = 0.5 * np.diff(edges)
    xs = np.exp(0.5 * (edges[1:] + edges[:-1])[:, None] + half[:, None] * z)
    body = float((half[:, None] * w * _density_unit(xs, a) * xs).sum())
    return body + float(_upper_tail(np.array([xc]), a)[0])


def _kanter(rng, size, alpha):
    u = np.pi * open_uniform(rng, size)
    e = rng.standard_exponential(size)
    a = alpha
    return (np.sin(a * u) / np.sin(u) ** (1.0 / a)
            * (np.sin((1.0 - a) * u) / e) ** ((1.0 - a) / a))


def kanter_function(u, alpha):
    """A(u) with H_1 = (A(U)/E)^((1-alpha)/alpha), U ~ U(0, pi), E ~ Exp(1)."""
    a = alpha
    lg = (a * np.log(np.sin(a * u)) + (1 - a) * np.log(np.sin((1 - a) * u)) - np.log(np.sin(u))) / (1.0 - a)
    with np.errstate(over="ignore"):
        return np.exp(lg)


def sample_unit(alpha, n, seed, stream=0):
    """n draws of H_1."""
    return chunked(seed, n, lambda rng, m: _kanter(rng, m, alpha), stream=stream)


def sample_subordinator(law, t, n, seed, stream=0):
    """n i.i.d. draws of H_t; deterministic in (seed, n, stream)."""
    law = _as_law(law)
    n = int(n)
    if n < 1:
        raise DomainError("sample size must be at least 1")
    if t < 0:
        raise DomainError("time must be non-negative")
    if law.degenerate:
        return np.full(n, float(t))
    if t == 0:
        return np.zeros(n)
    return t ** (1.0 / law.alpha) * sample_unit(law.alpha, n, seed, stream)


def subordinate_times(alpha, times, seed, stream=0):
    """One draw of H at each (possibly random) time, H(T) = T^(1/alpha) H_1."""
    times = np.asarray(times, dtype=float)
    if alpha == 1.0:
        return times.copy()
    unit = sample_unit(alpha, times.size, seed, stream).reshape(times.shape)
    return np.where(times > 0, np.abs(times) ** (1.0 / alpha), 0.0) * unit


class LaplaceCheck(NamedTuple):
    estimate: float
    stderr: float
    analytic: float

    @property
    def z(self) -> float:
        diff = abs(self.estimate - self.analytic)
        if self.stderr == 0:
            return 0.0 if diff < 1e-15 else float("inf")
        return diff / self.stderr


def laplace_check(law, s, t, n, seed) -> LaplaceCheck:
    """Monte Carlo mean of exp(-s H_t) against exp(-t s^alpha)."""
    law = _as_law(law)
    if law.degenerate:
        v = float(np.exp(-s * t))
        return LaplaceCheck(v, 0.0, v)
    h = sample_subordinator(law, t, n, seed)
    v = np.exp(-s * h)
    se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
    return LaplaceCheck(float(v.mean()), se, float(np.exp(-t * s ** law.alpha)))
