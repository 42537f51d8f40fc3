"""
Monte Carlo constructions of the processes behind the solvers: sums of
subordinators along a frame, subordinated Brownian motion, compound Poisson
processes (plain, subordinated and compensated) and the Poisson-shift
transport process.

Every sampler draws in fixed-size chunks with per-chunk seeds, so the output
depends only on (seed, n, parameters), never on the worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import integrate
from scipy.special import dawsn, erfcx, gamma, gammaln, roots_jacobi, roots_legendre

from ._rng import chunked, open_uniform
from .core import Frame, as_direction
from .errors import DimensionMismatchError, DomainError, InstabilityError, QuadratureError
from .fracops import symbol_from_projection
from .stable import _kanter

# independent sub-streams of one seed
_S_COUNT, _S_JUMP, _S_SUB, _S_GAUSS = 1, 2, 3, 4


@dataclass(frozen=True, eq=False)
class Ensemble:
    """n sampled points of a process at a fixed time."""

    points: np.ndarray
    t: float
    seed: int
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        if p.shape[0] < 1:
            raise DomainError("an ensemble needs at least one point")
        if not np.all(np.isfinite(p)):
            raise DomainError("ensemble points must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def metadata(self) -> dict:
        return {"descriptor": self.descriptor, "seed": int(self.seed), "n": self.n,
                "t": float(self.t), "dim": self.dim}


def _frame(frame, dim=None) -> Frame:
    if isinstance(frame, Frame):
        f = frame
    elif frame is None:
        f = Frame.canonical(dim)
    else:
        f = Frame(np.atleast_2d(np.asarray(frame, dtype=float)))
    if dim is not None and f.dim != dim:
        raise DimensionMismatchError("frame dimension mismatch")
    return f


def _count(n):
    n = int(n)
    if n < 1:
        raise DomainError("sample size must be at least 1")
    return n


def _subordinator_at(rng, times, alpha):
    """One draw of H^alpha at each entry of ``times`` (array of non-negative times)."""
    times = np.asarray(times, dtype=float)
    if alpha == 1.0:
        return times.copy()
    unit = _kanter(rng, times.shape, alpha)
    return np.where(times > 0, times ** (1.0 / alpha), 0.0) * unit


# --------------------------------------------------------------------------
# jump laws

TAU_MAPS: dict[str, Callable] = {
    "one": lambda y: np.ones(y.shape[0]),
    "l1": lambda y: np.abs(y).sum(axis=1),
    "norm": lambda y: np.sqrt((y * y).sum(axis=1)),
    "abs-first": lambda y: np.abs(y[:, 0]),
}


def tau_map(tau) -> Callable:
    if tau is None:
        return None
    if callable(tau):
        return tau
    try:
        return TAU_MAPS[tau]
    except KeyError:
        raise DomainError(f"unknown jump map {tau!r}; known: {sorted(TAU_MAPS)}") from None


@dataclass(frozen=True, eq=False)
class JumpLaw:
    """Law of the jumps of a compound Poisson process.

    kinds
        ``fixed-vector``: Y = vector.
        ``folded-gaussian-rademacher``: Y = eps W with W_i = |N(0, 2S)|
        independent given S ~ inverse-gamma(beta, r), eps = +1 w.p. p.
        ``user-table``: finitely many atoms ``values`` with ``probs``.
    """

    kind: str
    dim: int = 1
    vector: Any = None
    beta: float = None
    r: float = None
    p: float = 1.0
    values: Any = None
    probs: Any = None

    def __post_init__(self):
        if self.kind == "fixed-vector":
            v = np.asarray(self.vector, dtype=float).reshape(-1)
            object.__setattr__(self, "vector", v)
            object.__setattr__(self, "dim", v.size)
        elif self.kind == "folded-gaussian-rademacher":
            if not (self.beta and self.beta > 0):
                raise DomainError("folded-gaussian jumps need beta > 0")
            if not (self.r and self.r > 0):
                raise DomainError("folded-gaussian jumps need r > 0")
            if not (0.0 <= self.p <= 1.0):
                raise DomainError("p must lie in [0, 1]")
        elif self.kind == "user-table":
            v = np.atleast_2d(np.asarray(self.values, dtype=float))
            if v.shape[0] == 1 and np.ndim(self.values) == 1:
                v = v.T
            pr = np.asarray(self.probs, dtype=float).reshape(-1)
            if pr.size != v.shape[0] or np.any(pr < 0) or abs(pr.sum() - 1) > 1e-12:
                raise DomainError("user-table probabilities must be non-negative and sum to one")
            object.__setattr__(self, "values", v)
            object.__setattr__(self, "probs", pr)
            object.__setattr__(self, "dim", v.shape[1])
        else:
            raise DomainError(f"unknown jump law kind {self.kind!r}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "dim": self.dim}
        if self.kind == "fixed-vector":
            d["vector"] = self.vector.tolist()
        elif self.kind == "folded-gaussian-rademacher":
            d.update(beta=self.beta, r=self.r, p=self.p)
        else:
            d.update(values=self.values.tolist(), probs=self.probs.tolist())
        return d

    # sampling -------------------------------------------------------------
    def sample(self, rng, m) -> np.ndarray:
        if self.kind == "fixed-vector":
            return np.broadcast_to(self.vector, (m, self.dim)).copy()
        if self.kind == "user-table":
            idx = rng.choice(self.probs.size, size=m, p=self.probs)
            return self.values[idx]
        return _folded_draws(rng, m, self.beta, self.r, self.p, self.dim)

    # expectations ---------------------------------------------------------
    def mixing_expectation(self, fn, rtol=1e-11) -> np.ndarray:
        """E fn(S) over the inverse-gamma mixing variable S = r / G, G ~ Gamma(beta).

        ``fn`` maps a scalar s to a (possibly complex) array.
        """
        b, r = self.beta, self.r
        lg = gammaln(b)
        shape = np.shape(fn(r))

        def integrand(g):
            if g <= 0:
                return np.zeros(2 * int(np.prod(shape)))
            v = np.asarray(fn(r / g), dtype=complex).ravel() * np.exp((b - 1) * np.log(g) - g - lg)
            return np.concatenate([v.real, v.imag])

        m = max(b, 1.0)
        bounds = [0.0, 0.25 * m, m, 4 * m, 16 * m, np.inf]
        tot, worst = 0.0, 0.0
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            val, err = integrate.quad_vec(integrand, lo, hi, epsrel=rtol, epsabs=1e-14, limit=400)
            tot = tot + val
            worst = max(worst, float(np.max(err)))
        if worst > 1e-8:
            raise QuadratureError(f"mixture quadrature error {worst:.2e}")
        half = tot.size // 2
        return (tot[:half] + 1j * tot[half:]).reshape(shape)

    def mean(self) -> np.ndarray:
        """E Y; for folded-gaussian jumps E W_j is integrated over the mixture."""
        if self.kind == "fixed-vector":
            return self.vector.copy()
        if self.kind == "user-table":
            return self.probs @ self.values
        if self.beta <= 0.5:
            return np.full(self.dim, np.inf if self.p != self.q else 0.0)
        ew = float(np.real(self.mixing_expectation(lambda s: np.array([2.0 * np.sqrt(s / np.pi)]))[0]))
        return np.full(self.dim, (self.p - self.q) * ew)

    def cf(self, k) -> np.ndarray:
        """E exp(i k.Y) for an array of wavevectors (m, d)."""
        k = np.atleast_2d(np.asarray(k, dtype=float))
        if k.shape[1] != self.dim:
            k = k.reshape(-1, self.dim)
        if self.kind == "fixed-vector":
            return np.exp(1j * k @ self.vector)
        if self.kind == "user-table":
            return np.exp(1j * k @ self.values.T) @ self.probs

        def fn(s):
            rs = np.sqrt(s)
            plus = np.prod(np.exp(-s * k * k) + 2j / np.sqrt(np.pi) * dawsn(rs * k), axis=1)
            minus = np.prod(np.exp(-s * k * k) - 2j / np.sqrt(np.pi) * dawsn(rs * k), axis=1)
            return self.p * plus + self.q * minus

        return self.mixing_expectation(fn)

    def laplace_of_tau(self, tau, z) -> np.ndarray:
        """E exp(-z tau(Y)) for complex z with Re z >= 0 and a named tau."""
        z = np.asarray(z, dtype=complex).reshape(-1)
        f = tau_map(tau)
        if self.kind == "fixed-vector":
            return np.exp(-z * float(f(self.vector[None])[0]))
        if self.kind == "user-table":
            tv = f(self.values)
            return np.exp(-np.outer(z, tv)) @ self.probs
        if tau == "one":
            return np.exp(-z)
        if tau not in ("abs-first", "l1"):
            raise DomainError(f"closed-form expectation unavailable for tau={tau!r} with "
                              "folded-gaussian jumps; use 'one', 'abs-first' or 'l1'")
        power = 1 if tau == "abs-first" else self.dim

        def fn(s):
            # E exp(-z |N(0, 2s)|) = erfcx(z sqrt(s))
            return erfcx(z * np.sqrt(s)) ** power

        return self.mixing_expectation(fn)


def _folded_draws(rng, m, beta, r, p, d):
    g = rng.standard_gamma(beta, size=m)
    s = r / g
    w = np.abs(rng.standard_normal((m, d))) * np.sqrt(2.0 * s)[:, None]
    eps = np.where(rng.random(m) < p, 1.0, -1.0)
    return eps[:, None] * w


def sample_folded_gaussian_jump(beta, r, p, d, n, seed, stream=_S_JUMP) -> np.ndarray:
    """n jumps Y = eps W; see :class:`JumpLaw`. Returns an (n, d) array."""
    law = JumpLaw("folded-gaussian-rademacher", dim=int(d), beta=beta, r=r, p=p)
    n = _count(n)
    return chunked(seed, n, lambda rng, m: law.sample(rng, m), stream=stream)


def folded_gaussian_mean(beta, r) -> float:
    """E W_j = 2 sqrt(r) Gamma(beta - 1/2) / (sqrt(pi) Gamma(beta)); finite for beta > 1/2."""
    if beta <= 0.5:
        return np.inf
    return float(2.0 * np.sqrt(r) * np.exp(gammaln(beta - 0.5) - gammaln(beta)) / np.sqrt(np.pi))


def folded_gaussian_density(y2, beta, r, d):
    """m_r(|y|^2): density of W on the positive orthant."""
    y2 = np.asarray(y2, dtype=float)
    lc = (gammaln(beta + d / 2) - gammaln(beta) + 2 * (beta + d) * np.log(2.0)
          - 0.5 * d * np.log(4 * np.pi) + beta * np.log(r))
    return np.exp(lc - (beta + d / 2) * np.log(y2 + 4 * r))


# --------------------------------------------------------------------------
# processes

def _speeds(frame, u):
    lam = frame.speeds(np.asarray(u, dtype=float))
    if np.any(lam < 0):
        raise InstabilityError(f"directional speeds {lam} include negative values")
    return lam


def simulate_advection_process(frame, u, alpha, t, n, seed) -> Ensemble:
    """Z_t = sum_l theta_l H_l(lambda_l t), lambda_l = u.theta_l."""
    u = np.asarray(u, dtype=float).reshape(-1)
    frame = _frame(frame, u.size)
    lam = _speeds(frame, u)
    n = _count(n)
    M = frame.matrix

    def draw(rng, m):
        out = np.zeros((m, frame.dim))
        for l in range(frame.dim):
            h = _subordinator_at(rng, np.full(m, lam[l] * t), alpha)
            out += h[:, None] * M[l][None, :]
        return out

    pts = chunked(seed, n, draw, stream=_S_SUB)
    return Ensemble(pts, t, seed, {"process": "advection", "frame": frame.to_list(),
                                   "u": u.tolist(), "alpha": alpha})


def simulate_subordinated_bm(theta, alpha, t, n, seed) -> Ensemble:
    """I_t = theta B(H_t) with Var B(s) = 2s."""
    theta = as_direction(theta)
    n = _count(n)

    def draw(rng, m):
        h = _subordinator_at(rng, np.full(m, float(t)), alpha)
        b = rng.standard_normal(m) * np.sqrt(2.0 * h)
        return b[:, None] * theta[None, :]

    pts = chunked(seed, n, draw, stream=_S_GAUSS)
    return Ensemble(pts, t, seed, {"process": "subordinated-bm", "theta": theta.tolist(),
                                   "alpha": alpha})


def _cp_sums(rng, m, lam, t, law: JumpLaw, tau=None):
    """Per-sample jump counts and sums of Y (or of tau(Y) when tau is given)."""
    counts = rng.poisson(lam * t, size=m) if lam * t > 0 else np.zeros(m, dtype=np.int64)
    total = int(counts.sum())
    owner = np.repeat(np.arange(m), counts)
    jumps = law.sample(rng, total) if total else np.zeros((0, law.dim))
    if tau is not None:
        vals = np.asarray(tau(jumps), dtype=float) if total else np.zeros(0)
        if np.any(vals < 0):
            raise DomainError("jump map tau produced negative values")
        return counts, np.bincount(owner, weights=vals, minlength=m)
    sums = np.zeros((m, law.dim))
    for i in range(law.dim):
        sums[:, i] = np.bincount(owner, weights=jumps[:, i], minlength=m)
    return counts, sums


def _check_rate(lam):
    if lam < 0:
        raise DomainError("Poisson rate must be non-negative")


def simulate_compound_poisson(lam, jump_law: JumpLaw, t, n, seed, tau=None,
                              return_counts=False):
    """X_t = sum_{i <= N(t)} Y_i, or sum tau(Y_i) when a jump map is given."""
    _check_rate(lam)
    n = _count(n)
    tf = tau_map(tau)

    def draw(rng, m):
        c, s = _cp_sums(rng, m, lam, t, jump_law, tf)
        s = s[:, None] if s.ndim == 1 else s
        return np.concatenate([s, c[:, None].astype(float)], axis=1)

    raw = chunked(seed, n, draw, stream=_S_JUMP)
    ens = Ensemble(raw[:, :-1], t, seed, {"process": "compound-poisson", "lam": lam,
                                          "jumps": jump_law.to_dict(),
                                          "tau": tau if isinstance(tau, str) or tau is None else "callable"})
    if return_counts:
        return ens, raw[:, -1].astype(np.int64)
    return ens


def simulate_subordinated_cp(frame, alpha, lam, jump_law: JumpLaw, tau, t, n, seed) -> Ensemble:
    """Z_t = sum_j theta_j H_j(X_t), X_t = sum_{i <= N(t)} tau(Y_i) >= 0."""
    _check_rate(lam)
    n = _count(n)
    tf = tau_map(tau) or TAU_MAPS["one"]
    frame = _frame(frame)
    M = frame.matrix

    def draw(rng, m):
        _, x = _cp_sums(rng, m, lam, t, jump_law, tf)
        out = np.zeros((m, frame.dim))
        for j in range(frame.dim):
            out += _subordinator_at(rng, x, alpha)[:, None] * M[j][None, :]
        return out

    pts = chunked(seed, n, draw, stream=_S_JUMP)
    return Ensemble(pts, t, seed, {"process": "subordinated-cp", "frame": frame.to_list(),
                                   "alpha": alpha, "lam": lam, "jumps": jump_law.to_dict(),
                                   "tau": tau if isinstance(tau, str) else "callable"})


def compensator_coefficients(frame, jump_law: JumpLaw):
    """(c_l, active) with c_l = theta_l.EY; the compensator is active only
    when every c_l is positive."""
    frame = _frame(frame, jump_law.dim)
    if jump_law.kind == "folded-gaussian-rademacher" and jump_law.p <= jump_law.q:
        return np.zeros(frame.dim), False
    c = frame.matrix @ jump_law.mean()
    active = bool(np.all(c > 0) and np.all(np.isfinite(c)))
    return c, active


def simulate_compensated_levy(frame, alpha, lam, jump_law: JumpLaw, t, n, seed,
                              return_jumps=False):
    """Z_t = sum_{j <= N(t)} Y_j - sum_l theta_l c_l^(1/alpha) H_l(lambda t) chi,
    c_l = theta_l.EY and chi = [all c_l > 0]."""
    _check_rate(lam)
    n = _count(n)
    frame = _frame(frame, jump_law.dim)
    c, active = compensator_coefficients(frame, jump_law)
    if active and not np.all(np.isfinite(c)):
        raise DomainError("jump mean is infinite; the compensator needs beta > 1/2")
    M = frame.matrix

    def draw(rng, m):
        _, s = _cp_sums(rng, m, lam, t, jump_law)
        comp = np.zeros_like(s)
        if active:
            for l in range(frame.dim):
                h = _subordinator_at(rng, np.full(m, lam * t), alpha)
                comp += (c[l] ** (1.0 / alpha) * h)[:, None] * M[l][None, :]
        return np.concatenate([s - comp, s], axis=1)

    raw = chunked(seed, n, draw, stream=_S_JUMP)
    d = frame.dim
    ens = Ensemble(raw[:, :d], t, seed, {"process": "compensated-levy", "frame": frame.to_list(),
                                        "alpha": alpha, "lam": lam, "jumps": jump_law.to_dict(),
                                        "compensated": active})
    if return_jumps:
        return ens, raw[:, d:]
    return ens


def simulate_fp_process(frame, u, alpha, lam, t, n, seed) -> Ensemble:
    """Y_t = 1 N_t + sum_j theta_j H_j((theta_j.u) t)."""
    _check_rate(lam)
    u = np.asarray(u, dtype=float).reshape(-1)
    frame = _frame(frame, u.size)
    lamv = _speeds(frame, u)
    n = _count(n)
    M = frame.matrix

    def draw(rng, m):
        counts = rng.poisson(lam * t, size=m).astype(float) if lam * t > 0 else np.zeros(m)
        out = np.repeat(counts[:, None], frame.dim, axis=1)
        for l in range(frame.dim):
            out += _subordinator_at(rng, np.full(m, lamv[l] * t), alpha)[:, None] * M[l][None, :]
        return out

    pts = chunked(seed, n, draw, stream=_S_COUNT)
    return Ensemble(pts, t, seed, {"process": "fp", "frame": frame.to_list(), "u": u.tolist(),
                                   "alpha": alpha, "lam": lam})


# --------------------------------------------------------------------------
# Levy-Khintchine multiplier of the compensated folded-gaussian process

def _cos_minus_one_1d(k, beta, r):
    """int_0^inf (cos(k y) - 1)(y^2 + 4r)^(-beta-1/2) dy."""
    a2 = 4.0 * r
    k = abs(float(k))
    if k == 0:
        return 0.0
    base = np.sqrt(np.pi) * np.exp(gammaln(beta) - gammaln(beta + 0.5)) / 2 * a2 ** (-beta)
    f = lambda y: (y * y + a2) ** (-beta - 0.5)
    cos_part, err = integrate.quad(f, 0.0, np.inf, weight="cos", wvar=k, limlst=200)
    if not np.isfinite(cos_part) or err > 1e-6 * max(1.0, abs(base)):
        raise QuadratureError(f"oscillatory quadrature failed at k={k} (error {err:.2e})")
    return cos_part - base


def _sin_1d(k, beta, r):
    """int_0^inf sin(k y)(y^2 + 4r)^(-beta-1/2) dy."""
    if k == 0:
        return 0.0
    f = lambda y: (y * y + 4.0 * r) ** (-beta - 0.5)
    val, err = integrate.quad(f, 0.0, np.inf, weight="sin", wvar=abs(k), limlst=200)
    if err > 1e-6 * max(1.0, abs(val)):
        raise QuadratureError(f"oscillatory quadrature failed at k={k} (error {err:.2e})")
    return np.sign(k) * val


def _cos_minus_one_limit_1d(k, beta):
    """int_0^inf (cos(k y) - 1) y^(-2 beta - 1) dy by quadrature, beta in (0, 1)."""
    k = abs(float(k))
    if k == 0:
        return 0.0
    # scale out k: |k|^(2 beta) int_0^inf (cos y - 1) y^(-2beta-1) dy
    t, w = roots_jacobi(80, 0.0, 1.0 - 2 * beta)
    y = 0.5 * (1 + t)
    near = 2.0 ** (2 * beta - 2.0) * np.dot(w, (np.cos(y) - 1.0) / y ** 2)
    osc, err = integrate.quad(lambda v: v ** (-2 * beta - 1.0), 1.0, np.inf, weight="cos", wvar=1.0,
                              limlst=200)
    return k ** (2 * beta) * (near + osc - 1.0 / (2 * beta))


def levy_khinchine_multiplier(k, frame, alpha, beta, r, p, lam=1.0, limit=False, scaled=False):
    """Characteristic exponent per unit time of the compensated process.

    ``Phi_r(k) = lam int [p e^{ik.y} + q e^{-ik.y} - 1 - (p-q) sum_l (ik.theta_l)^alpha (theta_l.y) chi] m_r(|y|^2) dy``

    integrated over the support of W (the positive orthant), d <= 2. With
    ``limit=True`` returns Phi(k) = lim r^-beta Phi_r(k), in which m_r(|y|^2)
    is replaced by C_d(beta) |y|^(-2 beta - d); that limit exists only for
    p = q and beta in (0, 1). ``scaled=True`` returns r^-beta Phi_r(k).
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    frame = _frame(frame, k.size)
    d = frame.dim
    if d > 2:
        raise DimensionMismatchError("the multiplier is evaluated for d <= 2")
    q = 1.0 - p
    if not (0 < beta < 1):
        raise DomainError("beta must lie in (0, 1)")
    Cd = float(np.exp(gammaln(beta + d / 2) - gammaln(beta) + 2 * (beta + d) * np.log(2.0)
                      - 0.5 * d * np.log(4 * np.pi)))
    if limit and p != q:
        raise QuadratureError(
            "the limit multiplier diverges for p != q: the compensator term "
            "int (theta.y)|y|^(-2beta-d) dy needs beta > 1/2 at infinity while the jump "
            "part needs beta < 1/2 near the origin")
    if np.all(k == 0):
        return 0j

    def radial_cos(kk):
        return (_cos_minus_one_limit_1d(kk, beta) if limit
                else r ** beta * _cos_minus_one_1d(kk, beta, r))

    def radial_sin(kk):
        return r ** beta * _sin_1d(kk, beta, r)

    if d == 1:
        # int_0^inf [p e^{iky} + q e^{-iky} - 1] w(y) dy
        val = Cd * (radial_cos(k[0]) + (0 if limit or p == q else 1j * (p - q) * radial_sin(k[0])))
    else:
        # polar coordinates on the quarter plane; the radial weight rho (rho^2 + 4r)^(-beta-1)
        # split where k.e_phi changes sign: the integrand has a kink there
        z, w = roots_legendre(48)
        edges = [0.0, 0.5 * np.pi]
        ph0 = np.arctan2(-k[0], k[1]) % np.pi
        if 0 < ph0 < 0.5 * np.pi:
            edges.insert(1, ph0)
        tot = 0j
        for a, b in zip(edges[:-1], edges[1:]):
            for ph, wp in zip(a + 0.5 * (b - a) * (z + 1), 0.5 * (b - a) * w):
                om = k[0] * np.cos(ph) + k[1] * np.sin(ph)
                tot += wp * _radial_2d(om, beta, r, limit, p - q)
        val = Cd * tot
    if not limit and p != q:
        c, active = compensator_coefficients(
            frame, JumpLaw("folded-gaussian-rademacher", dim=d, beta=beta, r=r, p=p))
        if active:
            val -= sum(cl * symbol_from_projection(alpha, -(k @ th)) for cl, th in zip(c, frame))
    out = complex(lam * val)
    return out * r ** (-beta) if scaled and not limit else out


def _radial_2d(om, beta, r, limit, pq):
    """int_0^inf [cos(om rho) - 1 + i pq sin(om rho)] rho w(rho) d rho in 2-D."""
    if om == 0:
        return 0j
    a = abs(om)
    if limit:
        # |om|^(2beta) int_0^inf (cos v - 1) v^(-2beta-1) dv
        return complex(_cos_minus_one_limit_1d(a, beta))
    f = lambda y: y * (y * y + 4 * r) ** (-beta - 1.0)
    cpart, e1 = integrate.quad(f, 0.0, np.inf, weight="cos", wvar=a, limlst=200)
    base = 0.5 * (4 * r) ** (-beta) / beta
    out = r ** beta * (cpart - base)
    if pq != 0:
        spart, e2 = integrate.quad(f, 0.0, np.inf, weight="sin", wvar=a, limlst=200)
        out = out + 1j * pq * np.sign(om) * r ** beta * spart
    return out
