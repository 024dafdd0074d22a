"""Flat dilation profiles, CDD profiles and structural checks.

All CDD computations run in dimensionless coordinates. The CDD profile of
(K, N, D) is unchanged under (K, D) -> (K/lam^2, lam D), so the general
profile is evaluated after scaling the left arm length a to 1, and the case
formulas after scaling t by sqrt(|delta|) (or sqrt(|K|) when N = inf).
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, ExcludedTriple, NonConvergence
from .model import CurvatureTriple, j_log_integral
from .numerics import CumulativeIntegral, find_root, tail_diverges
from .report import VerificationReport

__all__ = [
    "FlatProfile",
    "flat_profile",
    "ProfileTable",
    "BalanceSolution",
    "solve_balance",
    "cdd_profile_general",
    "CaseResult",
    "cdd_profile_case",
    "cdd_profile_case_details",
    "closed_form_profile",
    "gaussian_profile",
    "profile_table",
    "check_concavity",
    "check_shift_monotonicity",
    "check_boundary_monotone",
]


# --------------------------------------------------------------------------
# flat dilation profile


def _as_logf(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized log f, falling back to element-wise calls for scalar-only f."""

    def vec(x):
        x = np.asarray(x, dtype=float)
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape != x.shape:
                y = np.broadcast_to(y, x.shape).astype(float)
        except (TypeError, ValueError):
            y = np.array([float(f(v)) for v in x.ravel()]).reshape(x.shape)
        return y

    def logf(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            y = vec(x)
            return np.where(y > 0, np.log(np.where(y > 0, y, 1.0)), -np.inf)

    return logf


def _decay_scale(logf, a: float) -> float:
    """Length over which exp(logf) on [a, inf) loses a factor e^2 past its peak."""
    d = 10.0 ** np.arange(-6.0, 6.5, 0.25)
    with np.errstate(all="ignore"):
        vals = np.asarray(logf(a + d), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    run = np.maximum.accumulate(vals)
    hit = np.nonzero(vals < run - 2.0)[0]
    return float(d[hit[0]]) if hit.size else 1.0


class FlatProfile:
    """theta -> f(alpha)(alpha - a) / int_a^b f with int_a^alpha f = theta int_a^b f.

    Built once per (f, [a, b]) so that many theta values are cheap. ``logf``
    is log f (vectorized), -inf where f vanishes.
    """

    def __init__(self, logf: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                 *, scale: float | None = None):
        a, b = float(a), float(b)
        if not math.isfinite(a):
            raise DomainError("left end of the interval must be finite")
        if not a < b:
            raise DomainError(f"empty interval [{a}, {b}]")
        self.logf, self.a, self.b = logf, a, b
        if math.isinf(b):
            if tail_diverges(lambda t: math.exp(float(logf(np.array([t]))[0])), a, 1):
                raise DomainError("f is not integrable on [a, inf)")
            if scale is None:
                scale = _decay_scale(logf, a)
        self._cum = CumulativeIntegral(logf, a, b, scale=scale or 1.0)
        self.log_total = math.log(self._cum.total) + self._cum.shift

    def alpha(self, theta):
        return self._cum.quantile(theta)

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        if np.any((th < 0) | (th > 1)) or np.any(np.isnan(th)):
            raise DomainError("theta must lie in [0, 1]")
        inner = (th > 0) & (th < 1)
        out = np.zeros_like(th)
        if np.any(inner):
            u = self._cum.quantile_u(th[inner])
            al = np.asarray(self._cum.x_of_u(u), dtype=float)
            off = np.asarray(self._cum.offset_of_u(u), dtype=float)
            with np.errstate(all="ignore"):
                lv = np.asarray(self.logf(al), dtype=float) - self.log_total
            out[inner] = np.where(off > 0, np.exp(lv) * off, 0.0)
        top = th == 1.0
        if np.any(top):
            out[top] = self._value_at_one()
        return out if out.ndim else float(out)

    def _value_at_one(self) -> float:
        if math.isinf(self.b):
            # an integrable eventually monotone tail forces f(t) t -> 0
            return 0.0
        lv = float(np.asarray(self.logf(np.array([self.b])))[0]) - self.log_total
        return math.exp(lv) * (self.b - self.a) if lv > -math.inf else 0.0


def flat_profile(f: Callable, interval: Sequence[float], theta, *, scale: float | None = None):
    """Flat dilation profile of a nonnegative function f on [a, b].

    Args:
        f: nonnegative function, vectorized or scalar.
        interval: (a, b) with a finite and b possibly inf.
        theta: value or array in [0, 1].
        scale: length scale for mapping an infinite right end (guessed if None).

    Raises:
        DomainError: if f is not integrable on [a, b] or has zero integral.
    """
    a, b = map(float, interval)
    return FlatProfile(_as_logf(f), a, b, scale=scale)(theta)


# --------------------------------------------------------------------------
# closed forms


def closed_form_profile(N: float, theta):
    """-(1-theta) log(1-theta) for N = inf, else -N(1 - theta - (1-theta)^(1-1/N))."""
    th = np.asarray(theta, dtype=float)
    one = 1.0 - th
    with np.errstate(divide="ignore", invalid="ignore"):
        if math.isinf(N):
            out = np.where(one > 0, -one * np.log(np.where(one > 0, one, 1.0)), 0.0)
        elif N == 0:
            out = np.zeros_like(th)
        else:
            out = -N * (one - np.where(one > 0, one, 1.0) ** (1.0 - 1.0 / N) * (one > 0))
    return out if out.ndim else float(out)


def _exp_flat(lam: float, L: float, theta) -> np.ndarray:
    """Flat profile of e^{lam t} on [0, L] (L may be inf when lam < 0)."""
    th = np.asarray(theta, dtype=float)
    if math.isinf(L):
        if lam >= 0:
            raise DomainError("e^{lam t} is not integrable on [0, inf) for lam >= 0")
        return closed_form_profile(math.inf, th)
    if lam == 0:
        return th.copy()
    m = math.expm1(lam * L)
    alpha = np.log1p(th * m) / lam
    return (1.0 + th * m) * alpha * lam / m


def gaussian_profile(theta):
    """Dilation profile of the standard Gaussian measure on the line.

    Attained by the centred interval [-alpha, alpha] with mass theta, giving
    (4/sqrt(2 pi)) e^{-alpha^2/2} alpha.
    """
    th = np.asarray(theta, dtype=float)
    if np.any((th < 0) | (th > 1)):
        raise DomainError("theta must lie in [0, 1]")
    alpha = special.ndtri(0.5 * (1.0 + th))
    with np.errstate(invalid="ignore"):
        out = np.where((th > 0) & (th < 1), 4.0 / math.sqrt(2 * math.pi)
                       * np.exp(-0.5 * alpha * alpha) * alpha, 0.0)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# general CDD profile


@dataclass(frozen=True)
class BalanceSolution:
    """Value of H equalizing the two terms of the CDD max for fixed (a, b, theta)."""

    H: float
    common_value: float
    a: float
    b: float
    terms: tuple[float, float] = (math.nan, math.nan)
    balanced: bool = True


class _BothDivergent(Exception):
    def __init__(self, h: float):
        super().__init__(h)
        self.h = h


class _Arms:
    """log of the two J-integrals for unit left arm: int_0^beta J_h and int_{-1}^0 J_h."""

    def __init__(self, k: float, N: float, beta: float):
        self.k, self.N, self.beta = k, N, beta
        self._memo: dict[float, tuple[float, float]] = {}

    def logs(self, h: float) -> tuple[float, float]:
        got = self._memo.get(h)
        if got is None:
            lp = j_log_integral(h, self.k, self.N, 0.0, self.beta)
            lm = j_log_integral(h, self.k, self.N, -1.0, 0.0)
            got = self._memo[h] = (lp, lm)
        return got

    def terms(self, h: float, theta: float) -> tuple[float, float]:
        lp, lm = self.logs(h)
        with np.errstate(over="ignore"):
            t1 = float(np.exp(math.log1p(-theta) - lp))
            t2 = float(np.exp(math.log(theta) - lm))
        return t1, t2

    def gap(self, h: float, target: float) -> float:
        lp, lm = self.logs(h)
        if lp == lm:  # covers inf - inf
            if math.isfinite(lp):
                return -target
            raise _BothDivergent(h)
        return (lp - lm) - target

    _H_MAX = 1e9

    def balance(self, theta: float) -> tuple[float, float, float, bool]:
        """(h, term1, term2, balanced) at the infimum over h of the max of the terms.

        Where both integrals diverge both terms are 0, which is then the infimum.
        """
        target = math.log1p(-theta) - math.log(theta)
        try:
            g0 = self.gap(0.0, target)
            if g0 == 0.0:
                return (0.0, *self.terms(0.0, theta), True)
            sgn = 1.0 if g0 < 0 else -1.0
            lo, step = 0.0, 1.0
            while step <= self._H_MAX:
                g = self.gap(sgn * step, target)
                if (g > 0) == (sgn > 0) or g == 0.0:
                    br = sorted((sgn * lo, sgn * step))
                    h = find_root(lambda x: self.gap(x, target), br)
                    return (h, *self.terms(h, theta), True)
                lo, step = step, 2.0 * step
        except _BothDivergent as hit:
            return (hit.h, 0.0, 0.0, True)
        # no crossing: the max is monotone in h, its infimum is the far limit
        h = sgn * lo
        return (h, *self.terms(h, theta), False)

    def value(self, theta: float) -> float:
        _, t1, t2, _ = self.balance(theta)
        return max(t1, t2)


def _general_guard(triple: CurvatureTriple) -> int | None:
    """Case number, None for the identically-zero triple (K=0, N=0); raises otherwise."""
    case, why = triple.classify()
    if case is None:
        if triple.K == 0 and triple.N == 0:
            return None
        raise ExcludedTriple(f"{triple}: {why}")
    return case


def solve_balance(triple: CurvatureTriple, a: float, theta: float) -> BalanceSolution:
    """Balance the two CDD terms for left arm a (right arm D - a, or inf)."""
    _general_guard(triple)
    if not 0 < theta < 1:
        raise DomainError("theta must lie in (0, 1)")
    a = float(a)
    D = triple.D
    if not 0 < a < D:
        raise DomainError("need 0 < a < D")
    b = D - a if math.isfinite(D) else math.inf
    arms = _Arms(triple.K * a * a, triple.N, b / a)
    h, t1, t2, ok = arms.balance(theta)
    return BalanceSolution(h / a, max(t1, t2), a, b, (t1, t2), ok)


_OUTER_GRID = 40


def _outer_plan(triple: CurvatureTriple):
    """Map from an outer parameter z to the dimensionless (k, beta), its range, and limits."""
    K, N, D = triple.K, triple.N, triple.D
    if math.isinf(D):
        if K == 0:
            return None, (0.0, math.inf)
        # k = K a^2 sweeps (0, inf); a -> 0 gives the flat-space value
        return (lambda z: (K * math.exp(2.0 * z), math.inf), (-12.0, 6.0)), (0.0, math.inf)

    def at(z):
        u = special.expit(z)
        return K * D * D * u * u, math.exp(-z)  # beta = (1-u)/u

    return (at, (-20.0, 8.0)), (0.0, math.inf)


def _golden_min(fun, lo: float, hi: float, iters: int = 40) -> tuple[float, float]:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - inv * (hi - lo), lo + inv * (hi - lo)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - inv * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv * (hi - lo)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def _general_values(triple: CurvatureTriple, thetas: np.ndarray) -> np.ndarray:
    N = triple.N
    plan, limit = _outer_plan(triple)
    base = _Arms(limit[0], N, limit[1])
    vals = np.array([base.value(t) for t in thetas])
    if plan is None:
        return vals
    at, (zlo, zhi) = plan
    zs = np.linspace(zlo, zhi, _OUTER_GRID)
    arms = [_Arms(at(z)[0], N, at(z)[1]) for z in zs]
    grid = np.array([[ar.value(t) for t in thetas] for ar in arms])
    dz = zs[1] - zs[0]
    for j, t in enumerate(thetas):
        i = int(np.argmin(grid[:, j]))
        best = grid[i, j]
        lo, hi = max(zlo, zs[i] - dz), min(zhi, zs[i] + dz)
        _, fz = _golden_min(lambda z: _Arms(at(z)[0], N, at(z)[1]).value(t), lo, hi)
        vals[j] = min(vals[j], best, fz)
    return vals


def cdd_profile_general(triple: CurvatureTriple, theta):
    """CDD dilation profile by direct optimization over (a, b) and H.

    For each left arm a the inner infimum over H is reached where the two
    terms of the max agree; that balance point is found by bracketing and
    root-finding. The outer infimum over a uses a grid plus golden-section
    polish, together with the a -> 0 limit. Returns 0 at theta in {0, 1}.

    Raises:
        ExcludedTriple: for triples outside Cases 1-9 other than (K=0, N=0),
            whose profile is identically 0.
    """
    case = _general_guard(triple)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any((th < 0) | (th > 1)):
        raise DomainError("theta must lie in [0, 1]")
    out = np.zeros_like(th)
    inner = (th > 0) & (th < 1)
    if case is not None and np.any(inner):
        out[inner] = _general_values(triple, th[inner])
    return out if np.ndim(theta) else float(out[0])


# --------------------------------------------------------------------------
# case formulas


def _log_sin(s):
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.sin(s)
        return np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), -np.inf)


def _log_sinh(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.abs(s)
        v = a + np.log(-np.expm1(-2.0 * a)) - math.log(2.0)
        return np.where(s > 0, v, -np.inf)


def _log_cosh(s):
    a = np.abs(np.asarray(s, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def _power(logg, p: float):
    def logf(s):
        v = np.asarray(logg(s), dtype=float)
        with np.errstate(invalid="ignore"):
            out = p * v
        # 0^p with p < 0 is +inf: outside the model interval
        return np.where(np.isneginf(v) & (p < 0), np.inf, np.where(p == 0, 0.0, out))

    return logf


@dataclass
class CaseResult:
    """Case-formula profile values with the minimizing shift of each branch."""

    case: int
    thetas: np.ndarray
    values: np.ndarray
    branch: list = field(default_factory=list)
    shift: list = field(default_factory=list)
    attained: list = field(default_factory=list)


class _Branch:
    """inf over x of the flat profile of exp(logf) on [x, right(x)]."""

    def __init__(self, name, logf, right, xs, limits, scale=None):
        self.name, self.logf, self.right = name, logf, right
        self.xs = np.asarray(xs, dtype=float)
        self.limits = limits  # list of (label, theta -> values)
        self.scale = scale

    def profile_at(self, x: float, thetas: np.ndarray) -> np.ndarray:
        try:
            fp = FlatProfile(self.logf, x, self.right(x), scale=self.scale(x) if self.scale else None)
            v = np.asarray(fp(thetas), dtype=float)
        except (DomainError, NonConvergence):
            return np.full(len(thetas), math.inf)
        return np.where(np.isnan(v), math.inf, v)

    def infimum(self, thetas: np.ndarray):
        grid = np.array([self.profile_at(x, thetas) for x in self.xs])
        vals, where, hit = [], [], []
        for j, t in enumerate(thetas):
            i = int(np.argmin(grid[:, j]))
            best, bx = grid[i, j], self.xs[i]
            lo = self.xs[max(i - 1, 0)]
            hi = self.xs[min(i + 1, len(self.xs) - 1)]
            if hi > lo:
                tt = np.array([t])
                x, fx = _golden_min(lambda x: float(self.profile_at(x, tt)[0]), lo, hi, iters=50)
                if fx < best:
                    best, bx = fx, x
            attained = True
            for label, lim in self.limits:
                lv = float(lim(np.array([t]))[0])
                # prefer the exact limit over quadrature values within 1e-9 relative
                if lv <= best * (1.0 + 1e-9):
                    best, bx, attained = lv, label, False
            vals.append(best)
            where.append(bx)
            hit.append(attained)
        return np.array(vals), where, hit


def _case_branches(triple: CurvatureTriple, case: int):
    K, N, D = triple.K, triple.N, triple.D
    c8 = (lambda th: closed_form_profile(N, th)) if N < 0 else (lambda th: np.zeros_like(th))
    if case in (1, 2):
        r = math.sqrt(abs(K))
        Ds = r * D
        logf = (lambda s: -0.5 * np.asarray(s) ** 2) if K > 0 else (lambda s: 0.5 * np.asarray(s) ** 2)
        exp_lim = [("x->inf" if K > 0 else "x->-inf", lambda th: closed_form_profile(math.inf, th))]
        if case == 1:
            xs = np.concatenate([np.linspace(-6.0, 6.0, 49), np.geomspace(6.5, 60.0, 16)])
            return [_Branch("gaussian", logf, lambda x: math.inf, xs, exp_lim,
                            scale=lambda x: 1.0 / max(1.0, x))]
        mid = -0.5 * Ds
        span = np.concatenate([np.linspace(0.0, 6.0, 33), np.geomspace(6.5, 60.0 + 60.0 / Ds, 24)])
        xs = np.unique(np.concatenate([mid - span, mid + span]))
        return [_Branch("gaussian", logf, lambda x: x + Ds, xs, exp_lim)]

    d = triple.delta
    w = math.sqrt(abs(d))
    Ds = w * D
    p = N - 1.0
    if case in (4, 9):
        logf = _power(_log_sin, p)
        if case == 4:
            xs = np.concatenate([np.linspace(0.0, math.pi, 65)[:-1],
                                 math.pi - np.geomspace(1e-2, 1e-6, 9)])
            return [_Branch("sin", logf, lambda x: min(x + Ds, math.pi), xs,
                            [("x->pi", lambda th: closed_form_profile(N, th))])]
        top = math.pi - Ds
        xs = np.concatenate([np.geomspace(1e-6, 1e-2, 9) * top, np.linspace(0.0, top, 65)[1:-1]])
        return [_Branch("sin", logf, lambda x: x + Ds, np.sort(xs), [("x->0", c8)])]

    if case == 6:
        iii = ("exp", lambda th: _exp_flat(-p, Ds, th))
        logf_i = _power(lambda s: _log_sinh(-np.asarray(s)), p)
        xs_i = -np.concatenate([np.geomspace(1e-6, 1e-2, 9), np.linspace(0.0, 12.0, 49)[1:],
                                np.geomspace(12.5, 60.0, 8)])
        br_i = _Branch("sinh", logf_i, lambda x: min(x + Ds, 0.0), np.sort(xs_i),
                       [("x->0", lambda th: closed_form_profile(N, th)), ("x->-inf", iii[1])])
        lim_ii = [("x->-inf", iii[1]), ("x->inf", lambda th: _exp_flat(p, Ds, th))]
    else:
        lam = p  # N - 1 < 0: decreasing exponential
        iii = ("exp", lambda th: _exp_flat(lam, Ds, th))
        logf_i = _power(_log_sinh, p)
        xs_i = np.concatenate([np.geomspace(1e-6, 1e-2, 9), np.linspace(0.0, 12.0, 49)[1:],
                               np.geomspace(12.5, 60.0, 8)])
        br_i = _Branch("sinh", logf_i, lambda x: x + Ds, np.sort(xs_i),
                       [("x->0", c8), ("x->inf", iii[1])])
        lim_ii = [("x->inf", iii[1])]
        if math.isfinite(Ds):
            lim_ii.append(("x->-inf", lambda th: _exp_flat(-p, Ds, th)))
    xs_ii = np.concatenate([np.linspace(-12.0, 12.0, 65), np.geomspace(12.5, 60.0, 8),
                            -np.geomspace(12.5, 60.0, 8)])
    if math.isfinite(Ds):
        xs_ii = xs_ii - 0.5 * Ds
    br_ii = _Branch("cosh", _power(_log_cosh, p), lambda x: x + Ds, np.sort(xs_ii), lim_ii)
    const = _Branch("exp", None, None, [], [iii])
    return [br_i, br_ii, const]


def cdd_profile_case_details(triple: CurvatureTriple, theta) -> CaseResult:
    """Case-formula profile with the minimizing branch and shift for each theta."""
    case = triple.require_case()
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any((th < 0) | (th > 1)):
        raise DomainError("theta must lie in [0, 1]")
    res = CaseResult(case, th, np.zeros_like(th), [None] * len(th), [None] * len(th),
                     [True] * len(th))
    inner = np.nonzero((th > 0) & (th < 1))[0]
    if inner.size == 0:
        return res
    ti = th[inner]
    if case in (3, 5, 8):
        res.values[inner] = closed_form_profile(triple.N, ti)
        for k in inner:
            res.branch[k] = "closed-form"
        return res
    best = np.full(len(ti), math.inf)
    for br in _case_branches(triple, case):
        if br.logf is None:
            v = np.asarray(br.limits[0][1](ti), dtype=float)
            where, hit = [None] * len(ti), [True] * len(ti)
        else:
            v, where, hit = br.infimum(ti)
        for j, k in enumerate(inner):
            if v[j] < best[j]:
                best[j] = v[j]
                res.branch[k], res.shift[k], res.attained[k] = br.name, where[j], hit[j]
    res.values[inner] = best
    return res


def cdd_profile_case(triple: CurvatureTriple, theta):
    """Profile given by the explicit case formulas (Cases 1-9) for the triple.

    Raises:
        ExcludedTriple: if the triple falls outside Cases 1-9.
    """
    res = cdd_profile_case_details(triple, theta)
    return res.values if np.ndim(theta) else float(res.values[0])


# --------------------------------------------------------------------------
# tables


_METHODS = ("flat", "cdd-general", "cdd-case", "gaussian", "brute-force")


@dataclass
class ProfileTable:
    """Sampled profile theta -> value with a description of what was sampled."""

    descriptor: str
    thetas: list
    values: list
    method: str

    def __post_init__(self) -> None:
        self.thetas = [float(t) for t in self.thetas]
        self.values = [float(v) for v in self.values]
        if self.method not in _METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if len(self.thetas) != len(self.values) or not self.thetas:
            raise DomainError("thetas and values must be non-empty and of equal length")
        t = np.asarray(self.thetas)
        if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > 1:
            raise DomainError("thetas must be strictly ascending in [0, 1]")
        if not (math.isfinite(self.values[0]) and math.isfinite(self.values[-1])):
            raise DomainError("end values must be finite")
        if any(v < 0 for v in self.values):
            raise DomainError("profile values must be nonnegative")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "value", "method"])
        for t, v in zip(self.thetas, self.values):
            w.writerow([f"{t:.9g}", f"{v:.9g}", self.method])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, descriptor: str = "") -> "ProfileTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise DomainError("empty profile table")
        methods = {r["method"] for r in rows}
        if len(methods) != 1:
            raise DomainError("mixed methods in one table")
        return cls(descriptor, [float(r["theta"]) for r in rows],
                   [float(r["value"]) for r in rows], methods.pop())


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DILATION_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate_chunk(args):
    method, triple, thetas = args
    fn = cdd_profile_general if method == "cdd-general" else cdd_profile_case
    return np.asarray(fn(triple, np.asarray(thetas)), dtype=float).tolist()


def profile_table(triple: CurvatureTriple, thetas, method: str = "cdd-case") -> ProfileTable:
    """Tabulate a CDD profile; splits theta over DILATION_LAB_THREADS processes."""
    if method not in ("cdd-general", "cdd-case"):
        raise DomainError("method must be 'cdd-general' or 'cdd-case'")
    th = [float(t) for t in thetas]
    workers = min(_threads(), len(th))
    if workers <= 1:
        vals = _evaluate_chunk((method, triple, th))
    else:
        chunks = [th[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_evaluate_chunk, [(method, triple, c) for c in chunks]))
        vals = [0.0] * len(th)
        for i, part in enumerate(parts):
            vals[i::workers] = part
    return ProfileTable(str(triple), th, vals, method)


# --------------------------------------------------------------------------
# structural checks


def check_concavity(table: ProfileTable, slack: float = 1e-8) -> VerificationReport:
    """Three-point concavity of a sampled profile on consecutive grid points."""
    t = np.asarray(table.thetas)
    v = np.asarray(table.values)
    if len(t) < 3:
        return VerificationReport.compare("concavity", {"descriptor": table.descriptor},
                                          0.0, 0.0, slack, ">=")
    lam = (t[2:] - t[1:-1]) / (t[2:] - t[:-2])
    chord = lam * v[:-2] + (1.0 - lam) * v[2:]
    gap = v[1:-1] - chord
    i = int(np.argmin(gap))
    return VerificationReport.compare(
        "concavity", {"descriptor": table.descriptor, "method": table.method},
        v[1 + i], chord[i], slack, ">=", theta=float(t[1 + i]))


def _trend(y: np.ndarray, tol: float) -> str:
    dy = np.diff(y)
    up, down = bool(np.all(dy >= -tol)), bool(np.all(dy <= tol))
    if up and down:
        return "constant"
    if up:
        return "non-decreasing"
    if down:
        return "non-increasing"
    return "none"


def check_shift_monotonicity(f: Callable, a: float, x_grid, theta: float, *,
                             df: Callable | None = None, tol: float = 1e-9) -> VerificationReport:
    """If f'(x)(x-a)/f(x) is monotone in x, so is x -> flat profile of f on [a, x].

    The direction of the ratio is read off the grid first; the profile must
    then move the same way (a constant ratio allows either direction).
    """
    xs = np.asarray(x_grid, dtype=float)
    if np.any(xs <= a) or np.any(np.diff(xs) <= 0):
        raise DomainError("x_grid must be ascending and lie to the right of a")
    fv = np.array([float(f(x)) for x in xs])
    if df is None:
        h = 1e-6 * np.maximum(1.0, np.abs(xs))
        dv = np.array([(float(f(x + e)) - float(f(x - e))) / (2 * e) for x, e in zip(xs, h)])
    else:
        dv = np.array([float(df(x)) for x in xs])
    ratio = dv * (xs - a) / fv
    r_dir = _trend(ratio, 1e-7 * max(1.0, float(np.max(np.abs(ratio)))))
    logf = _as_logf(f)
    prof = np.array([float(FlatProfile(logf, a, x)(theta)) for x in xs])
    p_dir = _trend(prof, tol)
    params = {"a": float(a), "theta": float(theta)}
    if r_dir == "none":
        return VerificationReport("shift_monotonicity", params, 0.0, 0.0, tol, True, 0.0,
                                  {"ratio": r_dir, "profile": p_dir, "applicable": False})
    if r_dir == "constant":
        ok = p_dir != "none"
    else:
        ok = p_dir in (r_dir, "constant")
    sign = 1.0 if r_dir == "non-decreasing" else -1.0
    worst = float(np.min(sign * np.diff(prof))) if r_dir != "constant" else 0.0
    return VerificationReport("shift_monotonicity", params, float(prof[0]), float(prof[-1]),
                              tol, bool(ok), worst, {"ratio": r_dir, "profile": p_dir,
                                                     "applicable": True})


def check_boundary_monotone(mu, c_grid, tol: float = 1e-9) -> VerificationReport:
    """For a monotone density on (lo, hi) compare mu*((lo, c)) with mu((lo, c)).

    Non-decreasing densities must give mu* >= mu, non-increasing ones mu* <= mu.
    The dilation area of (lo, c) is f(c)(c - lo) because the density vanishes
    left of lo.
    """
    from .intervals import IntervalUnion
    from .measure1d import dilation_area

    lo, hi = mu.support
    if not math.isfinite(lo):
        raise DomainError("support must have a finite left end")
    cs = np.asarray(c_grid, dtype=float)
    if np.any(cs <= lo) or np.any(cs >= hi):
        raise DomainError("c_grid must lie inside the support")
    probe = np.linspace(lo, cs.max(), 257)[1:]
    dens = np.asarray(mu.pdf(probe), dtype=float)
    direction = _trend(dens, 1e-12 * max(1.0, float(dens.max())))
    if direction == "none":
        raise DomainError("density is not monotone on the tested range")
    reports = []
    for c in cs:
        A = IntervalUnion.interval(lo, float(c))
        star, m = dilation_area(mu, A), mu.mass(lo, float(c))
        rel = ">=" if direction == "non-decreasing" else "<="
        if direction == "constant":
            rel = "=="
        reports.append(VerificationReport.compare("boundary_monotone", {"c": float(c)},
                                                  star, m, tol, rel))
    return VerificationReport.combine("boundary_monotone", {"measure": mu.name}, reports,
                                      density=direction)
