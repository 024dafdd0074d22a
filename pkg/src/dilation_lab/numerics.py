"""Quadrature, bracketed root-finding and 1-D minimization.

Every other module goes through these three entry points so that tolerances
and the treatment of divergent integrals are uniform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

from .errors import BracketError, DomainError, NonConvergence

__all__ = [
    "Tolerance",
    "Bracket",
    "DEFAULT_TOL",
    "integrate",
    "find_root",
    "minimize_1d",
    "tail_diverges",
    "gauss_legendre",
    "CumulativeIntegral",
    "log_integral_exp",
]


@dataclass(frozen=True)
class Tolerance:
    """Error targets for the iterative routines."""

    rel: float = 1e-10
    abs: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not (self.rel > 0 and self.abs > 0):
            raise DomainError("tolerances must be positive")
        if int(self.max_iter) < 1:
            raise DomainError("max_iter must be at least 1")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise DomainError(f"empty bracket [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _as_bracket(b) -> Bracket:
    return b if isinstance(b, Bracket) else Bracket(float(b[0]), float(b[1]))


_PROBE_DISTANCES = (10.0, 100.0, 1000.0)
_DIVERGENCE_EXPONENT = -1.0 - 1e-6


def tail_diverges(f: Callable[[float], float], anchor: float, direction: int = 1) -> bool:
    """Empirical divergence test for a nonnegative integrand on a half-line.

    Probes f at anchor + direction*d for d in 10, 100, 1000 and reports
    divergence when the tail decays no faster than t^(-1-1e-6).
    """
    vals = []
    for d in _PROBE_DISTANCES:
        with np.errstate(all="ignore"):
            v = float(f(anchor + direction * d))
        vals.append(v)
    if any(math.isnan(v) for v in vals):
        raise NonConvergence("integrand is NaN on the tail")
    if any(math.isinf(v) for v in vals):
        return True
    v2, v3 = vals[1], vals[2]
    if v3 <= 0.0:
        return False
    if v2 <= 0.0:
        return True
    # measure decay against distance from the origin of the tail when the
    # anchor is far from zero, so pure power laws are read correctly
    x2, x3 = abs(anchor + direction * 100.0), abs(anchor + direction * 1000.0)
    if x2 <= 0 or x3 <= x2:
        x2, x3 = 100.0, 1000.0
    slope = math.log(v3 / v2) / math.log(x3 / x2)
    return slope > _DIVERGENCE_EXPONENT


def _quad(g, lo, hi, tol: Tolerance) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        val, err, info = _spi.quad(
            g, lo, hi, epsabs=tol.abs, epsrel=tol.rel, limit=tol.max_iter, full_output=1
        )[:3]
    if math.isnan(val):
        raise NonConvergence("quadrature produced NaN")
    if math.isinf(val):
        return math.inf
    if err > 1e4 * max(tol.abs, tol.rel * abs(val)):
        raise NonConvergence(f"quadrature error estimate {err:.3g} for value {val:.6g}")
    return float(val)


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
    *,
    tail: float | str | None = None,
    center: float = 0.0,
) -> float:
    """Integrate a nonnegative function over a possibly unbounded interval.

    Args:
        f: scalar integrand, nonnegative on (lo, hi).
        lo, hi: endpoints; either may be infinite.
        tol: error targets.
        tail: decay hint for unbounded ends. ``"exp"`` asserts exponential
            decay, a float gives a power-law exponent (divergent when >= -1),
            None probes the tail empirically.
        center: split point used when both ends are infinite.

    Returns:
        The integral, or ``math.inf`` when the integral diverges.
    """
    lo, hi = float(lo), float(hi)
    if math.isnan(lo) or math.isnan(hi) or lo > hi:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if lo == hi:
        return 0.0
    if math.isinf(lo) and math.isinf(hi):
        return integrate(f, lo, center, tol, tail=tail) + integrate(f, center, hi, tol, tail=tail)

    if math.isfinite(lo) and math.isfinite(hi):
        return _quad(f, lo, hi, tol)

    direction = 1 if math.isinf(hi) else -1
    anchor = lo if direction == 1 else hi
    if tail is None:
        if tail_diverges(f, anchor, direction):
            return math.inf
    elif tail != "exp":
        if float(tail) >= -1.0:
            return math.inf

    def mapped(u: float) -> float:
        if u >= 1.0:
            return 0.0
        t = u / (1.0 - u)
        v = f(anchor + direction * t)
        return v / (1.0 - u) ** 2 if v else 0.0

    return _quad(mapped, 0.0, 1.0, tol)


def find_root(g: Callable[[float], float], bracket, tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of g inside a sign-change bracket.

    g may return +-inf near the bracket ends; those are handled by plain
    bisection until both ends are finite, then Brent's method finishes.
    """
    br = _as_bracket(bracket)
    lo, hi = br.lo, br.hi
    flo, fhi = float(g(lo)), float(g(hi))
    if math.isnan(flo) or math.isnan(fhi):
        raise NonConvergence("NaN at bracket endpoint")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: g={flo:.3g}, {fhi:.3g}")
    for _ in range(tol.max_iter):
        if math.isfinite(flo) and math.isfinite(fhi):
            break
        mid = 0.5 * (lo + hi)
        fm = float(g(mid))
        if math.isnan(fm):
            raise NonConvergence(f"NaN at x={mid}")
        if fm == 0.0 or hi - lo <= tol.abs:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    else:
        raise NonConvergence("bisection through infinite values did not terminate")
    try:
        return float(
            # rtol at machine level so the residual, not just x, meets tol.abs
            _spo.brentq(g, lo, hi, xtol=tol.abs, rtol=4 * np.finfo(float).eps, maxiter=tol.max_iter)
        )
    except RuntimeError as exc:  # brentq signals non-convergence this way
        raise NonConvergence(str(exc)) from exc


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _safe(h, x: float) -> float:
    v = float(h(x))
    return math.inf if math.isnan(v) else v


def _golden(h, a: float, b: float, tol: Tolerance) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = _safe(h, c), _safe(h, d)
    for _ in range(tol.max_iter):
        if b - a <= tol.abs + tol.rel * (abs(c) + abs(d)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _safe(h, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _safe(h, d)
    return (c, fc) if fc <= fd else (d, fd)


def minimize_1d(
    h: Callable[[float], float],
    bracket,
    tol: Tolerance = DEFAULT_TOL,
    *,
    grid: int = 256,
) -> tuple[float, float]:
    """Global-ish minimum of h on a closed bracket.

    Scans ``grid`` uniform points, then polishes the best one with golden
    section on its two neighbouring cells. The returned minimum never exceeds
    any grid value. NaN values are treated as +inf.
    """
    br = _as_bracket(bracket)
    xs = np.linspace(br.lo, br.hi, max(int(grid), 3))
    vals = np.array([_safe(h, float(x)) for x in xs])
    if not np.any(np.isfinite(vals)) and not np.any(vals == math.inf):
        raise NonConvergence("objective undefined on the whole bracket")
    i = int(np.argmin(vals))
    best_x, best_v = float(xs[i]), float(vals[i])
    if not math.isfinite(best_v):
        return best_x, best_v
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, len(xs) - 1)])
    x, v = _golden(h, a, b, tol)
    if v < best_v:
        best_x, best_v = x, v
    return best_x, best_v


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _graded_breaks(cells: int, levels: int, lower: bool, upper: bool) -> np.ndarray:
    pts = [np.linspace(0.0, 1.0, cells + 1)]
    geo = 10.0 ** (-np.arange(2, levels + 1) / 2.0)
    geo = geo[geo < 1.0 / cells]
    if lower:
        pts.append(geo)
    if upper:
        pts.append(1.0 - geo)
    return np.unique(np.concatenate(pts))


@lru_cache(maxsize=8)
def _unit_rule(cells: int, levels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and log-weights on (0, 1), graded at both ends."""
    br = _graded_breaks(cells, levels, True, True)
    t, w = gauss_legendre(order)
    du = np.diff(br)[:, None]
    u = (br[:-1, None] + 0.5 * du * (t[None, :] + 1.0)).ravel()
    logw = np.log(0.5 * du * w[None, :]).ravel()
    u.setflags(write=False)
    logw.setflags(write=False)
    return u, logw


class _IntervalMap:
    """Bijection between u in (0, 1) and x in (lo, hi), affine or rational."""

    def __init__(self, lo: float, hi: float, scale: float = 1.0, center: float = 0.0):
        self.lo, self.hi = float(lo), float(hi)
        self.scale, self.center = float(scale), float(center)
        if math.isfinite(self.lo) and math.isfinite(self.hi):
            self.kind = "finite"
        elif math.isfinite(self.lo):
            self.kind = "upper"
        elif math.isfinite(self.hi):
            self.kind = "lower"
        else:
            self.kind = "both"

    def x_of_u(self, u):
        u = np.asarray(u, dtype=float)
        s = self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "finite":
                return self.lo + (self.hi - self.lo) * u
            if self.kind == "upper":
                return self.lo + s * u / (1.0 - u)
            if self.kind == "lower":
                return self.hi - s * (1.0 - u) / u
            v = 2.0 * u - 1.0
            return self.center + s * v / (1.0 - v * v)

    def u_of_x(self, x):
        x = np.asarray(x, dtype=float)
        s = self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "finite":
                u = (x - self.lo) / (self.hi - self.lo)
            elif self.kind == "upper":
                y = (x - self.lo) / s
                u = np.where(np.isinf(y), 1.0, y / (1.0 + y))
            elif self.kind == "lower":
                y = (self.hi - x) / s
                u = np.where(np.isinf(y), 0.0, 1.0 / (1.0 + y))
            else:
                y = (x - self.center) / s
                # solve y (1 - v^2) = v for v in (-1, 1)
                small = np.abs(y) < 1e-8
                ysafe = np.where(small, 1.0, y)
                v = np.where(small, y, (np.sqrt(1.0 + 4.0 * ysafe * ysafe) - 1.0) / (2.0 * ysafe))
                v = np.where(np.isinf(y), np.sign(y), v)
                u = 0.5 * (v + 1.0)
        return np.clip(u, 0.0, 1.0)

    def offset_of_u(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == "finite":
                return (self.hi - self.lo) * u
            if self.kind == "upper":
                return self.scale * u / (1.0 - u)
        raise DomainError("offset from the left end needs a finite left end")

    def log_jac(self, u):
        u = np.asarray(u, dtype=float)
        s = self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "finite":
                return np.full_like(u, math.log(self.hi - self.lo))
            if self.kind == "upper":
                return math.log(s) - 2.0 * np.log1p(-u)
            if self.kind == "lower":
                return math.log(s) - 2.0 * np.log(u)
            v = 2.0 * u - 1.0
            return math.log(2.0 * s) + np.log1p(v * v) - 2.0 * np.log1p(-v * v)


def log_integral_exp(logf: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, *,
                     scale: float = 1.0, center: float = 0.0, cells: int = 32,
                     levels: int = 26, order: int = 16) -> float:
    """log of the integral of exp(logf) over [lo, hi] by graded Gauss-Legendre.

    Meant for integrands that are smooth inside the interval and may be
    singular, vanish or decay at the ends; convergence of unbounded tails must
    be established by the caller. Returns -inf for an identically zero
    integrand and +inf if logf is +inf anywhere.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        return -math.inf
    m = _IntervalMap(lo, hi, scale, center)
    u, logw = _unit_rule(cells, levels, order)
    with np.errstate(all="ignore"):
        vals = np.asarray(logf(m.x_of_u(u)), dtype=float) + m.log_jac(u) + logw
    vals = np.where(np.isnan(vals), -np.inf, vals)
    top = float(vals.max())
    if top == math.inf:
        return math.inf
    if top == -math.inf:
        return -math.inf
    return top + math.log(float(np.exp(vals - top).sum()))


class CumulativeIntegral:
    """Running integral of exp(logf) on [lo, hi], tabulated for fast inversion.

    The interval is mapped onto (0, 1) (affinely for finite ends, rationally
    for infinite ends) and split into cells graded geometrically towards both
    ends of the unit interval; each cell is integrated with Gauss-Legendre.
    Values are kept relative to a common log-scale shift so that densities
    like exp(-x^2/2) far in the tail do not underflow.
    """

    def __init__(
        self,
        logf: Callable[[np.ndarray], np.ndarray],
        lo: float,
        hi: float,
        *,
        scale: float = 1.0,
        center: float = 0.0,
        cells: int = 64,
        levels: int = 26,
        order: int = 20,
    ):
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        self.lo, self.hi = lo, hi
        self.logf = logf
        self._map = _IntervalMap(lo, hi, scale, center)
        self.breaks = _graded_breaks(cells, levels, True, True)
        self._t, self._w = gauss_legendre(order)

        u0 = self.breaks[:-1, None]
        du = np.diff(self.breaks)[:, None]
        u = u0 + 0.5 * du * (self._t[None, :] + 1.0)
        logw = self._log_integrand(u) + np.log(0.5 * du * self._w[None, :])
        finite = logw[np.isfinite(logw)]
        if finite.size == 0 or np.any(logw == np.inf):
            raise DomainError("integrand vanishes identically or is infinite")
        self.shift = float(finite.max())
        cell = np.exp(logw - self.shift).sum(axis=1)
        self.table = np.concatenate([[0.0], np.cumsum(cell)])
        self.total = float(self.table[-1])
        if not math.isfinite(self.total) or self.total <= 0.0:
            raise DomainError("integral is not finite and positive")

    def x_of_u(self, u):
        return self._map.x_of_u(u)

    def u_of_x(self, x):
        return self._map.u_of_x(x)

    def _log_integrand(self, u):
        with np.errstate(all="ignore"):
            val = np.asarray(self.logf(self._map.x_of_u(u)), dtype=float) + self._map.log_jac(u)
        return np.where(np.isnan(val), -np.inf, val)
    def _partial(self, j, u):
        """Shifted integral over [breaks[j], u] for arrays j, u."""
        uj = self.breaks[j]
        half = 0.5 * (u - uj)
        nodes = uj[:, None] + half[:, None] * (self._t[None, :] + 1.0)
        vals = np.exp(self._log_integrand(nodes) - self.shift)
        return half * (vals @ self._w)

    @property
    def log_total(self) -> float:
        return math.log(self.total) + self.shift

    def fraction(self, x):
        """Fraction of the total mass lying in [lo, x]."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        u = self.u_of_x(x)
        j = np.clip(np.searchsorted(self.breaks, u, side="right") - 1, 0, len(self.breaks) - 2)
        out = (self.table[j] + self._partial(j, u)) / self.total
        return np.clip(out, 0.0, 1.0)

    def quantile(self, p, iters: int = 60):
        """Point x with fraction(x) = p, vectorized safeguarded Newton."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        x = self.x_of_u(self.quantile_u(p, iters))
        x = np.where(p <= 0.0, self.lo, x)
        x = np.where(p >= 1.0, self.hi, x)
        return x

    def offset_of_u(self, u):
        """x(u) - lo computed without cancellation (finite left end only)."""
        return self._map.offset_of_u(u)

    def quantile_u(self, p, iters: int = 60):
        """Mapped coordinate u in [0, 1] of the p-quantile."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        target = p * self.total
        j = np.clip(np.searchsorted(self.table, target, side="right") - 1, 0, len(self.breaks) - 2)
        a = self.breaks[j].copy()
        b = self.breaks[j + 1].copy()
        base = self.table[j]
        span = self.table[j + 1] - base
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(span > 0, (target - base) / span, 0.5)
        u = a + np.clip(frac, 0.0, 1.0) * (b - a)
        lo, hi = a.copy(), b.copy()
        # relative to the smaller of the two masses so tiny quantiles keep full precision
        scale_tol = 4e-16 * np.maximum(np.minimum(target, self.total - target), 1e-300)
        scale_tol = np.maximum(scale_tol, 4e-16 * base)
        for _ in range(iters):
            g = base + self._partial(j, u) - target
            done = np.abs(g) <= scale_tol
            lo = np.where(g < 0, u, lo)
            hi = np.where(g > 0, u, hi)
            dg = np.exp(self._log_integrand(u) - self.shift)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = u - g / dg
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            new = np.where(bad, 0.5 * (lo + hi), step)
            u = np.where(done, u, new)
            if np.all(done | (hi - lo <= 2e-16 * np.maximum(hi, 1e-300))):
                break
        u = np.where(p <= 0.0, 0.0, u)
        return np.where(p >= 1.0, 1.0, u)
