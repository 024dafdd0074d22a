"""Measured Remez functions, entropies and the inequalities linking them.

Test functions are piecewise monotone on the support of the measure, so that
every sublevel set {f <= lam} is a finite union of intervals and can be
dilated exactly. Integrals against a measure use adaptive quadrature split
at quantiles of the measure and at the breakpoints of the integrand.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .density import Density1D, compile_expression
from .errors import (
    CurvatureViolated,
    DomainError,
    InadmissibleG,
    Infinite,
    NonConvergence,
    NonIntegrable,
    NotNormalized,
)
from .intervals import IntervalUnion
from .measure1d import check_kn_convexity, dilation_area, epsilon_dilate
from .report import VerificationReport

__all__ = [
    "TestFunction",
    "RemezEstimate",
    "expectation",
    "measured_remez",
    "remez_derivative_at_one",
    "remez_continuity",
    "relative_entropy",
    "n_entropy",
    "dual_functional",
    "coarea_lhs",
    "f_epsilon",
    "phi_f",
    "chebyshev_T",
    "remez_poly_bound",
    "remez_poly_slope_bound",
    "reverse_holder_check",
    "entropy_bound_check",
]

Array = np.ndarray

_STRUCTURES = ("monotone", "unimodal", "piecewise-monotone")
_BISECT_STEPS = 70
_FAR = 1.0 - 2.0 ** -40  # u-coordinate standing in for an infinite end
_NORM_TOL = 1e-8


def _vectorize(f: Callable) -> Callable[[Array], Array]:
    def g(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()
    return g


# ---------------------------------------------------------------------------
# test functions and their sublevel sets


def _piece_map(p: float, q: float) -> Callable[[Array], Array]:
    """Monotone map from u in [0, 1] onto the piece [p, q]."""
    if math.isfinite(p) and math.isfinite(q):
        return lambda u: p + np.asarray(u) * (q - p)
    if math.isfinite(p):
        return lambda u: p + np.asarray(u) / (1.0 - np.asarray(u))
    if math.isfinite(q):
        return lambda u: q - (1.0 - np.asarray(u)) / np.asarray(u)
    return lambda u: np.tan(math.pi * (np.asarray(u) - 0.5))


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Nonnegative function whose sublevel sets are finite interval unions.

    ``structure`` declares how f is monotone: on the whole support
    (``monotone``), on both sides of a single minimum (``unimodal``, the mode
    is ``breakpoints[0]`` or located numerically), or between consecutive
    ``breakpoints`` (``piecewise-monotone``). Jumps are allowed anywhere as
    long as each piece stays monotone.
    """

    __test__ = False  # not a pytest class

    f: Callable[[Array], Array]
    structure: str = "monotone"
    breakpoints: tuple[float, ...] = ()
    name: str = "f"

    def __post_init__(self) -> None:
        if self.structure not in _STRUCTURES:
            raise DomainError(f"structure must be one of {_STRUCTURES}, got {self.structure!r}")
        bps = tuple(sorted(float(b) for b in self.breakpoints))
        if self.structure == "monotone" and bps:
            raise DomainError("a monotone test function takes no breakpoints")
        if self.structure == "unimodal" and len(bps) > 1:
            raise DomainError("a unimodal test function has at most one breakpoint (its mode)")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "f", _vectorize(self.f))

    @classmethod
    def from_expression(cls, expr: str, structure: str = "monotone",
                        breakpoints: Sequence[float] = ()) -> "TestFunction":
        g, _ = compile_expression(expr)
        return cls(g, structure, tuple(breakpoints), name=expr)

    def __call__(self, x) -> Array:
        return self.f(x)

    def scaled(self, a: float, q: float) -> "TestFunction":
        """The test function a f^q (same monotone pieces)."""
        if not (a > 0 and q > 0):
            raise DomainError("a and q must be positive")
        base = self.f
        return TestFunction(lambda x: a * base(x) ** q, self.structure, self.breakpoints,
                            name=f"{a:g}*({self.name})^{q:g}")

    def pieces(self, mu: Density1D) -> list[tuple[float, float]]:
        """Consecutive sub-intervals of the support on which f is monotone."""
        lo, hi = mu.lo, mu.hi
        bps = [b for b in self.breakpoints if lo < b < hi]
        if self.structure == "unimodal" and not self.breakpoints:
            bps = [_locate_mode(self.f, lo, hi)]
            bps = [b for b in bps if lo < b < hi]
        edges = [lo, *bps, hi]
        return list(zip(edges[:-1], edges[1:]))

    def sublevel(self, lam: float, mu: Density1D) -> IntervalUnion:
        """{x in supp(mu) : f(x) <= lam} as an interval union."""
        pairs = []
        for p, q in self.pieces(mu):
            l, r = _piece_sublevel(self.f, p, q, np.array([float(lam)]))
            if l[0] <= r[0]:
                pairs.append((float(l[0]), float(r[0])))
        return IntervalUnion.from_pairs(pairs)

    def sup(self, mu: Density1D) -> float:
        """Supremum of f over the support (limits at the piece ends)."""
        best = -math.inf
        for p, q in self.pieces(mu):
            x = _piece_map(p, q)(np.array([0.0 if math.isfinite(p) else 1.0 - _FAR, _FAR if not math.isfinite(q) else 1.0]))
            best = max(best, float(np.nanmax(self.f(x))))
        return best


def _locate_mode(f: Callable[[Array], Array], lo: float, hi: float) -> float:
    """Minimizer of a unimodal f: grid scan in mapped coordinates, then golden polish."""
    x_of = _piece_map(lo, hi)
    u = np.linspace(1e-6, 1.0 - 1e-6, 2001)
    vals = f(x_of(u))
    vals = np.where(np.isnan(vals), np.inf, vals)
    i = int(np.argmin(vals))
    a, b = u[max(i - 1, 0)], u[min(i + 1, len(u) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(200):
        if b - a < 1e-15:
            break
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        if f(x_of(np.array([c])))[0] <= f(x_of(np.array([d])))[0]:
            b = d
        else:
            a = c
    return float(x_of(np.array([0.5 * (a + b)]))[0])


def _piece_sublevel(f, p: float, q: float, t: Array) -> tuple[Array, Array]:
    """Endpoints (l, r) of {f <= t} on a monotone piece, for an array of levels.

    Empty sets come back with l > r. The boundary is located by bisection on
    the predicate f <= t, which also handles jumps and plateaus.
    """
    x_of = _piece_map(p, q)
    u0 = 0.0 if math.isfinite(p) else 1.0 - _FAR
    u1 = 1.0 if math.isfinite(q) else _FAR
    f0 = f(x_of(np.array([u0])))[0]
    f1 = f(x_of(np.array([u1])))[0]
    increasing = not (f0 > f1)
    t = np.asarray(t, dtype=float)
    at_start = f0 <= t if increasing else f1 <= t
    whole = f1 <= t if increasing else f0 <= t
    # bisection keeps `good` inside the sublevel and `bad` outside it
    good = np.full(t.shape, u0 if increasing else u1)
    bad = np.full(t.shape, u1 if increasing else u0)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (good + bad)
        ok = f(x_of(mid)) <= t
        good = np.where(ok, mid, good)
        bad = np.where(ok, bad, mid)
    edge = x_of(good)
    if increasing:
        l = np.full(t.shape, p)
        r = np.where(whole, q, edge)
    else:
        l = np.where(whole, p, edge)
        r = np.full(t.shape, q)
    empty = ~at_start
    l = np.where(empty, math.inf, l)
    r = np.where(empty, -math.inf, r)
    return l, r


def _sublevel_masses(mu: Density1D, pieces, t: Array) -> tuple[Array, Array]:
    """mu({f <= t}) and its complement, each summed from small pieces."""
    m = np.zeros(t.shape)
    co = np.zeros(t.shape)
    for (p, q), (l, r) in pieces:
        empty = l > r
        ls = np.where(empty, p, l)
        rs = np.where(empty, p, r)
        m += np.where(empty, 0.0, mu.mass(ls, rs))
        co += np.where(empty, mu.mass(p, q), mu.mass(p, ls) + mu.mass(rs, q))
    return m, co


def _union_masses(mu: Density1D, A: IntervalUnion) -> tuple[float, float]:
    """mu(A) and mu(supp \\ A), the complement measured through its gaps."""
    lo, hi = mu.lo, mu.hi
    m = 0.0
    co = 0.0
    cursor = lo
    for l, r in A.components:
        l, r = max(l, lo), min(r, hi)
        if l > r:
            continue
        m += float(mu.mass(l, r))
        if l > cursor:
            co += float(mu.mass(cursor, l))
        cursor = max(cursor, r)
    if cursor < hi:
        co += float(mu.mass(cursor, hi))
    return m, co


def _at_least(m, co, m_target, co_target, rel: float = 1e-12) -> Array:
    """m >= m_target up to a relative slack, read off whichever side is smaller."""
    return np.where(np.asarray(co_target) < np.asarray(m_target),
                    co <= co_target * (1.0 + rel), m >= m_target * (1.0 - rel))


# ---------------------------------------------------------------------------
# measured Remez function


@dataclass
class RemezEstimate:
    """Lower estimate of u_f(s) as the worst constant over a lambda grid."""

    s: float
    C: float
    lambda_grid: list = field(default_factory=list)
    worst_lambda: float = math.nan

    @property
    def finite(self) -> bool:
        return math.isfinite(self.C)


def _lambda_grid(mu: Density1D, f: TestFunction, resolution: int) -> Array:
    p = (np.arange(4 * resolution + 1) + 0.5) / (4 * resolution + 1)
    x = mu.ppf(p)
    vals = f(x[np.isfinite(x)])
    vals = vals[np.isfinite(vals)]
    qs = np.quantile(vals, np.linspace(0.0, 1.0, resolution + 1)) if vals.size else np.array([])
    bps = f(np.array([b for b in f.breakpoints if mu.lo < b < mu.hi]))
    grid = np.concatenate([qs, bps])
    grid = grid[np.isfinite(grid) & (grid > 0)]
    return np.unique(grid)


def _least_constants(mu: Density1D, f: TestFunction, pieces, lams: Array, eps: float) -> Array:
    """For each lambda, the least C >= 1 with mu(B(lam)_eps) <= mu(B(lam C)), or +inf."""
    m_t = np.empty(lams.shape)
    co_t = np.empty(lams.shape)
    for i, lam in enumerate(lams):
        B = f.sublevel(lam, mu)
        m_t[i], co_t[i] = _union_masses(mu, epsilon_dilate(B, eps).dilated)

    def satisfied(C: Array) -> Array:
        t = lams * C
        ends = [((p, q), _piece_sublevel(f.f, p, q, t)) for p, q in pieces]
        m, co = _sublevel_masses(mu, ends, t)
        return _at_least(m, co, m_t, co_t)

    C = np.ones(lams.shape)
    done = satisfied(C)
    hi = np.where(done, 1.0, 2.0)
    ok_hi = done.copy()
    for _ in range(60):
        if ok_hi.all():
            break
        ok_hi = ok_hi | satisfied(hi)
        hi = np.where(ok_hi, hi, hi * 2.0)
    out = np.full(lams.shape, math.inf)
    active = ok_hi & ~done
    out[done] = 1.0
    if active.any():
        lo_log = np.log(np.maximum(hi / 2.0, 1.0))
        hi_log = np.log(hi)
        for _ in range(60):
            mid = 0.5 * (lo_log + hi_log)
            ok = satisfied(np.exp(mid))
            hi_log = np.where(active & ok, mid, hi_log)
            lo_log = np.where(active & ~ok, mid, lo_log)
        out[active] = np.exp(hi_log[active])
    return out


def measured_remez(mu: Density1D, f: TestFunction, s: float, resolution: int = 200,
                   refine: int = 16) -> RemezEstimate:
    """Measured Remez constant u_f(s) estimated over a lambda grid.

    The grid holds quantiles of f under mu at the given resolution and the
    values of f at its breakpoints; the worst grid point is then refined
    between its neighbours. Because u_f is a supremum over all lambda the
    result is a lower estimate, except for the +inf verdicts: those come from
    a lambda without any admissible C, or from the limit lambda -> 0 when
    {f <= 0} has positive measure and its dilation strictly gains mass.
    """
    s = float(s)
    if not s >= 1.0:
        raise DomainError(f"s must be at least 1, got {s}")
    lams = _lambda_grid(mu, f, resolution)
    if s == 1.0 or lams.size == 0:
        return RemezEstimate(s, 1.0, lams.tolist(), float(lams[0]) if lams.size else math.nan)
    eps = 1.0 - 1.0 / s
    pieces = f.pieces(mu)
    B0 = f.sublevel(0.0, mu)
    m0, co0 = _union_masses(mu, B0)
    if m0 > 1e-12:
        m1, co1 = _union_masses(mu, epsilon_dilate(B0, eps).dilated)
        if co1 < co0 * (1.0 - 1e-9):
            return RemezEstimate(s, math.inf, lams.tolist(), 0.0)
    C = _least_constants(mu, f, pieces, lams, eps)
    i = int(np.argmax(C))
    best_C, best_lam = float(C[i]), float(lams[i])
    if math.isfinite(best_C) and refine > 0 and lams.size > 1:
        a = lams[max(i - 1, 0)]
        b = lams[min(i + 1, lams.size - 1)]
        extra = np.geomspace(a, b, refine + 2)[1:-1]
        C2 = _least_constants(mu, f, pieces, extra, eps)
        j = int(np.argmax(C2))
        if C2[j] > best_C:
            best_C, best_lam = float(C2[j]), float(extra[j])
    return RemezEstimate(s, best_C, lams.tolist(), best_lam)


def remez_derivative_at_one(mu: Density1D, f: TestFunction,
                            steps: Sequence[float] = (1.1, 1.01, 1.001), **kwargs) -> float:
    """Largest slope (u_f(s) - 1)/(s - 1) over the probe points s > 1.

    A surrogate for the upper limit as s -> 1+. It is not a bound in either
    direction: for u_f(s) = (2s - 1)^2 the probe at 1.1 gives 4.4 while the
    limit is 4.
    """
    slopes = []
    for s in steps:
        if not s > 1.0:
            raise DomainError("probe points must exceed 1")
        u = measured_remez(mu, f, s, **kwargs).C
        if not math.isfinite(u):
            raise Infinite(f"measured Remez function is infinite at s={s}")
        slopes.append((u - 1.0) / (s - 1.0))
    return max(0.0, max(slopes))


def remez_continuity(mu: Density1D, f: TestFunction, probes: Sequence[float] = (1.001, 1.0001),
                     tol: float = 1e-2) -> VerificationReport:
    """Numerical check that u_f(s) approaches 1 as s -> 1+ (cannot prove continuity)."""
    vals = [measured_remez(mu, f, s).C for s in probes]
    gap = vals[-1] - 1.0
    return VerificationReport.compare("remez_continuity", {"f": f.name, "measure": mu.name},
                                      vals[-1], 1.0, tol, "==", probes=list(probes), values=vals,
                                      shrinking=bool(vals[-1] <= vals[0]), gap=gap)


# ---------------------------------------------------------------------------
# integrals against the measure


def _split_points(mu: Density1D, extra: Sequence[float] = ()) -> list[float]:
    qs = mu.ppf(np.array([0.01, 0.1, 0.5, 0.9, 0.99]))
    pts = [mu.lo, *[float(v) for v in qs], *[float(v) for v in extra], mu.hi]
    pts = sorted({min(max(v, mu.lo), mu.hi) for v in pts if not math.isnan(v)})
    return pts


def expectation(mu: Density1D, h: Callable[[Array], Array], breakpoints: Sequence[float] = (),
                *, rel: float = 1e-12) -> float:
    """Integral of h against mu, by adaptive quadrature between quantile breakpoints.

    Raises:
        NonIntegrable: when the quadrature reports divergence or a NaN value.
    """
    hv = _vectorize(h)

    def integrand(x: float) -> float:
        arr = np.array([x])
        dens = mu.pdf(arr)[0]
        if dens == 0.0:
            return 0.0
        return float(hv(arr)[0] * dens)

    total = 0.0
    pts = _split_points(mu, breakpoints)
    for a, b in zip(pts[:-1], pts[1:]):
        if not a < b:
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", sp_integrate.IntegrationWarning)
            val, err = sp_integrate.quad(integrand, a, b, limit=400, epsabs=1e-14, epsrel=rel)
        if not math.isfinite(val) or (caught and err > 1e-7 * max(1.0, abs(val))):
            raise NonIntegrable(f"integral over [{a:g}, {b:g}] did not converge (value {val:g}, error {err:g})")
        total += val
    return total


def _check_normalized(mu: Density1D, rho: TestFunction) -> None:
    mass = expectation(mu, rho.f, rho.breakpoints)
    if abs(mass - 1.0) > _NORM_TOL:
        raise NotNormalized(f"density integrates to {mass:.12g}, not 1")


def relative_entropy(mu: Density1D, rho: TestFunction) -> float:
    """Ent(rho mu) = integral of rho log rho against mu, with 0 log 0 = 0."""
    _check_normalized(mu, rho)
    return expectation(mu, lambda x: special.xlogy(rho(x), rho(x)), rho.breakpoints)


def _check_entropy_parameter(N: float) -> None:
    if math.isnan(N) or -1.0 <= N < 1.0:
        raise DomainError(f"N must lie in (-inf, -1) or [1, inf], got {N}")


def n_entropy(mu: Density1D, rho: TestFunction, N: float) -> float:
    """U_N(rho mu) = N integral rho^{(1+N)/N} dmu - N; N = +-inf gives the relative entropy.

    Jensen makes the value nonnegative; a clearly negative result signals
    a quadrature failure.
    """
    N = float(N)
    _check_entropy_parameter(N)
    if math.isinf(N):
        return relative_entropy(mu, rho)
    _check_normalized(mu, rho)
    power = (1.0 + N) / N
    value = N * expectation(mu, lambda x: rho(x) ** power, rho.breakpoints) - N
    if value < -1e-8:
        raise NonConvergence(f"N-entropy came out negative ({value:.3g})")
    return value


def dual_functional(mu: Density1D, rho: TestFunction, g: Callable[[Array], Array], N: float,
                    breakpoints: Sequence[float] = ()) -> float:
    """Value of the dual expression whose supremum over admissible g is U_N.

    Finite N: (1+N) integral g rho dmu - integral g^{1+N} dmu - N. For N >= 1, g
    must be nonnegative with g^{1+N} integrable; for N < -1, g must be
    finite and positive on the support. N = inf uses the log dual
    integral rho log g dmu - log integral g dmu, whose supremum is Ent.

    Raises:
        InadmissibleG: g fails the sign or integrability requirements.
    """
    N = float(N)
    _check_entropy_parameter(N)
    gv = _vectorize(g)
    bps = tuple(rho.breakpoints) + tuple(breakpoints)
    probe = mu.ppf((np.arange(512) + 0.5) / 512)
    gp = gv(probe[np.isfinite(probe)])
    if np.any(np.isnan(gp)):
        raise InadmissibleG("g is undefined on the support")
    if N >= 1.0 and np.any(gp < 0):
        raise InadmissibleG("g must be nonnegative for N >= 1")
    if (N < -1.0 or math.isinf(N)) and (np.any(gp <= 0) or not np.all(np.isfinite(gp))):
        raise InadmissibleG("g must be finite and positive on the support")
    try:
        if math.isinf(N):
            first = expectation(mu, lambda x: special.xlogy(rho(x), gv(x)), bps)
            second = math.log(expectation(mu, gv, bps))
            return first - second
        first = expectation(mu, lambda x: gv(x) * rho(x), bps)
        second = expectation(mu, lambda x: gv(x) ** (1.0 + N), bps)
    except NonIntegrable as exc:
        raise InadmissibleG(f"dual integrals diverge: {exc}") from exc
    return (1.0 + N) * first - second - N


# ---------------------------------------------------------------------------
# co-area type integral and the f_eps construction


def coarea_lhs(mu: Density1D, f: TestFunction, t_grid: Sequence[float] | None = None) -> float:
    """Integral over t > 0 of the dilation area of {f <= t}.

    With ``t_grid`` the trapezoid rule on that grid is used; otherwise
    adaptive quadrature up to sup f, split at quantiles of f.
    """
    def area(t: float) -> float:
        return dilation_area(mu, f.sublevel(t, mu))

    if t_grid is not None:
        t = np.asarray(t_grid, dtype=float)
        vals = np.array([area(v) for v in t])
        return float(np.trapezoid(vals, t))
    top = f.sup(mu)
    if not top > 0:
        return 0.0
    lams = _lambda_grid(mu, f, 20)
    pts = sorted({0.0, *[float(v) for v in lams if 0 < v < top]})
    # geometric cells out to sup f keep the adaptive rule from missing the tail
    while pts[-1] > 0 and pts[-1] * 2.0 < top and len(pts) < 400:
        pts.append(pts[-1] * 2.0)
    if math.isfinite(top):
        pts.append(top)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += sp_integrate.quad(area, a, b, limit=200, epsabs=1e-12, epsrel=1e-10)[0]
    if not math.isfinite(top):
        total += sp_integrate.quad(area, pts[-1], math.inf, limit=200, epsabs=1e-12, epsrel=1e-10)[0]
    return total


def _f_eps_point(mu: Density1D, f: TestFunction, eps: float, x: float, fx: float) -> float:
    """inf{lam > 0 : x in {f <= lam}_eps} by bisection on lam in [0, f(x)]."""
    if not fx > 0:
        return 0.0

    def member(lam: float) -> bool:
        B = f.sublevel(lam, mu)
        return bool(B) and bool(epsilon_dilate(B, eps).dilated.contains(np.array([x]))[0])

    lo, hi = 0.0, fx
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi


def f_epsilon(mu: Density1D, f: TestFunction, eps: float) -> TestFunction:
    """The function f_eps(x) = inf{lam > 0 : x in {f <= lam}_eps}."""
    eps = float(eps)
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    if eps == 0.0:
        return f

    def g(x):
        x = np.asarray(x, dtype=float)
        fx = f(x)
        flat = [_f_eps_point(mu, f, eps, float(a), float(b)) for a, b in zip(x.ravel(), fx.ravel())]
        return np.array(flat).reshape(x.shape)

    return TestFunction(g, f.structure, f.breakpoints, name=f"({f.name})_eps={eps:g}")


def phi_f(mu: Density1D, f: TestFunction, steps: Sequence[float] = (1e-2, 1e-3, 1e-4),
          rtol: float = 1e-4) -> TestFunction:
    """Phi_f = lim (f - f_eps)/eps as eps -> 0, by Richardson on the given steps.

    Raises:
        NonConvergence: the last two extrapolated values disagree by more
            than ``rtol`` at some evaluation point.
    """
    steps = [float(e) for e in steps]
    if len(steps) < 2 or any(b >= a for a, b in zip(steps, steps[1:])) or steps[-1] <= 0:
        raise DomainError("steps must be at least two positive, strictly descending values")
    approx = [f_epsilon(mu, f, e) for e in steps]

    def g(x):
        x = np.asarray(x, dtype=float)
        fx = f(x)
        q = [(fx - fe(x)) / e for fe, e in zip(approx, steps)]
        est = [(e0 / e1 * q1 - q0) / (e0 / e1 - 1.0)
               for e0, e1, q0, q1 in zip(steps, steps[1:], q, q[1:])]
        if len(est) >= 2:
            bad = np.abs(est[-1] - est[-2]) > rtol * np.maximum(np.abs(est[-1]), 1e-12)
            if np.any(bad):
                raise NonConvergence("Phi_f extrapolation did not settle")
        return np.maximum(est[-1], 0.0)

    return TestFunction(g, f.structure, f.breakpoints, name=f"Phi[{f.name}]")


# ---------------------------------------------------------------------------
# polynomial Remez bounds and moment comparison


def chebyshev_T(d: int, x):
    """Chebyshev polynomial T_d(x) by the three-term recurrence."""
    d = int(d)
    if d < 0:
        raise DomainError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    t_prev, t = np.ones_like(x), x.copy()
    if d == 0:
        out = t_prev
    else:
        for _ in range(d - 1):
            t_prev, t = t, 2.0 * x * t - t_prev
        out = t
    return float(out) if out.ndim == 0 else out


def remez_poly_bound(d: int, s):
    """T_d(2s - 1): bound on the Remez function of the norm of a degree-d polynomial."""
    if int(d) < 1:
        raise DomainError("degree must be at least 1")
    return chebyshev_T(d, 2.0 * np.asarray(s, dtype=float) - 1.0)


def remez_poly_slope_bound(d: int) -> float:
    """2 d^2, the matching bound on u'(1) (the slope of T_d(2s - 1) at s = 1)."""
    if int(d) < 1:
        raise DomainError("degree must be at least 1")
    return 2.0 * int(d) ** 2


def reverse_holder_check(mu: Density1D, f: TestFunction, p: float, q: float, uprime: float,
                         tol: float = 1e-9) -> VerificationReport:
    """(int |f|^q)^{1/q} <= (q/p)^{u'} (int |f|^p)^{1/p}."""
    p, q, uprime = float(p), float(q), float(uprime)
    if not (0 < p <= q < math.inf) or uprime < 0:
        raise DomainError("need 0 < p <= q < inf and u' >= 0")
    mq = expectation(mu, lambda x: np.abs(f(x)) ** q, f.breakpoints) ** (1.0 / q)
    mp = expectation(mu, lambda x: np.abs(f(x)) ** p, f.breakpoints) ** (1.0 / p)
    rhs = (q / p) ** uprime * mp
    return VerificationReport.compare("reverse_holder", {"measure": mu.name, "f": f.name, "p": p, "q": q,
                                                         "uprime": uprime},
                                      mq, rhs, tol * max(1.0, rhs), "<=", ratio=mq / mp)


def entropy_bound_check(mu: Density1D, rho: TestFunction, N: float, tol: float = 1e-8,
                        uprime: float | None = None) -> VerificationReport:
    """Entropy of rho mu against u'_rho(1): relative entropy for N = inf, U_N otherwise.

    Raises:
        CurvatureViolated: mu fails the sampled CD(0, N) test.
    """
    N = float(N)
    _check_entropy_parameter(N)
    cd = check_kn_convexity(mu, 0.0, N)
    if not cd.passed:
        raise CurvatureViolated(f"{mu.name} fails the CD(0, {N:g}) test (margin {cd.margin:.3g})")
    if uprime is None:
        uprime = remez_derivative_at_one(mu, rho)
    ent = relative_entropy(mu, rho) if math.isinf(N) else n_entropy(mu, rho, N)
    return VerificationReport.compare("entropy_bound", {"measure": mu.name, "rho": rho.name, "N": N},
                                      ent, uprime, tol, "<=")
