"""Measures, eps-dilations and dilation areas of interval unions on the line.

The eps-dilation of a set A collects every point x that is an endpoint of an
interval I with |I n A| > (1 - eps)|I|. Dilations are always taken in the
ambient line; the support of a measure only enters when measuring.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .density import Density1D
from .errors import DomainError, Infeasible, NonConvergence
from .intervals import IntervalUnion
from .model import j_log
from .numerics import Bracket, find_root
from .report import VerificationReport

__all__ = [
    "DilationResult",
    "measure",
    "epsilon_dilate",
    "epsilon_dilate_grid",
    "dilation_area",
    "dilation_area_fd",
    "check_sinh_conditions",
    "check_kn_convexity",
    "split_point",
    "borell_lemma_check",
    "BruteForceResult",
    "brute_force_search",
    "brute_force_profile",
    "circle_ball_dilation",
    "circle_dilation_sampled",
]


@dataclass(frozen=True)
class DilationResult:
    dilated: IntervalUnion
    eps: float
    exact: bool = True


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    return eps


def measure(mu: Density1D, A: IntervalUnion) -> float:
    """mu(A), intersecting A with the support first."""
    if not A:
        return 0.0
    comps = np.array(A.components, dtype=float)
    lo = np.clip(comps[:, 0], mu.lo, mu.hi)
    hi = np.clip(comps[:, 1], mu.lo, mu.hi)
    return float(min(1.0, mu.mass(lo, hi).sum()))


def epsilon_dilate(A: IntervalUnion, eps: float) -> DilationResult:
    """Exact eps-dilation of a finite union of closed intervals.

    For an interval I = [y, x] ending at x, the gain g(x) = |[y,x] n A| -
    (1-eps)(x-y) is piecewise linear in x and the best starting point y is
    always a left endpoint of a component (mirror image for intervals
    starting at x). So each pair (component where I starts, gap where x
    sits) contributes one explicit sub-interval of the gap.
    """
    eps = _check_eps(eps)
    comps = [(l, r) for l, r in A.components]
    if eps == 0.0 or not comps:
        return DilationResult(A, eps, True)
    if any(math.isinf(l) or math.isinf(r) for l, r in comps):
        # an unbounded component attracts every point of the line
        return DilationResult(IntervalUnion(((-math.inf, math.inf),)), eps, True)
    k = len(comps)
    ls = np.array([c[0] for c in comps])
    rs = np.array([c[1] for c in comps])
    lens = rs - ls
    cum = np.concatenate([[0.0], np.cumsum(lens)])  # cum[j] = mass of comps before j
    q = 1.0 - eps
    pieces = list(comps)
    for i in range(k):
        for j in range(i, k):
            # intervals spanning components i..j: leaving to the right of r_j
            # or to the left of l_i gains the same amount
            gain = (cum[j + 1] - cum[i]) - q * (rs[j] - ls[i])
            if gain <= 0:
                continue
            stop = rs[j] + gain / q
            if j + 1 < k:
                stop = min(stop, ls[j + 1])
            pieces.append((rs[j], stop))
            start = ls[i] - gain / q
            if i > 0:
                start = max(start, rs[i - 1])
            pieces.append((start, ls[i]))
    return DilationResult(IntervalUnion.from_pairs(pieces), eps, True)


def _lebesgue_cdf(A: IntervalUnion, y: np.ndarray) -> np.ndarray:
    """|A n (-inf, y]| for an array y (finite components only)."""
    out = np.zeros_like(y, dtype=float)
    for l, r in A.components:
        out += np.clip(y - l, 0.0, r - l)
    return out


def epsilon_dilate_grid(A: IntervalUnion, eps: float, x: np.ndarray, *, step: float = 1e-5,
                        reach: float | None = None) -> np.ndarray:
    """Membership of points x in A_eps by brute force over a uniform y-grid.

    For every x the ratio |[y,x] n A| / |x - y| (and its mirror) is maximized
    over y on a grid of spacing ``step`` covering ``reach`` on both sides.
    Independent of the exact algorithm; used as an oracle.
    """
    eps = _check_eps(eps)
    x = np.asarray(x, dtype=float)
    if not A:
        return np.zeros(x.shape, dtype=bool)
    lo = A.components[0][0]
    hi = A.components[-1][1]
    if reach is None:
        reach = (hi - lo) / (1.0 - eps) + 1.0
    y = np.arange(lo - reach, hi + reach + step, step)
    My = _lebesgue_cdf(A, y)
    inside = A.contains(x)
    out = inside.copy()
    thr = 1.0 - eps
    for idx in np.flatnonzero(~inside):
        xv = x[idx]
        mx = _lebesgue_cdf(A, np.array([xv]))[0]
        d = xv - y
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(mx - My) / np.abs(d)
        ratio[np.abs(d) < 0.5 * step] = 0.0
        out[idx] = bool(np.any(ratio > thr))
    return out


def dilation_area(mu: Density1D, A: IntervalUnion) -> float:
    """Sum over components of (rho(l-) + rho(r+)) (r - l).

    One-sided densities vanish at or beyond the support ends, so a component
    touching the boundary only contributes its interior endpoint.
    """
    total = 0.0
    for l, r in A.components:
        if r <= l:
            continue
        dl, dr = mu.density_left(l), mu.density_right(r)
        if math.isinf(r - l):
            if dl > 0 or dr > 0:
                return math.inf
            continue
        total += (dl + dr) * (r - l)
    return total


def dilation_area_fd(mu: Density1D, A: IntervalUnion,
                     steps=(1e-3, 1e-4, 1e-5), rtol: float = 1e-3) -> float:
    """Finite-difference dilation area with Richardson extrapolation.

    Uses (mu(A_eps) - mu(A))/eps at the given descending steps; consecutive
    extrapolated estimates must agree within ``rtol``.
    """
    if not A:
        return 0.0
    steps = [float(s) for s in steps]
    if any(b >= a for a, b in zip(steps, steps[1:])) or steps[-1] <= 0:
        raise DomainError("steps must be positive and strictly descending")
    base = measure(mu, A)
    q = [(measure(mu, epsilon_dilate(A, e).dilated) - base) / e for e in steps]
    if len(q) == 1:
        return q[0]
    est = []
    for (e0, q0), (e1, q1) in zip(zip(steps, q), zip(steps[1:], q[1:])):
        r = e0 / e1
        est.append((r * q1 - q0) / (r - 1.0))
    if len(est) >= 2:
        a, b = est[-2], est[-1]
        if abs(a - b) > rtol * max(abs(b), 1e-12):
            raise NonConvergence(f"finite-difference dilation area unstable: {a} vs {b}")
    return max(est[-1], 0.0)


def _interior_grid(mu: Density1D, n: int) -> np.ndarray:
    p = np.linspace(0.002, 0.998, n)
    x = mu.ppf(p)
    return np.unique(x[np.isfinite(x) & (x > mu.lo) & (x < mu.hi)])


def check_sinh_conditions(mu: Density1D, n: int = 60, slack: float = 1e-10) -> VerificationReport:
    """Sample the two sinh inequalities guaranteeing symmetric-interval minimizers.

    For x < y: psi(x) <= psi(y) requires sinh(psi(y)-psi(x))/(y-x) >=
    (psi'(y)+psi'(x))/2, and psi(x) >= psi(y) requires the reverse.
    """
    x = _interior_grid(mu, n)
    px, dpx = np.asarray(mu.psi(x), dtype=float), np.asarray(mu.dpsi(x), dtype=float)
    i, j = np.triu_indices(len(x), k=1)
    dpsi = px[j] - px[i]
    with np.errstate(over="ignore"):
        lhs = np.sinh(dpsi) / (x[j] - x[i])
    rhs = 0.5 * (dpx[j] + dpx[i])
    up = dpsi >= 0
    gap = np.where(up, lhs - rhs, rhs - lhs)
    both = dpsi == 0
    gap = np.where(both, -np.abs(lhs - rhs), gap)
    scale = 1.0 + np.abs(rhs)
    rel = gap / scale
    worst = int(np.argmin(rel))
    return VerificationReport.compare(
        "sinh_conditions", {"measure": mu.name, "n": int(len(x))},
        0.0, float(rel[worst]), slack, "<=",
        worst_pair=[float(x[i[worst]]), float(x[j[worst]])],
    )


def check_kn_convexity(mu: Density1D, K: float, N: float, n: int = 50,
                       slack: float = 1e-10) -> VerificationReport:
    """Sample the comparison inequality e^{-psi(x+t)} <= e^{-psi(x)} J_{-psi'(x),K,N}(t).

    Checked in log form on pairs of interior quantile points; the margin is
    the smallest value of log J + psi(x+t) - psi(x), slack scaled by 1+|psi|.
    """
    if 0.0 < N <= 1.0:
        raise DomainError("check_kn_convexity needs N outside (0, 1]")
    x = _interior_grid(mu, n)
    px = np.asarray(mu.psi(x), dtype=float)
    dpx = np.asarray(mu.dpsi(x), dtype=float)
    worst_val, worst_pair = math.inf, None
    for a in range(len(x)):
        t = x - x[a]
        mask = t != 0
        lj = np.asarray(j_log(-dpx[a], K, N, t[mask]), dtype=float)
        val = lj + px[mask] - px[a]
        tolerance = slack * (1.0 + np.abs(px[mask]) + abs(px[a]))
        rel = val + tolerance
        b = int(np.argmin(rel))
        if rel[b] < worst_val:
            worst_val = float(rel[b])
            worst_pair = (float(x[a]), float(x[mask][b]))
    ok = worst_val >= 0
    rep = VerificationReport("kn_convexity", {"measure": mu.name, "K": K, "N": N},
                             0.0, worst_val, slack, ok, worst_val, {"worst_pair": worst_pair})
    return rep


def split_point(mu: Density1D, A: IntervalUnion, theta: float | None = None,
                tol: float = 1e-8) -> float:
    """Point xi in A splitting it so both conditional measures of A equal mu(A).

    Solves G(xi) = mu([a, xi]) / mu((-inf, xi]) = theta. When A touches a
    support end the complement has one piece and that end is returned.
    """
    if len(A) != 1:
        raise DomainError("split_point needs a single interval")
    (a, b), = A.components
    a, b = max(a, mu.lo), min(b, mu.hi)
    th = measure(mu, A) if theta is None else float(theta)
    if a <= mu.lo:
        return mu.lo
    if b >= mu.hi:
        return mu.hi
    if not 0.0 < th < 1.0:
        raise DomainError("theta must lie in (0, 1)")

    def G(xi: float) -> float:
        return float(mu.mass(a, xi)) / float(mu.cdf(xi)) - th

    xi = find_root(G, Bracket(a, b))
    left = float(mu.mass(a, xi)) / float(mu.cdf(xi))
    right = float(mu.mass(xi, b)) / float(mu.sf(xi))
    if abs(left - th) > tol or abs(right - th) > tol:
        raise NonConvergence(f"split point conditional masses {left}, {right} differ from {th}")
    return xi


def borell_lemma_check(mu: Density1D, k: float, t: float, tol: float = 1e-12) -> VerificationReport:
    """1 - mu(tK) <= ((1 - mu(K))/mu(K))^{(t+1)/2} mu(K) for K = [-k, k]."""
    if t < 1 or k <= 0:
        raise DomainError("need k > 0 and t >= 1")
    mk = measure(mu, IntervalUnion.interval(-k, k))
    if mk <= 0:
        raise DomainError("mu(K) must be positive")
    mtk = measure(mu, IntervalUnion.interval(-t * k, t * k))
    lhs = 1.0 - mtk
    rhs = ((1.0 - mk) / mk) ** ((t + 1.0) / 2.0) * mk
    return VerificationReport.compare("borell_lemma", {"measure": mu.name, "k": k, "t": t},
                                      lhs, rhs, tol, "<=")


# ---------------------------------------------------------------------------
# brute-force profile oracle


@dataclass(frozen=True)
class BruteForceResult:
    value: float
    components: tuple[tuple[float, float], ...]
    mode: str


def _one_sided(mu: Density1D, x: np.ndarray, side: str) -> np.ndarray:
    dens = mu.pdf(np.where(np.isfinite(x), x, 0.0))
    dens = np.where(np.isfinite(x), dens, 0.0)
    if side == "left":
        return np.where(x <= mu.lo, 0.0, dens)
    return np.where(x >= mu.hi, 0.0, dens)


def _areas(mu: Density1D, l: np.ndarray, r: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        a = (_one_sided(mu, l, "left") + _one_sided(mu, r, "right")) * (r - l)
    a = np.where(r > l, a, 0.0)
    return np.where(np.isnan(a), np.inf, a)


def _dilated_mass_1(mu: Density1D, l, r, eps: float):
    ext = eps * (r - l) / (1.0 - eps)
    return mu.mass(np.clip(l - ext, mu.lo, mu.hi), np.clip(r + ext, mu.lo, mu.hi))


def _dilated_mass_2(mu: Density1D, l1, r1, l2, r2, eps: float):
    q = 1.0 - eps
    unbounded = ~(np.isfinite(l1) & np.isfinite(r2))
    l1 = np.where(unbounded, 0.0, l1)
    r1 = np.where(unbounded, 0.0, r1)
    l2 = np.where(unbounded, 1.0, l2)
    r2 = np.where(unbounded, 1.0, r2)
    L1, L2 = r1 - l1, r2 - l2
    G = L1 + L2 - q * (r2 - l1)
    lam1 = l1 - np.maximum(eps * L1, G) / q
    rho1 = r1 + eps * L1 / q
    lam2 = l2 - eps * L2 / q
    rho2 = r2 + np.maximum(eps * L2, G) / q
    c = lambda v: np.clip(v, mu.lo, mu.hi)  # noqa: E731
    joined = rho1 >= lam2
    whole = mu.mass(c(lam1), c(rho2))
    split = mu.mass(c(lam1), c(rho1)) + mu.mass(c(lam2), c(rho2))
    # an unbounded component dilates to the whole line
    return np.where(unbounded, 1.0, np.where(joined, whole, split))


def brute_force_search(mu: Density1D, theta: float, mode="area", k_max: int = 1,
                       resolution: int = 1000) -> BruteForceResult:
    """Minimize the dilation functional over unions of up to k_max intervals of mass theta.

    Endpoints sit on the quantile grid F^{-1}(i/resolution); the last
    component of each candidate is extended to exact mass theta. ``mode`` is
    "area" (dilation area) or a number eps (measure of the eps-dilation).
    """
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise DomainError("theta must lie in [0, 1]")
    if k_max not in (1, 2, 3):
        raise DomainError("k_max must be 1, 2 or 3")
    if resolution < 100:
        raise DomainError("resolution must be at least 100")
    area = isinstance(mode, str)
    if area and mode != "area":
        raise DomainError(f"unknown mode {mode!r}")
    eps = None if area else _check_eps(mode)
    label = "area" if area else f"eps={eps:g}"
    if theta == 0.0:
        return BruteForceResult(0.0, (), label)
    if theta == 1.0:
        val = dilation_area(mu, IntervalUnion.interval(mu.lo, mu.hi)) if area else 1.0
        return BruteForceResult(val, ((mu.lo, mu.hi),), label)

    res = int(resolution)
    u = np.arange(res + 1) / res
    q = mu.ppf(u)
    best = (math.inf, ())

    def consider(val, comps):
        nonlocal best
        if val < best[0]:
            best = (float(val), tuple((float(a), float(b)) for a, b in comps))

    # one interval: [q_i, F^{-1}(u_i + theta)]
    idx = np.flatnonzero(u + theta <= 1.0 + 1e-15)
    r1 = mu.ppf(np.minimum(u[idx] + theta, 1.0))
    l1 = q[idx]
    vals = _areas(mu, l1, r1) if area else _dilated_mass_1(mu, l1, r1, eps)
    m = int(np.argmin(vals))
    consider(vals[m], [(l1[m], r1[m])])

    J = int(math.ceil(theta * res - 1e-9))  # grid masses j/res < theta
    if k_max >= 2:
        for j1 in range(1, J):
            m2 = theta - j1 / res
            if area:
                # first component on the grid, second carries the residual mass (both orders)
                for order in (0, 1):
                    if order == 0:
                        a_first = _areas(mu, q[: res + 1 - j1], q[j1:])
                        i2 = np.flatnonzero(u + m2 <= 1.0 + 1e-15)
                        r2 = mu.ppf(np.minimum(u[i2] + m2, 1.0))
                        a_second = _areas(mu, q[i2], r2)
                        pm = np.minimum.accumulate(a_first)
                        pos = i2 - j1 - 1  # last admissible start of the first component
                        ok = pos >= 0
                        if not np.any(ok):
                            continue
                        tot = np.where(ok, pm[np.clip(pos, 0, len(pm) - 1)] + a_second, np.inf)
                        b = int(np.argmin(tot))
                        if math.isfinite(tot[b]):
                            i1 = int(np.argmin(a_first[: pos[b] + 1]))
                            consider(tot[b], [(q[i1], q[i1 + j1]), (q[i2[b]], r2[b])])
                    else:
                        i1 = np.flatnonzero(u + m2 <= 1.0 + 1e-15)
                        r1b = mu.ppf(np.minimum(u[i1] + m2, 1.0))
                        a_first = _areas(mu, q[i1], r1b)
                        a_second = _areas(mu, q[: res + 1 - j1], q[j1:])
                        # suffix minimum of the second component over starts > end of first
                        sm = np.minimum.accumulate(a_second[::-1])[::-1]
                        # first ends at F^{-1}(u_i + m2): next grid start strictly above it
                        nxt = np.floor((u[i1] + m2) * res + 1e-9).astype(int) + 1
                        ok = nxt <= len(sm) - 1
                        if not np.any(ok):
                            continue
                        tot = np.where(ok, a_first + sm[np.clip(nxt, 0, len(sm) - 1)], np.inf)
                        b = int(np.argmin(tot))
                        if math.isfinite(tot[b]):
                            s0 = int(nxt[b]) + int(np.argmin(a_second[nxt[b]:]))
                            consider(tot[b], [(q[i1[b]], r1b[b]), (q[s0], q[s0 + j1])])
            else:
                i2 = np.flatnonzero(u + m2 <= 1.0 + 1e-15)
                r2 = mu.ppf(np.minimum(u[i2] + m2, 1.0))
                for i1 in range(0, res + 1 - j1):
                    sel = i2 > i1 + j1
                    if not np.any(sel):
                        break
                    L1 = np.full(sel.sum(), q[i1])
                    R1 = np.full(sel.sum(), q[i1 + j1])
                    vals = _dilated_mass_2(mu, L1, R1, q[i2[sel]], r2[sel], eps)
                    b = int(np.argmin(vals))
                    consider(vals[b], [(q[i1], q[i1 + j1]), (q[i2[sel][b]], r2[sel][b])])
    if k_max >= 3:
        if area:
            grid_area = {j: _areas(mu, q[: res + 1 - j], q[j:]) for j in range(1, J)}
            for j1 in range(1, J):
                p1 = np.minimum.accumulate(grid_area[j1])
                for j2 in range(1, J - j1):
                    m3 = theta - (j1 + j2) / res
                    a2 = grid_area[j2]
                    s2 = np.arange(len(a2)) - j1 - 1
                    c2 = np.where(s2 >= 0, a2 + p1[np.clip(s2, 0, len(p1) - 1)], np.inf)
                    p2 = np.minimum.accumulate(c2)
                    i3 = np.flatnonzero(u + m3 <= 1.0 + 1e-15)
                    s3 = i3 - j2 - 1
                    ok = (s3 >= 0) & (s3 < len(p2))
                    if not np.any(ok):
                        continue
                    r3 = mu.ppf(np.minimum(u[i3[ok]] + m3, 1.0))
                    tot = _areas(mu, q[i3[ok]], r3) + p2[s3[ok]]
                    b = int(np.argmin(tot))
                    if tot[b] < best[0]:
                        # recover the first two components
                        e2 = int(s3[ok][b])
                        i2 = int(np.argmin(c2[: e2 + 1]))
                        i1 = int(np.argmin(grid_area[j1][: i2 - j1]))
                        consider(tot[b], [(q[i1], q[i1 + j1]), (q[i2], q[i2 + j2]),
                                          (q[i3[ok][b]], r3[b])])
        else:
            # coarse enumeration: at most 20 grid cells per unit mass
            step = max(1, res // 20)
            cells = list(range(0, res + 1, step))
            for i1, i2 in itertools.combinations(cells, 2):
                for j1 in range(step, J, step):
                    if i1 + j1 >= i2:
                        break
                    for j2 in range(step, J - j1, step):
                        m3 = theta - (j1 + j2) / res
                        if i2 + j2 > res:
                            break
                        for i3 in cells:
                            if i3 <= i2 + j2 or u[i3] + m3 > 1.0:
                                continue
                            r3 = float(mu.ppf(np.array([u[i3] + m3]))[0])
                            comps = [(q[i1], q[i1 + j1]), (q[i2], q[i2 + j2]), (q[i3], r3)]
                            val = measure(mu, epsilon_dilate(IntervalUnion.from_pairs(comps), eps).dilated)
                            consider(val, comps)
    if not math.isfinite(best[0]) and area:
        raise Infeasible("no candidate union of finite dilation area has mass theta")
    return BruteForceResult(best[0], best[1], label)


def brute_force_profile(mu: Density1D, theta: float, mode="area", k_max: int = 1,
                        resolution: int = 1000) -> float:
    """Value of :func:`brute_force_search`."""
    return brute_force_search(mu, theta, mode, k_max, resolution).value


# ---------------------------------------------------------------------------
# unit circle


def circle_ball_dilation(r: float, eps: float) -> float:
    """Radius of the eps-dilation of a ball of radius r on the unit circle."""
    eps = _check_eps(eps)
    if not 0.0 < r < math.pi:
        raise DomainError("radius must lie in (0, pi)")
    if r < 0.5 * math.pi * (1.0 - eps):
        return (1.0 + eps) / (1.0 - eps) * r
    return r + eps * math.pi


def _arc_overlap(s: np.ndarray, L: np.ndarray, r: float) -> np.ndarray:
    """Length of the arc [s, s+L] (angles, L <= pi) inside the ball [-r, r] mod 2 pi."""
    out = np.zeros(np.broadcast(s, L).shape)
    for shift in (-2 * math.pi, 0.0, 2 * math.pi):
        a = np.maximum(s, -r + shift)
        b = np.minimum(s + L, r + shift)
        out += np.clip(b - a, 0.0, None)
    return out


def circle_dilation_sampled(r: float, eps: float, n_lengths: int = 20001,
                            tol: float = 1e-7) -> float:
    """Dilated radius found by sampling geodesics of length <= pi.

    A point at angle phi belongs to the dilation when some arc of length
    L <= pi ending at phi (either direction) spends more than (1-eps) L in
    the ball. The largest such phi is located by bisection.
    """
    eps = _check_eps(eps)
    Ls = np.linspace(math.pi / n_lengths, math.pi, n_lengths)

    def member(phi: float) -> bool:
        if abs(phi) <= r:
            return True
        back = _arc_overlap(phi - Ls, Ls, r)
        fwd = _arc_overlap(np.full_like(Ls, phi), Ls, r)
        return bool(np.any(np.maximum(back, fwd) > (1.0 - eps) * Ls))

    if member(math.pi):
        return math.pi
    lo, hi = r, math.pi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
