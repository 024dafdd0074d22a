"""Bounds on the measure of eps-dilations derived from a CDD profile.

From the profile D one forms Dt = (D' - 1)/D, I = exp(int_0 Dt) and
F^{-1} = int_0 1/I. The resulting bound is

    mu(A_eps) >= F(F^{-1}(mu(A)) / (1 - eps))

for admissible mu(A). For K = 0 everything has closed forms, which the
numeric pipeline is tested against.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AssumptionAViolated, DomainError, OutOfDomain, SingularProfile
from .model import CurvatureTriple
from .numerics import Tolerance, find_root, gauss_legendre
from .profiles import cdd_profile_case, closed_form_profile
from .report import VerificationReport

__all__ = [
    "ProfileSampler",
    "profile_sampler",
    "EpsBoundPipeline",
    "build_pipeline",
    "dtilde",
    "epsilon_bound",
    "closed_form_bound",
    "check_assumption_A",
    "check_derivative_at_zero",
]

_ROOT_TOL = Tolerance(rel=1e-15, abs=1e-15, max_iter=400)


# --------------------------------------------------------------------------
# profile samplers


@dataclass(frozen=True)
class ProfileSampler:
    """Profile values (and, when known, exact derivatives) on (0, 1)."""

    triple: CurvatureTriple
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def closed_form(self) -> bool:
        return self.derivative is not None

    def slope(self, s) -> np.ndarray:
        """D'(s): exact if available, else a central difference with step min(1e-5, s/2, (1-s)/2)."""
        s = np.asarray(s, dtype=float)
        if self.derivative is not None:
            return np.asarray(self.derivative(s), dtype=float)
        h = np.minimum(1e-5, np.minimum(s / 2.0, (1.0 - s) / 2.0))
        both = np.asarray(self.value(np.concatenate([s + h, s - h])), dtype=float)
        return (both[: s.size] - both[s.size:]) / (2.0 * h)


def _closed_derivative(N: float):
    if math.isinf(N):
        return lambda s: np.log1p(-np.asarray(s)) + 1.0
    return lambda s: -N * (-1.0 + (1.0 - 1.0 / N) * (1.0 - np.asarray(s)) ** (-1.0 / N))


def profile_sampler(triple: CurvatureTriple) -> ProfileSampler:
    """Case-formula profile of the triple; closed forms with exact slope for K = 0."""
    case = triple.require_case()
    if case in (3, 5, 8):
        N = triple.N
        return ProfileSampler(triple, lambda s: closed_form_profile(N, s), _closed_derivative(N))
    return ProfileSampler(triple, lambda s: np.asarray(cdd_profile_case(triple, np.asarray(s)),
                                                       dtype=float))


def _dtilde_raw(sampler: ProfileSampler, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    d = np.asarray(sampler.value(s), dtype=float)
    if np.any(d < 1e-14):
        raise SingularProfile("profile value below 1e-14; (D' - 1)/D is not defined there")
    return (sampler.slope(s) - 1.0) / d


# --------------------------------------------------------------------------
# cumulative quadrature on graded breaks


def _breaks(resolution: int) -> np.ndarray:
    k = np.arange(resolution + 1)
    cheb = 0.5 * (1.0 - np.cos(np.pi * k / resolution))
    geo = 10.0 ** (-np.arange(8, 53) / 4.0)
    pts = np.unique(np.concatenate([cheb, geo, 1.0 - geo]))
    # tables stop at 1 - 1e-13; beyond 1 - _TAIL the tail is handled analytically
    return pts[pts <= 1.0 - 1e-13]


class _Cumulative:
    """x -> int_0^x g on [0, 1), tabulated on breaks with Gauss-Legendre per cell."""

    def __init__(self, g: Callable[[np.ndarray], np.ndarray], breaks: np.ndarray, order: int = 10):
        self.g, self.breaks = g, breaks
        self.t, self.w = gauss_legendre(order)
        lo, hi = breaks[:-1], breaks[1:]
        cells = self._gl(lo, hi)
        self.table = np.concatenate([[0.0], np.cumsum(cells)])

    def _gl(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        half = 0.5 * (hi - lo)
        x = (0.5 * (hi + lo))[:, None] + half[:, None] * self.t[None, :]
        vals = np.asarray(self.g(x.ravel()), dtype=float).reshape(x.shape)
        return half * (vals * self.w[None, :]).sum(axis=1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        j = np.clip(np.searchsorted(self.breaks, flat, side="right") - 1, 0, len(self.breaks) - 2)
        out = self.table[j] + self._gl(self.breaks[j], flat)
        return out if x.ndim else float(out[0])


# --------------------------------------------------------------------------
# pipeline


_SMALL = 1e-4  # below this Dt is extrapolated linearly (its limit exists by assumption)
_TAIL = 1e-12  # F^{-1} beyond 1 - _TAIL is completed analytically


@dataclass
class EpsBoundPipeline:
    """Tables of Dt, log I and F^{-1} for one triple, with F by monotone inversion."""

    triple: CurvatureTriple
    sampler: ProfileSampler
    resolution: int
    dtilde: Callable[[np.ndarray], np.ndarray]
    tail_exponent: float
    log_I: _Cumulative = field(repr=False)
    Finv_table: _Cumulative = field(repr=False)
    Finv_infty: float = math.inf

    def I(self, theta):
        return np.exp(self.log_I(theta))

    def Finv(self, theta):
        """F^{-1}(theta) = int_0^theta 1/I; theta = 1 gives F^{-1, inf}."""
        th = np.asarray(theta, dtype=float)
        if np.any((th < 0) | (th > 1)):
            raise DomainError("theta must lie in [0, 1]")
        out = np.where(th >= 1.0, self.Finv_infty, self.Finv_table(np.minimum(th, 1.0 - _TAIL)))
        return out if out.ndim else float(out)

    def F(self, x: float) -> float:
        """Inverse of F^{-1} on [0, F^{-1, inf}]."""
        x = float(x)
        if x < 0:
            raise DomainError("F is defined on [0, F^{-1, inf}]")
        if x == 0:
            return 0.0
        if x >= self.Finv_infty:
            if x > self.Finv_infty:
                raise OutOfDomain(f"{x} exceeds F^(-1, inf) = {self.Finv_infty}")
            return 1.0
        top = 1.0 - _TAIL
        if self.Finv_table(top) <= x:
            return 1.0
        return find_root(lambda t: self.Finv_table(t) - x, (0.0, top), _ROOT_TOL)

    def threshold(self, eps: float) -> float:
        """Largest admissible measure: F((1 - eps) F^{-1, inf})."""
        if not 0.0 <= eps < 1.0:
            raise DomainError("eps must lie in [0, 1)")
        if math.isinf(self.Finv_infty):
            return 1.0
        return self.F((1.0 - eps) * self.Finv_infty)

    def epsilon_bound(self, theta: float, eps: float) -> float:
        """F(F^{-1}(theta)/(1 - eps)), the lower bound for the measure of A_eps."""
        theta, eps = float(theta), float(eps)
        if not 0.0 <= theta <= 1.0:
            raise DomainError("theta must lie in [0, 1]")
        if not 0.0 <= eps < 1.0:
            raise DomainError("eps must lie in [0, 1)")
        if eps == 0.0 or theta == 0.0:
            return theta
        if theta >= self.threshold(eps):
            raise OutOfDomain(f"theta={theta} is not below the admissibility threshold "
                              f"{self.threshold(eps):.9g} for eps={eps}")
        return self.F(self.Finv(theta) / (1.0 - eps))

    def to_csv(self, thetas=None) -> str:
        th = np.linspace(0.0, 0.99, 100) if thetas is None else np.asarray(thetas, dtype=float)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "dtilde", "I", "Finv"])
        inner = np.clip(th, 1e-12, 1.0 - 1e-12)
        for t, dt, i_, fi in zip(th, self.dtilde(inner), self.I(th), self.Finv(th)):
            w.writerow([f"{t:.9g}", f"{dt:.9g}", f"{i_:.9g}", f"{fi:.9g}"])
        return buf.getvalue()


def _smooth_dtilde(sampler: ProfileSampler, resolution: int) -> Callable[[np.ndarray], np.ndarray]:
    """Dt on (0, 1) with a linear continuation below _SMALL.

    Closed-form profiles are evaluated directly. Numeric profiles are sampled
    at Chebyshev points and (1 - s) Dt is interpolated by a cubic spline, since
    Dt itself blows up like 1/(1 - s).
    """
    if sampler.closed_form:
        s0 = np.array([_SMALL, 2.0 * _SMALL])
        d0 = _dtilde_raw(sampler, s0)
        slope0 = (d0[1] - d0[0]) / _SMALL

        def dt(s):
            s = np.asarray(s, dtype=float)
            near = s < _SMALL
            out = np.empty_like(s)
            if np.any(~near):
                out[~near] = _dtilde_raw(sampler, s[~near])
            out[near] = d0[0] + slope0 * (s[near] - _SMALL)
            return out

        return dt
    n = max(33, min(resolution, 257))
    k = np.arange(1, n)
    nodes = 0.5 * (1.0 - np.cos(np.pi * k / n))
    nodes = nodes[(nodes >= 1e-3) & (nodes <= 1.0 - 1e-4)]
    g = (1.0 - nodes) * _dtilde_raw(sampler, nodes)
    spline = CubicSpline(nodes, g, bc_type="natural", extrapolate=True)
    lo, hi = nodes[0], nodes[-1]

    def dt(s):
        s = np.asarray(s, dtype=float)
        return spline(np.clip(s, lo, hi)) / (1.0 - s)

    return dt


def _tail_exponent(dt) -> float:
    """c with Dt(s) ~ -c/(1 - s) as s -> 1, so that 1/I ~ (1 - s)^(-c)."""
    s = 1.0 - np.array([1e-6, 1e-8])
    c = -(1.0 - s) * np.asarray(dt(s), dtype=float)
    return float(c[-1])


def _finv_infinity(finv: _Cumulative, log_I: _Cumulative, c: float) -> float:
    if c < 1.0 - 1e-3:
        # anchor the power-law tail int_top^1 (1-t)^(-c) dt (1-top)^c / I(top) where
        # 1 - t is still resolved to ~1e-8 relative accuracy in double precision
        gap = 1e-8
        top = 1.0 - gap
        return float(finv(top) + gap / ((1.0 - c) * math.exp(log_I(top))))
    if c > 1.0 + 1e-3:
        return math.inf
    # borderline exponent: compare increments of F^{-1}(1 - 10^-k), k = 4, 6, 8
    v = np.asarray([finv(1.0 - 10.0 ** -k) for k in (4, 6, 8)])
    d1, d2 = v[1] - v[0], v[2] - v[1]
    if d2 < 0.5 * d1:
        r = d2 / d1
        return float(v[2] + d2 * r / (1.0 - r))
    return math.inf


def build_pipeline(triple: CurvatureTriple, resolution: int = 2048, *,
                   check: bool = True) -> EpsBoundPipeline:
    """Tabulate Dt, log I and F^{-1} for the triple.

    Raises:
        AssumptionAViolated: when ``check`` is set and the profile fails the
            numerical Assumption (A) test.
    """
    if resolution < 16:
        raise DomainError("resolution must be at least 16")
    if check:
        rep = check_assumption_A(triple)
        if not rep.passed:
            raise AssumptionAViolated(f"{triple}: {rep.details}")
    sampler = profile_sampler(triple)
    dt = _smooth_dtilde(sampler, resolution)
    br = _breaks(resolution)
    log_I = _Cumulative(dt, br)
    finv = _Cumulative(lambda t: np.exp(-log_I(t)), br)
    c = _tail_exponent(dt)
    return EpsBoundPipeline(triple, sampler, resolution, dt, c, log_I, finv,
                            _finv_infinity(finv, log_I, c))


def dtilde(obj, s):
    """(D'(s) - 1)/D(s) for a pipeline or a triple, s in (0, 1)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any((s_arr <= 0) | (s_arr >= 1)):
        raise DomainError("s must lie in (0, 1)")
    sampler = obj.sampler if isinstance(obj, EpsBoundPipeline) else profile_sampler(obj)
    out = _dtilde_raw(sampler, np.atleast_1d(s_arr))
    return out if s_arr.ndim else float(out[0])


def epsilon_bound(pipeline: EpsBoundPipeline, theta: float, eps: float) -> float:
    """F(F^{-1}(theta)/(1 - eps)); raises OutOfDomain above the admissibility threshold."""
    return pipeline.epsilon_bound(theta, eps)


def closed_form_bound(N: float, theta: float, eps: float) -> float:
    """K = 0 bound: 1 - ((1-theta)^{1/N} - eps)^N/(1-eps)^N, or 1 - (1-theta)^{1/(1-eps)}."""
    if math.isinf(N):
        return -math.expm1(math.log1p(-theta) / (1.0 - eps))
    base = ((1.0 - theta) ** (1.0 / N) - eps) / (1.0 - eps)
    if base <= 0.0:
        raise OutOfDomain("theta is not below the admissibility threshold 1 - eps^N")
    return 1.0 - base**N


# --------------------------------------------------------------------------
# checks


def _end_limit(v: np.ndarray) -> float:
    """Aitken-extrapolated limit of |D| along distances 1e-4, 1e-6, 1e-8 from an end."""
    d1, d2 = v[1] - v[0], v[2] - v[1]
    if not (d1 <= 0 and d2 <= 0):
        return float(v.max())
    den = d2 - d1
    lim = v[2] - d2 * d2 / den if den != 0 else v[2]
    return float(min(v[2], max(lim, 0.0)))


def check_assumption_A(triple: CurvatureTriple) -> VerificationReport:
    """Numerical test of continuity on [0, 1], C^1 on (0, 1) and the limit of Dt at 0.

    Continuity is read from the profile at distances 1e-4, 1e-6, 1e-8 from
    each end, extrapolated to the end and compared with the end values (0 by
    convention); C^1 from the agreement of one-sided
    difference quotients on an interior grid; the limit from a Cauchy test on
    Dt(1e-2), Dt(1e-3), Dt(1e-4). Also reports D'(0+), which should be 1.
    """
    sampler = profile_sampler(triple)
    closed = sampler.closed_form
    params = {"K": triple.K, "N": triple.N, "D": triple.D}
    near_ends = np.array([1e-4, 1e-6, 1e-8, 1.0 - 1e-4, 1.0 - 1e-6, 1.0 - 1e-8])
    ends = np.abs(np.asarray(sampler.value(near_ends), dtype=float))
    cont_gap = max(_end_limit(ends[:3]), _end_limit(ends[3:]))
    grid = np.linspace(0.05, 0.95, 19)
    h = 1e-5
    vals = np.asarray(sampler.value(np.concatenate([grid - h, grid, grid + h])), dtype=float)
    left = (vals[19:38] - vals[:19]) / h
    right = (vals[38:] - vals[19:38]) / h
    kink = float(np.max(np.abs(right - left)))
    probe = np.array([1e-2, 1e-3, 1e-4])
    try:
        d = _dtilde_raw(sampler, probe)
        cauchy = abs(d[2] - d[1]) <= 0.2 * abs(d[1] - d[0]) + (1e-8 if closed else 1e-2)
        limit = float(d[2])
    except SingularProfile:
        cauchy, limit, d = False, math.nan, np.full(3, math.nan)
    slope0 = float(sampler.value(np.array([1e-6]))[0] / 1e-6)
    kink_tol = 1e-3 if closed else 5e-2
    ok = cont_gap <= 1e-3 and kink <= kink_tol and bool(cauchy) and math.isfinite(limit)
    return VerificationReport(
        "assumption_A", params, cont_gap, 1e-3, 1e-3, bool(ok), 1e-3 - cont_gap,
        {"continuity_gap": cont_gap, "max_kink": kink, "kink_tol": kink_tol,
         "dtilde_probe": [float(v) for v in d], "dtilde_limit": limit,
         "slope_at_0": slope0, "closed_form": closed,
         "status": "proven" if closed else "empirically verified, not proven"})


def check_derivative_at_zero(pipeline: EpsBoundPipeline, thetas,
                             rel_tol: float = 1e-3) -> VerificationReport:
    """d/d eps of the bound at eps = 0 equals the profile, and the bound increases in eps.

    The derivative uses forward differences with steps 1e-4 and 1e-5 combined
    by Richardson extrapolation.
    """
    reports = []
    th = [float(t) for t in thetas]
    prof = np.asarray(pipeline.sampler.value(np.clip(np.asarray(th), 1e-300, 1.0)), dtype=float)
    for t, target in zip(th, prof):
        if t in (0.0, 1.0):
            target = 0.0
        d1 = (pipeline.epsilon_bound(t, 1e-4) - t) / 1e-4 if 0 < t < 1 else 0.0
        d2 = (pipeline.epsilon_bound(t, 1e-5) - t) / 1e-5 if 0 < t < 1 else 0.0
        deriv = (10.0 * d2 - d1) / 9.0
        reports.append(VerificationReport.compare(
            "eps_derivative", {"theta": t}, deriv, target,
            rel_tol * max(abs(target), 1e-12), "=="))
        if 0 < t < 1:
            eps_grid = [e for e in np.linspace(0.0, 0.9, 10) if t < pipeline.threshold(e)]
            seq = [pipeline.epsilon_bound(t, e) for e in eps_grid]
            inc = all(b > a for a, b in zip(seq, seq[1:])) or len(seq) < 2
            reports.append(VerificationReport("eps_monotone", {"theta": t}, 0.0, 0.0, 0.0,
                                              bool(inc), 0.0, {"values": seq}))
    return VerificationReport.combine("eps_derivative", {"triple": str(pipeline.triple)}, reports)
