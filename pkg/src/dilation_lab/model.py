"""Model functions of the comparison geometry: s_kappa, c_kappa, J_{H,K,N}.

Also the curvature triple (K, N, D) with its case classification, and the
s-concave model density with its exact eps-dilation profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import density as _density
from .errors import DomainError, ExcludedTriple
from .numerics import DEFAULT_TOL, Tolerance, log_integral_exp

__all__ = [
    "s_kappa",
    "c_kappa",
    "CurvatureTriple",
    "SConcaveParam",
    "j_eval",
    "j_log",
    "j_zeros",
    "j_integral",
    "s_model_density",
    "s_model_epsilon_profile",
]

_TAYLOR = 1e-8


def s_kappa(kappa: float, t):
    """sin(sqrt(k) t)/sqrt(k), t, or sinh(sqrt(-k) t)/sqrt(-k) by the sign of k."""
    t = np.asarray(t, dtype=float)
    kt2 = kappa * t * t
    with np.errstate(all="ignore"):
        if kappa > 0:
            r = math.sqrt(kappa)
            exact = np.sin(r * t) / r
        elif kappa < 0:
            r = math.sqrt(-kappa)
            exact = np.sinh(r * t) / r
        else:
            exact = t.copy()
        series = t * (1.0 - kt2 / 6.0 + kt2 * kt2 / 120.0)
    out = np.where(np.abs(kt2) < _TAYLOR, series, exact)
    return out if out.ndim else float(out)


def c_kappa(kappa: float, t):
    """cos(sqrt(k) t), 1, or cosh(sqrt(-k) t) by the sign of k."""
    t = np.asarray(t, dtype=float)
    kt2 = kappa * t * t
    with np.errstate(all="ignore"):
        if kappa > 0:
            exact = np.cos(math.sqrt(kappa) * t)
        elif kappa < 0:
            exact = np.cosh(math.sqrt(-kappa) * t)
        else:
            exact = np.ones_like(t)
        series = 1.0 - kt2 / 2.0 + kt2 * kt2 / 24.0
    out = np.where(np.abs(kt2) < _TAYLOR, series, exact)
    return out if out.ndim else float(out)


def _is_inf(N: float) -> bool:
    return math.isinf(N) and N > 0


@dataclass(frozen=True)
class CurvatureTriple:
    """Curvature bound K, dimension parameter N and diameter bound D."""

    K: float
    N: float
    D: float = math.inf

    def __post_init__(self) -> None:
        K, N, D = float(self.K), float(self.N), float(self.D)
        if math.isnan(K) or math.isinf(K):
            raise DomainError("K must be a finite real number")
        if math.isnan(N) or N == -math.inf:
            raise DomainError("N must lie in (-inf, 0] or [1, inf]")
        if not D > 0:
            raise DomainError("D must be positive")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "D", D)

    @property
    def delta(self) -> float | None:
        if self.N == 1.0 or _is_inf(self.N):
            return None
        return self.K / (self.N - 1.0)

    def scaled(self, lam: float) -> "CurvatureTriple":
        """(K/lam^2, N, lam D): the triple seen after stretching lengths by lam."""
        return CurvatureTriple(self.K / lam**2, self.N, self.D * lam)

    def classify(self) -> tuple[int | None, str]:
        """Case number 1-9 with a short label, or (None, exclusion reason)."""
        K, N, D = self.K, self.N, self.D
        finite_D = math.isfinite(D)
        if 0.0 < N < 1.0:
            return None, "N in (0,1): profile not continuous in N there"
        if N == 1.0:
            return None, "N = 1: J is infinite unless K = 0 and no case formula applies"
        if _is_inf(N):
            if K > 0 and not finite_D:
                return 1, "N=inf, K>0, D=inf (Gaussian)"
            if K != 0 and finite_D:
                return 2, "N=inf, K!=0, D<inf"
            if K == 0:
                return 3, "N=inf, K=0 (exponential)"
            return None, "N=inf, K<0, D=inf: J-integrals diverge for every H"
        if N > 1:
            if K > 0:
                return 4, "N in (1,inf), K>0 (sin)"
            if K == 0:
                return 5, "N in (1,inf), K=0 (power)"
            if finite_D:
                return 6, "N in (1,inf), K<0, D<inf (sinh/cosh)"
            return None, "N in (1,inf), K<0, D=inf: profile not continuous"
        # N <= 0
        if K > 0:
            return 7, "N<=0, K>0 (sinh/cosh)"
        if K == 0:
            if N == 0:
                return None, "N=0, K=0: profile vanishes identically"
            return 8, "N<0, K=0 (power)"
        if D < math.pi / math.sqrt(self.delta):
            return 9, "N<=0, K<0, D<pi/sqrt(delta) (sin)"
        return None, "N<=0, K<0, D>=pi/sqrt(delta): no admissible interval"

    @property
    def case(self) -> int | None:
        return self.classify()[0]

    @property
    def excluded_reason(self) -> str | None:
        c, why = self.classify()
        return None if c is not None else why

    def require_case(self) -> int:
        c, why = self.classify()
        if c is None:
            raise ExcludedTriple(f"{self}: {why}")
        return c

    def __str__(self) -> str:
        return f"(K={self.K:g}, N={self.N:g}, D={self.D:g})"


@dataclass(frozen=True)
class SConcaveParam:
    s: float

    def __post_init__(self) -> None:
        if not self.s <= 1:
            raise DomainError("s must be <= 1")

    @property
    def log_concave(self) -> bool:
        return self.s == 0.0

    @property
    def N(self) -> float:
        return math.inf if self.s == 0 else 1.0 / self.s


def j_zeros(H: float, K: float, N: float) -> tuple[float, float]:
    """First zeros (t_minus < 0 < t_plus) of c_delta(t) + H/(N-1) s_delta(t).

    Infinite entries mean the base stays positive in that direction.
    """
    d = K / (N - 1.0)
    h = H / (N - 1.0)
    if d > 0:
        w = math.sqrt(d)
        beta = math.atan2(w, h)  # cot(beta) = h/w, beta in (0, pi)
        return -beta / w, (math.pi - beta) / w
    if d == 0:
        if h > 0:
            return -1.0 / h, math.inf
        if h < 0:
            return -math.inf, -1.0 / h
        return -math.inf, math.inf
    w = math.sqrt(-d)
    c = h / w
    # base = cosh(wt) + c sinh(wt); zero when tanh(wt) = -1/c
    if c > 1:
        return -math.atanh(1.0 / c) / w, math.inf
    if c < -1:
        return -math.inf, math.atanh(-1.0 / c) / w
    return -math.inf, math.inf


def _finite_base(H: float, K: float, N: float, t):
    d = K / (N - 1.0)
    h = H / (N - 1.0)
    if h == 0.0:
        return np.asarray(c_kappa(d, t), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        return c_kappa(d, t) + h * np.asarray(s_kappa(d, t))


def j_log(H: float, K: float, N: float, t):
    """log J_{H,K,N}(t), with -inf where J = 0 and +inf where J = inf."""
    t = np.asarray(t, dtype=float)
    if _is_inf(N):
        out = H * t - 0.5 * K * t * t
    elif N == 1.0:
        out = np.zeros_like(t) if K == 0 else np.full_like(t, math.inf)
    else:
        tm, tp = j_zeros(H, K, N)
        base = np.asarray(_finite_base(H, K, N, t), dtype=float)
        ins = (t > tm) & (t < tp)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (N - 1.0) * np.log(np.where(ins, base, 1.0))
        outside = -math.inf if N > 1 else math.inf
        out = np.where(ins, val, outside)
    return out if out.ndim else float(out)


def j_eval(H: float, triple, t):
    """J_{H,K,N}(t).

    ``triple`` is a CurvatureTriple or a (K, N) pair. Past the first zero of
    the base the value is 0 for N > 1 and +inf for N < 1, so J stays supported
    on the arc where the comparison model is defined.
    """
    K, N = (triple.K, triple.N) if isinstance(triple, CurvatureTriple) else map(float, triple)
    with np.errstate(over="ignore"):
        out = np.exp(j_log(H, K, N, t))
    return out if np.ndim(out) else float(out)


def _log1mexp(x: float) -> float:
    """log(1 - e^x) for x <= 0."""
    if x == -math.inf:
        return 0.0
    return math.log(-math.expm1(x)) if x > -0.693 else math.log1p(-math.exp(x))


def _quadratic_piece(H: float, K: float, m: float, s1: float, s2: float) -> float:
    """log int_{s1}^{s2} exp(Ht - K t^2/2) dt on a piece where the exponent is monotone.

    m is the critical point H/K and [s1, s2] lies on one side of it. The
    integral is written as a difference of two tail functions anchored at
    the endpoints (erfcx for K > 0, Dawson's function for K < 0), so that
    no term of size H^2/K ever has to cancel.
    """
    phi = lambda t: H * t - 0.5 * K * t * t if math.isfinite(t) else -math.inf
    dphi = (s2 - s1) * (H - 0.5 * K * (s1 + s2)) if math.isfinite(s2 - s1) else math.inf
    c = math.sqrt(abs(K) / 2.0)
    if K > 0:
        # tail(t) = int from t away from the mode = e^{phi(t)} sqrt(pi/2K) erfcx(c|t - m|)
        pref = 0.5 * math.log(math.pi / (2.0 * K))
        if s1 >= m:  # decreasing: int = tail(s1) - tail(s2)
            near, far, sign = s1, s2, 1.0
        else:  # increasing
            near, far, sign = s2, s1, -1.0
        xn = c * abs(near - m)
        xf = c * abs(far - m) if math.isfinite(far) else math.inf
        lead = phi(near) + pref + math.log(special.erfcx(xn))
        if math.isinf(xf):
            return lead
        ratio = math.exp(sign * dphi) * special.erfcx(xf) / special.erfcx(xn)
        if ratio > 0.5:
            return _flat_piece(phi, s1, s2)
        return lead + math.log1p(-ratio)
    # K < 0: grows away from m; int_m^t e^{phi} = e^{phi(t)} sqrt(2/|K|) D(c|t - m|)
    pref = 0.5 * math.log(2.0 / abs(K))
    if s1 >= m:  # increasing: F(s2) - F(s1)
        near, far, sign = s2, s1, 1.0
    else:
        near, far, sign = s1, s2, -1.0
    yn, yf = c * abs(near - m), c * abs(far - m)
    if yn == 0.0:
        return -math.inf
    lead = phi(near) + pref + math.log(special.dawsn(yn))
    ratio = math.exp(-sign * dphi) * special.dawsn(yf) / special.dawsn(yn)
    if ratio > 0.5:
        return _flat_piece(phi, s1, s2)
    return lead + math.log1p(-ratio)


def _flat_piece(phi, s1: float, s2: float) -> float:
    # the integrand changes by a bounded factor here, so plain quadrature is accurate
    return log_integral_exp(lambda t: np.asarray([phi(v) for v in np.ravel(t)]).reshape(np.shape(t)),
                            s1, s2)


def _gauss_log_integral(H: float, K: float, lo: float, hi: float) -> float:
    """log of int_lo^hi exp(Ht - K t^2/2) dt for K != 0 (finite ends when K < 0)."""
    m = H / K
    pieces = []
    if lo < m:
        pieces.append((lo, min(hi, m)))
    if hi > m:
        pieces.append((max(lo, m), hi))
    logs = [_quadratic_piece(H, K, m, a, b) for a, b in pieces if a < b]
    return float(np.logaddexp.reduce(logs)) if logs else -math.inf


def j_log_integral(H: float, K: float, N: float, lo: float, hi: float,
                   tol: Tolerance = DEFAULT_TOL) -> float:
    """log of the integral of J_{H,K,N} over [lo, hi]; may be +-inf."""
    if lo >= hi:
        return -math.inf
    if N == 1.0:
        if K != 0:
            return math.inf
        return math.log(hi - lo) if math.isfinite(hi - lo) else math.inf
    if _is_inf(N):
        if K > 0:
            return _gauss_log_integral(H, K, lo, hi)
        if K == 0:
            if (math.isinf(hi) and H >= 0) or (math.isinf(lo) and H <= 0):
                return math.inf
            if H == 0:
                return math.log(hi - lo)
            # (e^{H hi} - e^{H lo})/H computed in log space
            if H > 0:
                return H * hi + math.log(-math.expm1(H * (lo - hi))) - math.log(H)
            return H * lo + math.log(-math.expm1(H * (hi - lo))) - math.log(-H)
        if math.isinf(lo) or math.isinf(hi):
            return math.inf
        return _gauss_log_integral(H, K, lo, hi)

    tm, tp = j_zeros(H, K, N)
    if N > 1:
        lo, hi = max(lo, tm), min(hi, tp)
        if lo >= hi:
            return -math.inf
    elif (math.isfinite(tm) and lo <= tm) or (math.isfinite(tp) and hi >= tp):
        # J blows up like |t - t0|^(N-1) with N - 1 <= -1 at a zero of the base
        return math.inf
    if math.isinf(hi) and _tail_diverges(H, K, N, +1):
        return math.inf
    if math.isinf(lo) and _tail_diverges(H, K, N, -1):
        return math.inf
    return _numeric_log_integral(lambda t: j_log(H, K, N, t), lo, hi, tol)


def _tail_diverges(H: float, K: float, N: float, direction: int) -> bool:
    """Whether J has a non-integrable tail in the given direction (no zero there)."""
    d = K / (N - 1.0)
    h = direction * H / (N - 1.0)  # reflect t -> -t
    if d > 0:
        return False  # a zero always exists for d > 0
    if d == 0:
        # base = 1 + h t; no zero forward means h >= 0
        if h == 0:
            return True
        return not N < 0  # t^{N-1} integrable iff N < 0
    w = math.sqrt(-d)
    c = h / w
    if c == -1:
        return N < 1  # J = exp(-(N-1) w t)
    # base grows like e^{wt}: J ~ e^{(N-1) w t}
    return N > 1


def _numeric_log_integral(logf, lo: float, hi: float, tol: Tolerance) -> float:
    """log int exp(logf) over [lo, hi]; graded Gauss-Legendre in log space."""
    if math.isfinite(lo) and math.isfinite(hi):
        return log_integral_exp(logf, lo, hi)
    anchor = lo if math.isfinite(lo) else hi
    scale = max(1.0, abs(anchor)) if math.isfinite(anchor) else 1.0
    return log_integral_exp(logf, lo, hi, scale=scale)


def j_integral(H: float, triple, lo: float, hi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Integral of J_{H,K,N} over [lo, hi] (may be inf)."""
    K, N = (triple.K, triple.N) if isinstance(triple, CurvatureTriple) else map(float, triple)
    with np.errstate(over="ignore"):
        return float(np.exp(j_log_integral(H, K, N, lo, hi, tol)))


def s_model_density(s) -> "_density.Density1D":
    """Normalized model density (1 - s x)_+^{(1-s)/s}; e^{-x} for s = 0."""
    p = s if isinstance(s, SConcaveParam) else SConcaveParam(float(s))
    return _density.s_concave(p.s)


def s_model_epsilon_profile(s, eps: float, theta: float) -> float:
    """Smallest measure of A_eps over sets of measure theta, for the model density.

    1 - (((1-theta)^s - eps)/(1-eps))_+^{1/s}; for s = 0 this is
    1 - (1-theta)^{1/(1-eps)}. When the bracket vanishes for s > 0 the dilated
    set fills the whole support, so the value is 1.
    """
    sv = s.s if isinstance(s, SConcaveParam) else float(s)
    if sv > 1:
        raise DomainError("s must be <= 1")
    if not 0.0 <= eps < 1.0 or not 0.0 <= theta <= 1.0:
        raise DomainError("need 0 <= eps < 1 and 0 <= theta <= 1")
    if theta == 0.0:
        return 0.0
    if theta == 1.0:
        return 1.0
    if abs(sv) < 1e-12:  # the s -> 0 limit; the error is O(s)
        return float(-math.expm1(math.log1p(-theta) / (1.0 - eps)))
    # base - 1 = expm1(s log(1-theta)) / (1-eps); kept in that form for small s
    shift = math.expm1(sv * math.log1p(-theta)) / (1.0 - eps)
    if shift <= -1.0:
        return 1.0
    return float(-math.expm1(math.log1p(shift) / sv))
