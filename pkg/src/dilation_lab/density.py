"""One-dimensional probability measures with smooth log-densities, and presets.

A ``Density1D`` stores the unnormalized log-density psi (density
e^{-psi}), its derivative, the support and the numerically computed
normalization constant. Closed-form cdf/ppf may be attached; otherwise they
come from a tabulated cumulative integral.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError
from .numerics import CumulativeIntegral

__all__ = [
    "Density1D",
    "exponential",
    "gaussian",
    "s_concave",
    "power",
    "sin_power",
    "sinh_power",
    "cosh_power",
    "uniform",
    "linear",
    "two_sided_exponential",
    "compile_expression",
    "from_expression",
    "parse_measure",
]

Array = np.ndarray


@dataclass(frozen=True, eq=False)
class Density1D:
    """Probability measure e^{-psi(x)} dx / normalization on ``support``."""

    psi: Callable[[Array], Array]
    dpsi: Callable[[Array], Array]
    support: tuple[float, float]
    name: str = "custom"
    cdf_closed: Callable[[Array], Array] | None = None
    ppf_closed: Callable[[Array], Array] | None = None
    sf_closed: Callable[[Array], Array] | None = None
    scale: float = 1.0
    normalization: float = field(init=False)
    _table: CumulativeIntegral = field(init=False, repr=False)

    def __post_init__(self) -> None:
        lo, hi = map(float, self.support)
        if not lo < hi:
            raise DomainError(f"empty support [{lo}, {hi}]")
        object.__setattr__(self, "support", (lo, hi))
        center = 0.0 if math.isinf(lo) and math.isinf(hi) else (lo if math.isfinite(lo) else hi)
        table = CumulativeIntegral(
            lambda x: -np.asarray(self.psi(x), dtype=float), lo, hi, scale=self.scale, center=center
        )
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "normalization", math.exp(table.log_total))

    @property
    def lo(self) -> float:
        return self.support[0]

    @property
    def hi(self) -> float:
        return self.support[1]

    def inside(self, x) -> Array:
        x = np.asarray(x, dtype=float)
        return (x >= self.lo) & (x <= self.hi)

    def logpdf(self, x) -> Array:
        x = np.asarray(x, dtype=float)
        ins = self.inside(x)
        xs = np.where(ins, x, 0.5 * (self._table.x_of_u(0.25) + self._table.x_of_u(0.75)))
        with np.errstate(all="ignore"):
            val = -np.asarray(self.psi(xs), dtype=float) - math.log(self.normalization)
        val = np.where(np.isnan(val), -np.inf, val)
        return np.where(ins, val, -np.inf)

    def pdf(self, x) -> Array:
        return np.exp(self.logpdf(x))

    def pdf_scalar(self, x: float) -> float:
        return float(self.pdf(np.array([x]))[0])

    def cdf(self, x) -> Array:
        x = np.asarray(x, dtype=float)
        if self.cdf_closed is not None:
            return np.clip(self.cdf_closed(np.clip(x, self.lo, self.hi)), 0.0, 1.0)
        out = self._table.fraction(np.clip(x, self.lo, self.hi).ravel()).reshape(x.shape)
        return out

    def sf(self, x) -> Array:
        x = np.asarray(x, dtype=float)
        if self.sf_closed is not None:
            return np.clip(self.sf_closed(np.clip(x, self.lo, self.hi)), 0.0, 1.0)
        return 1.0 - self.cdf(x)

    def ppf(self, p) -> Array:
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise DomainError("probabilities must lie in [0, 1]")
        if self.ppf_closed is not None:
            with np.errstate(all="ignore"):
                out = np.asarray(self.ppf_closed(p), dtype=float)
        else:
            out = self._table.quantile(p.ravel()).reshape(p.shape)
        out = np.where(p <= 0, self.lo, out)
        return np.where(p >= 1, self.hi, out)

    def mass(self, lo, hi) -> Array:
        """mu([lo, hi]) for (broadcast) arrays of endpoints."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        c_lo, c_hi = self.cdf(lo), self.cdf(hi)
        upper = c_lo > 0.5
        if np.any(upper):
            s = self.sf(lo) - self.sf(hi)
            out = np.where(upper, s, c_hi - c_lo)
        else:
            out = c_hi - c_lo
        return np.clip(np.where(hi > lo, out, 0.0), 0.0, 1.0)

    def density_left(self, x: float) -> float:
        """Density just to the left of x (0 at or beyond the lower support end)."""
        if x <= self.lo or x > self.hi:
            return 0.0
        if math.isinf(x):
            return 0.0
        return self.pdf_scalar(x)

    def density_right(self, x: float) -> float:
        """Density just to the right of x (0 at or beyond the upper support end)."""
        if x >= self.hi or x < self.lo:
            return 0.0
        if math.isinf(x):
            return 0.0
        return self.pdf_scalar(x)


def _const(value: float):
    return lambda x: np.full(np.shape(x), value, dtype=float)


def exponential(rate: float = 1.0) -> Density1D:
    """e^{-rate x} on [0, inf)."""
    if rate <= 0:
        raise DomainError("rate must be positive")
    return Density1D(
        psi=lambda x: rate * np.asarray(x, dtype=float),
        dpsi=_const(rate),
        support=(0.0, math.inf),
        name="exponential" if rate == 1.0 else f"exponential:{rate:g}",
        cdf_closed=lambda x: -np.expm1(-rate * x),
        sf_closed=lambda x: np.exp(-rate * x),
        ppf_closed=lambda p: -np.log1p(-p) / rate,
        scale=1.0 / rate,
    )


def two_sided_exponential() -> Density1D:
    """e^{-|x|}/2 on the real line."""
    return Density1D(
        psi=lambda x: np.abs(x),
        dpsi=lambda x: np.sign(x),
        support=(-math.inf, math.inf),
        name="laplace",
        cdf_closed=lambda x: np.where(x < 0, 0.5 * np.exp(np.minimum(x, 0)), 1 - 0.5 * np.exp(-np.maximum(x, 0))),
        sf_closed=lambda x: np.where(x < 0, 1 - 0.5 * np.exp(np.minimum(x, 0)), 0.5 * np.exp(-np.maximum(x, 0))),
        ppf_closed=lambda p: np.where(p < 0.5, np.log(2 * p), -np.log(2 * (1 - p))),
    )


def gaussian(K: float = 1.0) -> Density1D:
    """e^{-K x^2/2} on the real line (centered Gaussian of variance 1/K)."""
    if K <= 0:
        raise DomainError("gaussian preset needs K > 0")
    r = math.sqrt(K)
    return Density1D(
        psi=lambda x: 0.5 * K * np.square(x),
        dpsi=lambda x: K * np.asarray(x, dtype=float),
        support=(-math.inf, math.inf),
        name=f"gaussian:{K:g}",
        cdf_closed=lambda x: special.ndtr(r * x),
        sf_closed=lambda x: special.ndtr(-r * x),
        ppf_closed=lambda p: special.ndtri(p) / r,
        scale=1.0 / r,
    )


def s_concave(s: float) -> Density1D:
    """Model density (1 - s x)_+^{(1-s)/s} on [0, 1/s] (s>0) or [0, inf) (s<=0)."""
    s = float(s)
    if s > 1:
        raise DomainError("s-concave model needs s <= 1")
    if s == 0.0:
        d = exponential()
        object.__setattr__(d, "name", "s-concave:0")
        return d
    e = (1.0 - s) / s
    hi = 1.0 / s if s > 0 else math.inf

    def psi(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -e * np.log1p(-s * np.asarray(x, dtype=float))

    def dpsi(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return e * s / (1.0 - s * np.asarray(x, dtype=float))

    def sf(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.exp(np.log1p(-s * np.asarray(x, dtype=float)) / s)

    def cdf(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -np.expm1(np.log1p(-s * np.asarray(x, dtype=float)) / s)

    return Density1D(
        psi=psi,
        dpsi=dpsi,
        support=(0.0, hi),
        name=f"s-concave:{s:g}",
        cdf_closed=cdf,
        sf_closed=sf,
        ppf_closed=lambda p: -np.expm1(s * np.log1p(-p)) / s,
    )


def uniform(D: float = 1.0) -> Density1D:
    if not D > 0 or math.isinf(D):
        raise DomainError("uniform preset needs finite D > 0")
    return Density1D(
        psi=_const(0.0),
        dpsi=_const(0.0),
        support=(0.0, float(D)),
        name=f"uniform:{D:g}",
        cdf_closed=lambda x: np.asarray(x, dtype=float) / D,
        sf_closed=lambda x: 1.0 - np.asarray(x, dtype=float) / D,
        ppf_closed=lambda p: np.asarray(p, dtype=float) * D,
    )


def linear() -> Density1D:
    """Density 2t on [0, 1] (non-decreasing control)."""
    return Density1D(
        psi=lambda x: -np.log(np.asarray(x, dtype=float)),
        dpsi=lambda x: -1.0 / np.asarray(x, dtype=float),
        support=(0.0, 1.0),
        name="linear",
        cdf_closed=lambda x: np.square(x),
        ppf_closed=np.sqrt,
    )


def power(N: float) -> Density1D:
    """(-t)^{N-1} on [-1, 0] for N > 1, t^{N-1} on [1, inf) for N < 0."""
    N = float(N)
    if N > 1 and math.isfinite(N):
        return Density1D(
            psi=lambda x: -(N - 1.0) * np.log(-np.asarray(x, dtype=float)),
            dpsi=lambda x: -(N - 1.0) / np.asarray(x, dtype=float),
            support=(-1.0, 0.0),
            name=f"power:{N:g}",
            cdf_closed=lambda x: 1.0 - np.power(-np.asarray(x, dtype=float), N),
            sf_closed=lambda x: np.power(-np.asarray(x, dtype=float), N),
            ppf_closed=lambda p: -np.power(1.0 - p, 1.0 / N),
        )
    if N < 0:
        return Density1D(
            psi=lambda x: -(N - 1.0) * np.log(np.asarray(x, dtype=float)),
            dpsi=lambda x: -(N - 1.0) / np.asarray(x, dtype=float),
            support=(1.0, math.inf),
            name=f"power:{N:g}",
            cdf_closed=lambda x: 1.0 - np.power(np.asarray(x, dtype=float), N),
            sf_closed=lambda x: np.power(np.asarray(x, dtype=float), N),
            ppf_closed=lambda p: np.power(1.0 - p, 1.0 / N),
        )
    raise DomainError("power preset needs N > 1 or N < 0")


def _delta(K: float, N: float) -> float:
    if N == 1 or math.isinf(N):
        raise DomainError("model density needs finite N != 1")
    return K / (N - 1.0)


def sin_power(K: float, N: float, lo: float | None = None, hi: float | None = None) -> Density1D:
    """sin(sqrt(delta) t)^{N-1} on (0, pi/sqrt(delta)), or a sub-window."""
    d = _delta(K, N)
    if d <= 0:
        raise DomainError("sin-power needs delta = K/(N-1) > 0")
    w = math.sqrt(d)
    top = math.pi / w
    if lo is None or hi is None:
        if N < 1:
            raise DomainError("sin-power with N < 1 is not integrable on the full arc; give lo,hi")
        lo, hi = 0.0, top
    if not 0 <= lo < hi <= top:
        raise DomainError("sin-power window must lie in [0, pi/sqrt(delta)]")
    return Density1D(
        psi=lambda x: -(N - 1.0) * np.log(np.sin(w * np.asarray(x, dtype=float))),
        dpsi=lambda x: -(N - 1.0) * w / np.tan(w * np.asarray(x, dtype=float)),
        support=(float(lo), float(hi)),
        name=f"sin-power:{K:g},{N:g}",
    )


def sinh_power(K: float, N: float, lo: float | None = None, hi: float | None = None) -> Density1D:
    """sinh(sqrt(-delta) t)^{N-1} on a window of (0, inf)."""
    d = _delta(K, N)
    if d >= 0:
        raise DomainError("sinh-power needs delta = K/(N-1) < 0")
    w = math.sqrt(-d)
    if lo is None or hi is None:
        lo, hi = (0.0, 1.0) if N > 1 else (1.0, math.inf)
    if not 0 <= lo < hi:
        raise DomainError("sinh-power window must lie in [0, inf)")

    def psi(x):
        x = np.asarray(x, dtype=float)
        # log sinh(y) = y + log(1 - e^{-2y}) - log 2, stable for large y
        y = w * x
        return -(N - 1.0) * (y + np.log(-np.expm1(-2.0 * y)) - math.log(2.0))

    return Density1D(
        psi=psi,
        dpsi=lambda x: -(N - 1.0) * w / np.tanh(w * np.asarray(x, dtype=float)),
        support=(float(lo), float(hi)),
        name=f"sinh-power:{K:g},{N:g}",
        scale=1.0 / w,
    )


def cosh_power(K: float, N: float, lo: float | None = None, hi: float | None = None) -> Density1D:
    """cosh(sqrt(-delta) t)^{N-1} on a window of the real line."""
    d = _delta(K, N)
    if d >= 0:
        raise DomainError("cosh-power needs delta = K/(N-1) < 0")
    w = math.sqrt(-d)
    if lo is None or hi is None:
        lo, hi = (0.0, 1.0) if N > 1 else (-math.inf, math.inf)
    if not lo < hi:
        raise DomainError("empty cosh-power window")

    def psi(x):
        y = np.abs(w * np.asarray(x, dtype=float))
        return -(N - 1.0) * (y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0))

    return Density1D(
        psi=psi,
        dpsi=lambda x: -(N - 1.0) * w * np.tanh(w * np.asarray(x, dtype=float)),
        support=(float(lo), float(hi)),
        name=f"cosh-power:{K:g},{N:g}",
        scale=1.0 / w,
    )


_ALLOWED_NAMES = {"x", "exp", "log", "sin", "cos", "sinh", "cosh", "abs", "sqrt", "pi", "E"}


def compile_expression(expr: str):
    """Vectorized callables (g, g') for a formula in x.

    The grammar is arithmetic (+ - * / ^) over x, numbers, pi, E and the
    functions exp, log, sin, cos, sinh, cosh, abs, sqrt. The derivative is
    obtained symbolically.
    """
    import sympy as sp
    from sympy.parsing.sympy_parser import (
        convert_xor,
        implicit_multiplication_application,
        parse_expr,
        standard_transformations,
    )

    names = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", expr))
    bad = names - _ALLOWED_NAMES
    if bad:
        raise DomainError(f"unsupported names in expression: {sorted(bad)}")
    x = sp.Symbol("x", real=True)
    local = {
        "x": x, "exp": sp.exp, "log": sp.log, "sin": sp.sin, "cos": sp.cos,
        "sinh": sp.sinh, "cosh": sp.cosh, "abs": sp.Abs, "sqrt": sp.sqrt, "pi": sp.pi, "E": sp.E,
    }
    try:
        tree = parse_expr(
            expr,
            local_dict=local,
            global_dict={"__builtins__": {}, "Integer": sp.Integer, "Float": sp.Float,
                         "Rational": sp.Rational, "Symbol": sp.Symbol},
            transformations=standard_transformations + (convert_xor, implicit_multiplication_application),
        )
    except Exception as exc:  # parse errors come in many types
        raise DomainError(f"cannot parse expression {expr!r}: {exc}") from exc
    if tree.free_symbols - {x}:
        raise DomainError("expression may only depend on x")
    f = sp.lambdify(x, tree, "numpy")
    df = sp.lambdify(x, sp.diff(tree, x), "numpy")

    def g(v):
        v = np.asarray(v, dtype=float)
        return np.broadcast_to(np.asarray(f(v), dtype=float), v.shape).copy()

    def dg(v):
        v = np.asarray(v, dtype=float)
        return np.broadcast_to(np.asarray(df(v), dtype=float), v.shape).copy()

    return g, dg


def from_expression(expr: str, lo: float, hi: float) -> Density1D:
    """Density e^{-psi} with psi given as a formula in x (see ``compile_expression``)."""
    psi, dpsi = compile_expression(expr)
    return Density1D(psi=psi, dpsi=dpsi, support=(float(lo), float(hi)), name=f"psi:{expr}@{lo:g},{hi:g}")


def _num(tok: str) -> float:
    t = tok.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    if t == "pi":
        return math.pi
    return float(t)


def parse_measure(text: str) -> Density1D:
    """Build a density from a preset name such as ``gaussian:1`` or ``psi:x^2/2@-inf,inf``."""
    text = text.strip()
    if text.startswith("psi:"):
        body = text[4:]
        if "@" not in body:
            raise DomainError("expression measures need '@lo,hi'")
        expr, _, window = body.rpartition("@")
        lo, hi = (_num(v) for v in window.split(","))
        return from_expression(expr, lo, hi)
    name, _, arg = text.partition(":")
    args = [_num(a) for a in arg.split(",")] if arg else []
    try:
        if name == "exponential":
            return exponential(*args)
        if name == "laplace":
            return two_sided_exponential()
        if name == "gaussian":
            return gaussian(*args)
        if name == "s-concave":
            return s_concave(*args)
        if name == "power":
            return power(*args)
        if name == "sin-power":
            return sin_power(*args)
        if name == "sinh-power":
            return sinh_power(*args)
        if name == "cosh-power":
            return cosh_power(*args)
        if name == "uniform":
            return uniform(*args)
        if name == "linear":
            return linear()
    except TypeError as exc:
        raise DomainError(f"bad parameters for preset {name!r}: {exc}") from exc
    raise DomainError(f"unknown measure preset {text!r}")
