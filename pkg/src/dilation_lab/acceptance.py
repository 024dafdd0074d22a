"""Named verification suites: closed forms, cross-checks and property sweeps.

Each suite returns a combined :class:`VerificationReport`; the CLI ``verify``
command and the acceptance tests run the same functions. Random inputs are
drawn from fixed seeds, so a suite is deterministic.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import density
from .entropy import (
    TestFunction,
    coarea_lhs,
    dual_functional,
    entropy_bound_check,
    measured_remez,
    n_entropy,
    relative_entropy,
    reverse_holder_check,
)
from .epsbounds import build_pipeline, check_derivative_at_zero
from .intervals import IntervalUnion
from .measure1d import (
    brute_force_profile,
    check_kn_convexity,
    circle_ball_dilation,
    circle_dilation_sampled,
    dilation_area,
    dilation_area_fd,
    epsilon_dilate,
    epsilon_dilate_grid,
    measure,
)
from .model import CurvatureTriple
from .profiles import (
    ProfileTable,
    cdd_profile_case,
    cdd_profile_general,
    check_concavity,
    closed_form_profile,
    flat_profile,
    gaussian_profile,
)
from .report import VerificationReport

__all__ = ["Suite", "SUITES", "run_suite", "suite_names"]

INF = math.inf
THETAS_FINE = np.round(np.arange(1, 20) * 0.05, 2)
THETAS = np.round(np.arange(1, 10) * 0.1, 1)

# one representative triple per case of the explicit profile formulas
CASE_TRIPLES = (
    CurvatureTriple(1, INF, INF),
    CurvatureTriple(1, INF, 1),
    CurvatureTriple(0, INF, INF),
    CurvatureTriple(1, 2, INF),
    CurvatureTriple(0, 2, INF),
    CurvatureTriple(-1, 2, 1),
    CurvatureTriple(1, -2, 1),
    CurvatureTriple(0, -2, INF),
    CurvatureTriple(-1, -2, 0.9 * math.pi / 2),
)

# presets paired with a curvature triple they satisfy on a window of length <= D
NEEDLES = (
    ("gaussian:1", CurvatureTriple(1, INF, INF)),
    ("exponential", CurvatureTriple(0, INF, INF)),
    ("laplace", CurvatureTriple(0, INF, INF)),
    ("uniform:1", CurvatureTriple(0, 2, 1)),
    ("s-concave:-1", CurvatureTriple(0, -1, INF)),
    ("s-concave:0.5", CurvatureTriple(0, 3, INF)),
    ("power:3", CurvatureTriple(0, 3, INF)),
    ("sin-power:1,3", CurvatureTriple(1, 3, math.pi * math.sqrt(2))),
    ("cosh-power:1,-2", CurvatureTriple(1, -2, INF)),
    ("sinh-power:-1,3", CurvatureTriple(-1, 3, 1)),
)


def _close(check: str, params: dict, lhs, rhs, tol: float, **details) -> VerificationReport:
    return VerificationReport.compare(check, params, float(lhs), float(rhs), tol, "==", **details)


def _worst_abs(check: str, params: dict, got, want, tol: float) -> VerificationReport:
    got, want = np.asarray(got, dtype=float), np.asarray(want, dtype=float)
    err = np.abs(got - want)
    i = int(np.argmax(err))
    return _close(check, params, got.flat[i], want.flat[i], tol, max_error=float(err.flat[i]))


# ---------------------------------------------------------------------------
# profiles


def closed_forms() -> VerificationReport:
    """Case 3/5/8 closed forms through the case formulas and through flat profiles."""
    reps = []
    th = THETAS_FINE
    reps.append(_worst_abs("case3_formula", {"route": "case"},
                           cdd_profile_case(CurvatureTriple(0, INF, INF), th), closed_form_profile(INF, th), 1e-8))
    reps.append(_worst_abs("case3_formula", {"route": "flat"},
                           flat_profile(lambda t: np.exp(-t), (0, INF), th), closed_form_profile(INF, th), 1e-8))
    for N in (2, 5, -2, -5):
        want = closed_form_profile(N, th)
        reps.append(_worst_abs("power_formula", {"N": N, "route": "case"},
                               cdd_profile_case(CurvatureTriple(0, N, INF), th), want, 1e-8))
        if N > 1:
            got = flat_profile(lambda t, N=N: (1.0 - t) ** (N - 1), (0, 1), th)
        else:
            got = flat_profile(lambda t, N=N: (1.0 + t) ** (N - 1), (0, INF), th)
        reps.append(_worst_abs("power_formula", {"N": N, "route": "flat"}, got, want, 1e-8))
    return VerificationReport.combine("closed_forms", {}, reps)


def general_vs_case() -> VerificationReport:
    """The infimum-over-H formulation agrees with the explicit case formulas."""
    reps = []
    for tr in CASE_TRIPLES:
        reps.append(_worst_abs("general_vs_case", {"triple": str(tr)},
                               cdd_profile_general(tr, THETAS), cdd_profile_case(tr, THETAS), 1e-3))
    return VerificationReport.combine("general_vs_case", {}, reps)


def scale_invariance() -> VerificationReport:
    """Profiles are unchanged by (K, N, D) -> (K/lam^2, N, lam D); K = 0 cases ignore D."""
    reps = []
    for tr in (CurvatureTriple(1, INF, 1), CurvatureTriple(1, 2, INF), CurvatureTriple(-1, -2, 1)):
        base = cdd_profile_case(tr, THETAS)
        for lam in (0.5, 2.0):
            reps.append(_worst_abs("scale_invariance", {"triple": str(tr), "lambda": lam},
                                   cdd_profile_case(tr.scaled(lam), THETAS), base, 1e-6))
    for N in (INF, 2, -2):
        want = closed_form_profile(N, THETAS)
        for D in (1.0, 10.0, INF):
            reps.append(_worst_abs("diameter_independence", {"N": N, "D": D},
                                   cdd_profile_case(CurvatureTriple(0, N, D), THETAS), want, 1e-8))
    return VerificationReport.combine("scale_invariance", {}, reps)


GAUSSIAN_TARGET = 0.857356  # target value stated for the Gaussian profile at 1/2


def gaussian() -> VerificationReport:
    """Gaussian profile at 1/2: stated value, flat-profile identity, brute-force bound."""
    g = gaussian_profile(0.5)
    reps = [
        _close("gaussian_value", {"theta": 0.5}, g, GAUSSIAN_TARGET, 1e-6),
        _close("gaussian_flat_identity", {"theta": 0.5}, g,
               2.0 * flat_profile(lambda t: np.exp(-0.5 * t * t), (0, INF), 0.5), 1e-8),
    ]
    bf = brute_force_profile(density.gaussian(), 0.5, "area", k_max=2, resolution=2000)
    reps.append(VerificationReport.compare("gaussian_brute_force", {"k": 2, "resolution": 2000},
                                           bf, g - 1e-3, 0.0, ">="))
    return VerificationReport.combine("gaussian", {}, reps)


def _random_interior_intervals(mu, rng, count: int):
    out = []
    while len(out) < count:
        p = np.sort(rng.uniform(0.02, 0.98, size=2))
        if p[1] - p[0] < 0.01:
            continue
        lo, hi = mu.ppf(p)
        out.append(IntervalUnion.interval(float(lo), float(hi)))
    return out


def dilation_area_oracle() -> VerificationReport:
    """Exact dilation areas against Richardson finite differences of the dilated measure."""
    rng = np.random.default_rng(20240501)
    reps = []
    for mu in (density.gaussian(), density.exponential(), density.s_concave(-1.0)):
        for A in _random_interior_intervals(mu, rng, 50):
            exact = dilation_area(mu, A)
            fd = dilation_area_fd(mu, A)
            reps.append(_close("dilation_area", {"measure": mu.name, "set": A.to_list()},
                               fd, exact, 1e-3 * max(abs(exact), 1e-12)))
    return VerificationReport.combine("dilation_area_oracle", {}, reps)


def needle_bound() -> VerificationReport:
    """Brute-force profiles of curvature-checked presets stay above the CDD profile."""
    reps = []
    for name, tr in NEEDLES:
        mu = density.parse_measure(name)
        cd = check_kn_convexity(mu, tr.K, tr.N)
        reps.append(VerificationReport("needle_curvature", {"measure": name, "triple": str(tr)},
                                       0.0, cd.margin, cd.tol, cd.passed and (mu.hi - mu.lo) <= tr.D,
                                       cd.margin))
        lower = cdd_profile_general(tr, THETAS)
        for t, low in zip(THETAS, lower):
            bf = brute_force_profile(mu, float(t), "area", k_max=1)
            reps.append(VerificationReport.compare("needle_bound", {"measure": name, "triple": str(tr),
                                                                    "theta": float(t)},
                                                   bf, low - 1e-3, 0.0, ">="))
    return VerificationReport.combine("needle_bound", {}, reps)


# ---------------------------------------------------------------------------
# eps-dilation bounds


def eps_pipeline() -> VerificationReport:
    """K = 0 pipelines: F^{-1} closed forms, the value at (1/2, 1/2), extremal equality."""
    reps = []
    th = np.concatenate([THETAS_FINE, [0.99]])
    p2 = build_pipeline(CurvatureTriple(0, 2, INF))
    reps.append(_worst_abs("finv_closed_form", {"N": 2}, p2.Finv(th), 2 - 2 * np.sqrt(1 - th), 1e-6))
    pinf = build_pipeline(CurvatureTriple(0, INF, INF))
    reps.append(_worst_abs("finv_closed_form", {"N": "inf"}, pinf.Finv(th), -np.log1p(-th), 1e-6))
    v = pinf.epsilon_bound(0.5, 0.5)
    reps.append(VerificationReport("bound_half_half", {"theta": 0.5, "eps": 0.5}, v, 0.75, 0.0,
                                   f"{v:.9g}" == "0.75", -abs(v - 0.75), {"printed": f"{v:.9g}"}))
    mu = density.exponential()
    for a in (0.2, math.log(2.0), 2.0):
        A = IntervalUnion.interval(0.0, a)
        for eps in (0.1, 0.5, 0.9):
            lhs = measure(mu, epsilon_dilate(A, eps).dilated)
            rhs = pinf.epsilon_bound(measure(mu, A), eps)
            reps.append(_close("extremal_equality", {"a": a, "eps": eps}, lhs, rhs, 1e-8))
    return VerificationReport.combine("eps_pipeline", {}, reps)


def eps_derivative() -> VerificationReport:
    """d/d eps of the bound at 0 equals the Case 3/5 profile."""
    reps = [check_derivative_at_zero(build_pipeline(CurvatureTriple(0, N, INF)), (0.25, 0.5, 0.75))
            for N in (INF, 2)]
    return VerificationReport.combine("eps_derivative", {}, reps)


# ---------------------------------------------------------------------------
# entropy


def _exponential_pair():
    return density.exponential(), TestFunction(lambda x: x, name="x")


def entropy_suite() -> VerificationReport:
    """Entropy, Remez, entropy bound and co-area values for (exponential, rho = x)."""
    mu, rho = _exponential_pair()
    reps = []
    ent = relative_entropy(mu, rho)
    reps.append(_close("relative_entropy", {}, ent, 1.0 - np.euler_gamma, 1e-6))
    for s in (1.5, 2.0, 4.0):
        reps.append(_close("measured_remez", {"s": s}, measured_remez(mu, rho, s).C, s, 1e-6))
    reps.append(entropy_bound_check(mu, rho, INF))
    u = n_entropy(mu, rho, -2.0)
    reps.append(_close("n_entropy", {"N": -2}, u, 2.0 - math.sqrt(math.pi), 1e-6))
    reps.append(VerificationReport.compare("entropy_ordering", {"N": -2}, u, ent, 0.0, "<="))
    reps.append(_close("coarea_equality", {}, coarea_lhs(mu, rho), 1.0, 1e-4))
    return VerificationReport.combine("entropy", {}, reps)


def _dual_pairs():
    mu, rho = _exponential_pair()
    g = density.gaussian()
    sq = TestFunction(lambda x: x * x, "unimodal", (0.0,), name="x^2")
    return ((mu, rho), (g, sq))


def duality() -> VerificationReport:
    """Dual functional: equality at g = rho^{1/N}, never above U_N for perturbed g."""
    rng = np.random.default_rng(7)
    reps = []
    for mu, rho in _dual_pairs():
        for N in (2.0, -2.0):
            u = n_entropy(mu, rho, N)
            opt = dual_functional(mu, rho, lambda x: rho(x) ** (1.0 / N), N)
            reps.append(_close("dual_equality", {"measure": mu.name, "rho": rho.name, "N": N}, opt, u, 1e-8))
            worst = -math.inf
            for _ in range(100):
                amp, freq, phase = rng.uniform(-0.3, 0.3), rng.uniform(0.2, 3.0), rng.uniform(0, 2 * math.pi)

                def g(x, amp=amp, freq=freq, phase=phase):
                    return rho(x) ** (1.0 / N) * (1.0 + amp * np.sin(freq * x + phase))

                worst = max(worst, dual_functional(mu, rho, g, N))
            reps.append(VerificationReport.compare("dual_domination", {"measure": mu.name, "rho": rho.name,
                                                                       "N": N, "samples": 100},
                                                   worst, u, 1e-8, "<="))
    return VerificationReport.combine("duality", {}, reps)


def reverse_holder() -> VerificationReport:
    """Moment comparison for (exponential, f = x) with u'(1) = 1 over a sweep of q/p."""
    mu, f = _exponential_pair()
    reps = [reverse_holder_check(mu, f, 1.0, q, 1.0) for q in (1.0, 1.5, 2.0, 4.0)]
    rep2 = reps[2]
    reps.append(_close("reverse_holder_value", {"p": 1, "q": 2}, rep2.lhs, math.sqrt(2.0), 1e-9))
    return VerificationReport.combine("reverse_holder", {}, reps)


# ---------------------------------------------------------------------------
# structural properties


def _random_union(rng, k_max: int = 3, span: float = 2.0) -> IntervalUnion:
    k = int(rng.integers(1, k_max + 1))
    pts = np.sort(rng.uniform(0.0, span, size=2 * k))
    return IntervalUnion.from_pairs(zip(pts[::2], pts[1::2]))


def _boundary_distance(A: IntervalUnion, x: np.ndarray) -> np.ndarray:
    ends = np.array([e for c in A.components for e in c])
    return np.min(np.abs(x[:, None] - ends[None, :]), axis=1)


def structure() -> VerificationReport:
    """Dilation invariants, exact-vs-grid dilation, concavity of flat profiles, circle dilation."""
    rng = np.random.default_rng(12)
    reps = []
    mu = density.gaussian()
    bad = 0
    for _ in range(200):
        A = _random_union(rng)
        e1, e2 = np.sort(rng.uniform(0.0, 0.95, size=2))
        D1, D2 = epsilon_dilate(A, e1).dilated, epsilon_dilate(A, e2).dilated
        C = _random_union(rng)
        B = A.union(C)
        DB = epsilon_dilate(B, e1).dilated
        ok = (A.is_subset(D1, 1e-12) and D1.is_subset(D2, 1e-12) and D1.is_subset(DB, 1e-12)
              and D1.union(epsilon_dilate(C, e1).dilated).is_subset(DB, 1e-12)
              and measure(mu, A) <= measure(mu, D1) + 1e-15 <= measure(mu, D2) + 2e-15)
        bad += not ok
    reps.append(VerificationReport("dilation_invariants", {"unions": 200}, float(bad), 0.0, 0.0,
                                   bad == 0, -float(bad)))
    worst = 0
    for _ in range(50):
        A = _random_union(rng, span=1.0)
        eps = float(rng.uniform(0.05, 0.6))
        exact = epsilon_dilate(A, eps).dilated
        lo, hi = exact.components[0][0] - 0.1, exact.components[-1][1] + 0.1
        x = np.linspace(lo, hi, 60)
        x = x[_boundary_distance(exact, x) > 1e-4]
        grid = epsilon_dilate_grid(A, eps, x, step=2e-5)
        worst = max(worst, int(np.sum(grid != exact.contains(x))))
    reps.append(VerificationReport("exact_vs_grid", {"unions": 50, "resolution": 1e-4}, float(worst), 0.0,
                                   0.0, worst == 0, -float(worst)))
    for label, f, iv in (("e^-t", lambda t: np.exp(-t), (0, INF)),
                         ("e^-t^2/2", lambda t: np.exp(-0.5 * t * t), (0, INF))):
        table = ProfileTable(label, list(THETAS_FINE), list(flat_profile(f, iv, THETAS_FINE)), "flat")
        reps.append(check_concavity(table))
    control = ProfileTable("e^t^2 on [0,2]", list(THETAS_FINE),
                           list(flat_profile(lambda t: np.exp(t * t), (0, 2), THETAS_FINE)), "flat")
    ctl = check_concavity(control)
    reps.append(VerificationReport("concavity_control_fails", {"descriptor": control.descriptor},
                                   ctl.lhs, ctl.rhs, ctl.tol, not ctl.passed, -ctl.margin))
    pairs = list(zip(rng.uniform(0.05, 3.0, 20), rng.uniform(0.02, 0.95, 20)))
    for r, eps in pairs:
        # a radius of pi or more is the whole circle, where the sampler stops
        reps.append(_close("circle_dilation", {"r": float(r), "eps": float(eps)},
                           min(circle_ball_dilation(r, eps), math.pi), circle_dilation_sampled(r, eps), 1e-4))
    return VerificationReport.combine("structure", {}, reps)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Suite:
    name: str
    criterion: int
    title: str
    run: Callable[[], VerificationReport]
    time_limit: float | None = None


SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("closed-forms", 1, "closed-form profile equalities", closed_forms, 1.0),
    Suite("general-vs-case", 2, "general vs case profile consistency", general_vs_case, 120.0),
    Suite("scale-invariance", 3, "scale invariance and diameter independence", scale_invariance),
    Suite("gaussian", 4, "Gaussian profile", gaussian, 60.0),
    Suite("dilation-area", 5, "dilation area vs finite differences", dilation_area_oracle),
    Suite("needle-bound", 6, "CDD lower bound on curvature-checked needles", needle_bound),
    Suite("eps-pipeline", 7, "eps-dilation bound pipeline (K=0)", eps_pipeline),
    Suite("eps-derivative", 8, "derivative of the eps bound at eps=0", eps_derivative),
    Suite("entropy", 9, "entropy, Remez and co-area values", entropy_suite),
    Suite("duality", 10, "dual formulas of the N-entropy", duality),
    Suite("reverse-holder", 11, "reverse Holder inequality", reverse_holder),
    Suite("structure", 12, "structural properties", structure),
)}


def suite_names() -> list[str]:
    return [*SUITES, "all"]


def run_suite(name: str) -> tuple[VerificationReport, float]:
    """Run one suite; a stated runtime limit becomes part of the verdict."""
    suite = SUITES[name]
    start = time.perf_counter()
    rep = suite.run()
    elapsed = time.perf_counter() - start
    rep.details["criterion"] = suite.criterion
    rep.details["seconds"] = round(elapsed, 3)
    if suite.time_limit is not None:
        rep.details["time_limit"] = suite.time_limit
        if elapsed > suite.time_limit:
            rep.passed = False
            rep.details["too_slow"] = True
    return rep, elapsed
