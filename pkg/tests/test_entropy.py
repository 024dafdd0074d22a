import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import roots_laguerre

from dilation_lab.density import parse_measure
from dilation_lab.entropy import (
    TestFunction,
    chebyshev_T,
    coarea_lhs,
    dual_functional,
    entropy_bound_check,
    expectation,
    f_epsilon,
    measured_remez,
    n_entropy,
    phi_f,
    relative_entropy,
    remez_continuity,
    remez_derivative_at_one,
    remez_poly_bound,
    remez_poly_slope_bound,
    reverse_holder_check,
)
from dilation_lab.errors import (
    CurvatureViolated,
    DomainError,
    InadmissibleG,
    Infinite,
    NotNormalized,
)

EXP = parse_measure("exponential")
GAUSS = parse_measure("gaussian:1")
UNIF = parse_measure("uniform:1")
X = TestFunction.from_expression("x")
ONE = TestFunction(lambda x: np.ones_like(np.asarray(x, dtype=float)), name="1")
EULER_GAMMA = 0.5772156649015329
U_MINUS_2 = 2 - math.sqrt(math.pi)  # -2 Gamma(3/2) + 2


def test_test_function_structure_rules():
    with pytest.raises(DomainError):
        TestFunction.from_expression("x", "monotone", [1.0])
    with pytest.raises(DomainError):
        TestFunction.from_expression("abs(x)", "unimodal", [0.0, 1.0])
    with pytest.raises(DomainError):
        TestFunction.from_expression("x", "wiggly")


def test_sublevel_sets_are_interval_unions():
    f = TestFunction.from_expression("abs(x)", "unimodal", [0.0])
    (l, r), = f.sublevel(1.0, GAUSS).components
    assert (l, r) == (pytest.approx(-1, abs=1e-10), pytest.approx(1, abs=1e-10))
    (l, r), = TestFunction.from_expression("x^2", "unimodal").sublevel(4.0, GAUSS).components
    assert (l, r) == (pytest.approx(-2, abs=1e-8), pytest.approx(2, abs=1e-8))


@pytest.mark.parametrize("s", [1.5, 2.0, 4.0])
def test_remez_of_identity_under_exponential(s):
    assert measured_remez(EXP, X, s).C == pytest.approx(s, abs=1e-9)


def test_remez_examples():
    assert measured_remez(GAUSS, TestFunction.from_expression("abs(x)", "unimodal", [0.0]), 1.0).C == 1
    upper = TestFunction(lambda x: (np.asarray(x, dtype=float) > 0.5).astype(float), name="1_(1/2,1]")
    est = measured_remez(UNIF, upper, 1.5)
    assert not est.finite and est.C == math.inf


def test_remez_derivative_examples():
    assert remez_derivative_at_one(EXP, X) == pytest.approx(1, abs=1e-6)
    sq = X.scaled(3.0, 2.0)
    assert remez_derivative_at_one(EXP, sq, steps=(1.001,)) == pytest.approx(2, abs=1e-2)
    norm = TestFunction.from_expression("abs(x)", "unimodal", [0.0])
    assert remez_derivative_at_one(GAUSS, norm) <= 2 + 1e-6


def test_remez_derivative_rejects_infinite_and_bad_steps():
    upper = TestFunction(lambda x: (np.asarray(x, dtype=float) > 0.5).astype(float))
    with pytest.raises(Infinite):
        remez_derivative_at_one(UNIF, upper)
    with pytest.raises(DomainError):
        remez_derivative_at_one(EXP, X, steps=(0.9,))


def test_remez_continuity_at_one():
    assert remez_continuity(EXP, X).passed


@given(st.floats(1.0, 3.0), st.floats(1.0, 3.0))
@settings(max_examples=6, deadline=None)
def test_remez_is_monotone_in_s(s1, s2):
    f = TestFunction.from_expression("abs(x)", "unimodal", [0.0])
    lo, hi = sorted((s1, s2))
    assert measured_remez(GAUSS, f, lo).C <= measured_remez(GAUSS, f, hi).C + 1e-9


@given(st.floats(0.1, 10), st.floats(0.3, 3), st.floats(1.1, 3))
@settings(max_examples=5, deadline=None)
def test_remez_power_law(a, q, s):
    f = TestFunction.from_expression("abs(x)", "unimodal", [0.0])
    base = measured_remez(GAUSS, f, s).C
    assert measured_remez(GAUSS, f.scaled(a, q), s).C == pytest.approx(base ** q, rel=1e-6)


def test_relative_entropy_examples():
    assert relative_entropy(EXP, ONE) == pytest.approx(0, abs=1e-14)
    assert relative_entropy(EXP, X) == pytest.approx(1 - EULER_GAMMA, abs=1e-9)
    half = TestFunction(lambda x: 2.0 * (np.asarray(x, dtype=float) <= 0.5), name="2*1_[0,1/2]")
    assert relative_entropy(UNIF, half) == pytest.approx(math.log(2), abs=1e-9)


def test_unnormalized_density_rejected():
    with pytest.raises(NotNormalized):
        relative_entropy(EXP, X.scaled(2.0, 1.0))


def test_dimensional_entropy_examples():
    assert n_entropy(EXP, ONE, 3) == pytest.approx(0, abs=1e-12)
    assert n_entropy(EXP, X, -2) == pytest.approx(U_MINUS_2, abs=1e-9)
    assert n_entropy(EXP, X, math.inf) == pytest.approx(relative_entropy(EXP, X), abs=1e-12)
    with pytest.raises(DomainError):
        n_entropy(EXP, X, 0.5)
    with pytest.raises(DomainError):
        n_entropy(EXP, X, -1)


@pytest.mark.parametrize("mu,rho", [(EXP, X), (GAUSS, TestFunction.from_expression("x^2", "unimodal", [0.0]))])
def test_entropy_ordering_and_limit(mu, rho):
    ent = relative_entropy(mu, rho)
    for N in (1, 2, 10):
        assert n_entropy(mu, rho, -N - 1) <= ent + 1e-10 <= n_entropy(mu, rho, N) + 2e-10
    gaps = [abs(n_entropy(mu, rho, sign * N) - ent) for N in (10, 100, 1000) for sign in (1, -1)]
    assert gaps[2] < gaps[0] and gaps[4] < gaps[2] and gaps[4] < 1e-2
    assert gaps[3] < gaps[1] and gaps[5] < gaps[3] and gaps[5] < 1e-2


@pytest.mark.parametrize("N", [2, 5, -2, -5, math.inf])
def test_dual_attains_entropy_at_root(N):
    g = (lambda x: np.asarray(x, dtype=float)) if math.isinf(N) else (lambda x: np.asarray(x, dtype=float) ** (1 / N))
    want = relative_entropy(EXP, X) if math.isinf(N) else n_entropy(EXP, X, N)
    assert dual_functional(EXP, X, g, N) == pytest.approx(want, abs=1e-8)


@pytest.mark.parametrize("N", [2, -2])
def test_dual_of_constant_is_zero(N):
    assert dual_functional(EXP, X, lambda x: np.ones_like(np.asarray(x, dtype=float)), N) == pytest.approx(0, abs=1e-12)


@given(st.floats(-0.3, 0.3), st.floats(0.1, 5), st.floats(0, 6.3), st.sampled_from([2, -2, 5]))
@settings(max_examples=25, deadline=None)
def test_dual_never_exceeds_entropy(amp, freq, phase, N):
    bound = n_entropy(EXP, X, N)

    def g(x):
        x = np.asarray(x, dtype=float)
        return x ** (1 / N) * (1 + amp * np.sin(freq * x + phase))

    assert dual_functional(EXP, X, g, N) <= bound + 1e-8


def test_dual_rejects_inadmissible_g():
    with pytest.raises(InadmissibleG):
        dual_functional(EXP, X, lambda x: -np.ones_like(np.asarray(x, dtype=float)), 2)
    with pytest.raises(InadmissibleG):
        dual_functional(EXP, X, lambda x: np.zeros_like(np.asarray(x, dtype=float)), -2)
    with pytest.raises(InadmissibleG):
        dual_functional(EXP, X, lambda x: np.exp(np.asarray(x, dtype=float)), 2)


def test_coarea_examples():
    assert coarea_lhs(EXP, X) == pytest.approx(1, abs=1e-8)
    assert coarea_lhs(EXP, TestFunction(lambda x: np.zeros_like(np.asarray(x, dtype=float)))) == 0
    assert coarea_lhs(UNIF, X) == pytest.approx(0.5, abs=1e-8)


def test_coarea_bounded_by_remez_slope():
    norm = TestFunction.from_expression("abs(x)", "unimodal", [0.0])
    lhs = coarea_lhs(GAUSS, norm)
    assert lhs == pytest.approx(2 * math.sqrt(2 / math.pi), abs=1e-7)
    assert lhs <= remez_derivative_at_one(GAUSS, norm) * expectation(GAUSS, norm, [0.0]) + 1e-6
    assert coarea_lhs(EXP, X) == pytest.approx(remez_derivative_at_one(EXP, X) * expectation(EXP, X), abs=1e-6)


def test_f_epsilon_and_phi_examples():
    xs = np.array([0.1, 1.0, 3.0])
    np.testing.assert_allclose(f_epsilon(EXP, X, 0.3)(xs), 0.7 * xs, atol=1e-10)
    np.testing.assert_allclose(phi_f(EXP, X)(xs), xs, atol=1e-8)
    # Gauss-Laguerre integrates against e^{-x} exactly for polynomial Phi
    nodes, weights = roots_laguerre(12)
    integral = float(weights @ phi_f(EXP, X)(nodes))
    assert integral == pytest.approx(1, abs=1e-6) and integral >= relative_entropy(EXP, X)
    const = TestFunction(lambda x: np.full(np.shape(x), 2.0))
    np.testing.assert_allclose(f_epsilon(EXP, const, 0.4)(xs), 2.0)
    np.testing.assert_allclose(phi_f(EXP, const)(xs), 0.0, atol=1e-12)


def test_chebyshev_polynomials():
    for d in range(1, 8):
        assert chebyshev_T(d, 1.0) == pytest.approx(1)
    assert chebyshev_T(2, 2.0) == 7
    xs = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(chebyshev_T(5, xs), np.cos(5 * np.arccos(xs)), atol=1e-12)
    assert remez_poly_bound(1, 3.0) == 5
    assert remez_poly_slope_bound(3) == 18


def test_reverse_holder_examples():
    rep = reverse_holder_check(EXP, X, 1, 2, 1)
    assert rep.passed and rep.lhs == pytest.approx(math.sqrt(2))
    assert reverse_holder_check(EXP, X, 2, 2, 1).details["ratio"] == pytest.approx(1)
    norm = TestFunction.from_expression("abs(x)", "unimodal", [0.0])
    rep = reverse_holder_check(GAUSS, norm, 1, 2, 2)
    assert rep.passed and rep.lhs == pytest.approx(1) and rep.rhs == pytest.approx(4 * math.sqrt(2 / math.pi))


def test_entropy_bound_examples():
    assert entropy_bound_check(EXP, X, math.inf).passed
    rep = entropy_bound_check(EXP, X, -2)
    assert rep.passed and rep.lhs == pytest.approx(U_MINUS_2, abs=1e-9)
    assert entropy_bound_check(GAUSS, ONE, math.inf, uprime=0.0).passed
    with pytest.raises(CurvatureViolated):
        entropy_bound_check(EXP, X, 2)
