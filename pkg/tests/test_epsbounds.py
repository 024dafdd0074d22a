import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilation_lab.density import parse_measure
from dilation_lab.epsbounds import (
    build_pipeline,
    check_assumption_A,
    check_derivative_at_zero,
    closed_form_bound,
    dtilde,
    epsilon_bound,
)
from dilation_lab.errors import DomainError, OutOfDomain
from dilation_lab.intervals import IntervalUnion
from dilation_lab.measure1d import epsilon_dilate, measure
from dilation_lab.model import CurvatureTriple

INF = math.inf
THETAS = np.linspace(0.01, 0.99, 50)


@pytest.fixture(scope="module")
def exp_pipe():
    return build_pipeline(CurvatureTriple(0, INF, INF))


@pytest.fixture(scope="module")
def power_pipe():
    return build_pipeline(CurvatureTriple(0, 2, INF))


@pytest.fixture(scope="module")
def neg_pipe():
    return build_pipeline(CurvatureTriple(0, -2, INF))


def test_zero_curvature_inverse_tables(exp_pipe, power_pipe, neg_pipe):
    np.testing.assert_allclose(exp_pipe.I(THETAS), 1 - THETAS, rtol=1e-8)
    np.testing.assert_allclose(exp_pipe.Finv(THETAS), -np.log1p(-THETAS), atol=1e-6)
    np.testing.assert_allclose(power_pipe.Finv(THETAS), 2 - 2 * np.sqrt(1 - THETAS), atol=1e-6)
    np.testing.assert_allclose(neg_pipe.Finv(THETAS), -2 + 2 * (1 - THETAS) ** -0.5, atol=1e-6)
    assert exp_pipe.Finv(1.0) == INF and neg_pipe.Finv(1.0) == INF
    assert power_pipe.Finv(1.0) == pytest.approx(2, abs=1e-6)
    assert exp_pipe.Finv(0.0) == 0
    assert np.all(np.diff(power_pipe.Finv(THETAS)) > 0)


def test_inverse_matches_profile_near_zero(exp_pipe, power_pipe):
    for pipe in (exp_pipe, power_pipe):
        th = 1e-6
        ratio = pipe.Finv(th) / float(pipe.sampler.value(np.array([th]))[0])
        assert ratio == pytest.approx(1, abs=1e-3)


def test_epsilon_bound_examples(exp_pipe, power_pipe):
    assert exp_pipe.epsilon_bound(0.5, 0.5) == pytest.approx(0.75, abs=1e-9)
    assert epsilon_bound(exp_pipe, 0.5, 0.5) == pytest.approx(0.75, abs=1e-9)
    assert power_pipe.threshold(0.5) == pytest.approx(0.75, abs=1e-8)
    for theta in (0.0, 0.3, 0.9):
        assert power_pipe.epsilon_bound(theta, 0.0) == pytest.approx(theta, abs=1e-9)


def test_bound_above_threshold_is_out_of_domain(power_pipe):
    with pytest.raises(OutOfDomain):
        power_pipe.epsilon_bound(0.9, 0.5)
    with pytest.raises(OutOfDomain):
        closed_form_bound(2, 0.9, 0.5)
    with pytest.raises(DomainError):
        power_pipe.Finv(1.5)


@pytest.mark.parametrize("N", [2, 5, -2, INF])
def test_pipeline_matches_closed_form_bound(N):
    pipe = build_pipeline(CurvatureTriple(0, N, INF))
    for theta in (0.1, 0.4, 0.7):
        for eps in (0.05, 0.2):
            if theta < pipe.threshold(eps):
                assert pipe.epsilon_bound(theta, eps) == pytest.approx(closed_form_bound(N, theta, eps),
                                                                      abs=1e-6)


def test_dtilde_values(exp_pipe):
    assert dtilde(exp_pipe, 0.5) == pytest.approx(-2, abs=1e-6)
    assert dtilde(CurvatureTriple(0, INF), 0.9) == pytest.approx(-10, rel=1e-6)
    assert dtilde(CurvatureTriple(0, 2), 1e-6) == pytest.approx(-0.5, abs=1e-4)
    with pytest.raises(DomainError):
        dtilde(exp_pipe, 0.0)


def test_assumption_A_checks():
    assert check_assumption_A(CurvatureTriple(0, INF, INF)).passed
    rep = check_assumption_A(CurvatureTriple(0, -2, INF))
    assert rep.passed and rep.details["status"] == "proven"
    curved = check_assumption_A(CurvatureTriple(1, INF, INF))
    assert curved.details["status"] == "empirically verified, not proven"


def test_derivative_at_zero_matches_profile(exp_pipe, power_pipe):
    rep = check_derivative_at_zero(exp_pipe, [0.0, 0.25, 0.5, 0.75])
    assert rep.passed
    assert check_derivative_at_zero(power_pipe, [0.5]).passed


@given(st.floats(0.01, 0.99), st.floats(0.0, 0.6), st.floats(0.0, 0.6))
@settings(max_examples=60, deadline=None)
def test_bounds_compose_like_dilations(theta, e1, e2):
    pipe = _EXP_PIPE
    once = pipe.epsilon_bound(pipe.epsilon_bound(theta, e1), e2)
    assert once == pytest.approx(pipe.epsilon_bound(theta, 1 - (1 - e1) * (1 - e2)), abs=1e-6)


@given(st.floats(0.01, 4), st.floats(0.01, 3), st.floats(0.0, 0.9))
@settings(max_examples=60, deadline=None)
def test_exponential_measure_obeys_bound(a, w, eps):
    mu = parse_measure("exponential")
    pipe = _EXP_PIPE
    A = IntervalUnion.interval(a, a + w)
    theta = measure(mu, A)
    assert measure(mu, epsilon_dilate(A, eps).dilated) >= pipe.epsilon_bound(theta, eps) - 1e-8
    start = IntervalUnion.interval(0, w)
    exact = measure(mu, epsilon_dilate(start, eps).dilated)
    assert exact == pytest.approx(pipe.epsilon_bound(measure(mu, start), eps), abs=1e-8)


_EXP_PIPE = build_pipeline(CurvatureTriple(0, INF, INF))
