import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilation_lab.errors import DomainError, ExcludedTriple
from dilation_lab.model import (
    CurvatureTriple,
    SConcaveParam,
    c_kappa,
    j_eval,
    j_log,
    j_integral,
    s_kappa,
    s_model_density,
    s_model_epsilon_profile,
)

INF = math.inf


def test_generalized_sine_and_cosine():
    assert s_kappa(0, 3) == pytest.approx(3)
    assert c_kappa(1, math.pi) == pytest.approx(-1)
    assert s_kappa(-1, 1) == pytest.approx(1.175201, abs=1e-6)
    assert s_kappa(4, 0.5) == pytest.approx(math.sin(1) / 2)


@given(st.floats(-1e-9, 1e-9), st.floats(0.1, 2))
def test_small_kappa_is_smooth(kappa, t):
    assert s_kappa(kappa, t) == pytest.approx(t, rel=1e-8)
    assert c_kappa(kappa, t) == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("triple,case", [
    ((1, INF, INF), 1), ((1, INF, 1), 2), ((0, INF, INF), 3), ((1, 2, INF), 4), ((0, 2, INF), 5),
    ((-1, 2, 1), 6), ((1, -2, 1), 7), ((0, -2, INF), 8), ((-1, -2, 1), 9),
])
def test_case_classification(triple, case):
    assert CurvatureTriple(*triple).case == case


@pytest.mark.parametrize("triple", [(-1, 2, INF), (0, 0, 1), (0, 0.5, 1), (-1, -2, 10)])
def test_excluded_triples_refuse(triple):
    t = CurvatureTriple(*triple)
    assert t.case is None and t.excluded_reason
    with pytest.raises(ExcludedTriple):
        t.require_case()


def test_triple_validation_and_delta():
    with pytest.raises(DomainError):
        CurvatureTriple(0, 2, 0)
    with pytest.raises(DomainError):
        CurvatureTriple(INF, 2, 1)
    assert CurvatureTriple(1, 3).delta == 0.5
    assert CurvatureTriple(1, INF).delta is None
    assert CurvatureTriple(1, 3, 2).scaled(2) == CurvatureTriple(0.25, 3, 4)


def test_j_examples():
    assert j_eval(0, CurvatureTriple(0, INF), 5) == 1
    t = np.array([-2.0, -1.0, 0.0, 0.5, 3.0])
    np.testing.assert_allclose(j_eval(1, (0, 2), t), np.maximum(1 + t, 0), atol=1e-15)
    assert j_eval(0, (1, 3), math.sqrt(2) * math.pi / 2) == pytest.approx(0, abs=1e-15)


@given(st.floats(-3, 3), st.sampled_from([(1, 3), (0, 2), (-1, 4), (1, -2), (0, -3), (-1, -1), (2, INF)]))
@settings(max_examples=60)
def test_j_equals_one_at_zero(H, KN):
    assert j_eval(H, KN, 0.0) == pytest.approx(1, abs=1e-15)


@given(st.floats(-2, 2), st.sampled_from([(1, 3), (0, 2), (-1, 4), (1, -2), (0, -3), (-1, -1)]),
       st.floats(-1.5, 1.5))
@settings(max_examples=100)
def test_j_log_matches_base_formula(H, KN, t):
    K, N = KN
    delta = K / (N - 1)
    base = c_kappa(delta, t) + H / (N - 1) * s_kappa(delta, t)
    value = j_log(H, K, N, t)
    if base > 0 and math.isfinite(value):
        assert value == pytest.approx((N - 1) * math.log(base), abs=1e-12, rel=1e-12)
    assert j_eval(H, KN, t) >= 0


def test_j_integral_closed_forms():
    # int_0^1 (1+t) dt and int_0^inf e^{-t} dt
    assert j_integral(1, (0, 2), 0, 1) == pytest.approx(1.5, rel=1e-10)
    assert j_integral(-1, (0, INF), 0, INF) == pytest.approx(1, rel=1e-10)
    assert j_integral(1, (0, INF), 0, INF) == INF


def test_s_model_densities():
    u = s_model_density(1)
    assert u.support == (0, 1) and u.pdf(0.3) == pytest.approx(1)
    e = s_model_density(SConcaveParam(0))
    assert e.pdf(2.0) == pytest.approx(math.exp(-2), rel=1e-10)
    p = s_model_density(-1)
    assert p.pdf(1.0) == pytest.approx(0.25, rel=1e-10)
    assert SConcaveParam(0).log_concave and SConcaveParam(0.5).N == 2
    with pytest.raises(DomainError):
        SConcaveParam(1.5)


def test_s_model_profile_examples():
    assert s_model_epsilon_profile(0, 0.5, 0.5) == pytest.approx(0.75, abs=1e-15)
    assert s_model_epsilon_profile(0.5, 0.0, 0.3) == pytest.approx(0.3, abs=1e-15)
    assert s_model_epsilon_profile(0, 0.4, 0.0) == 0


@given(st.floats(-2, 1), st.floats(0, 0.95), st.floats(0, 0.95), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=150)
def test_s_model_profile_monotone(s, e1, e2, t1, t2):
    lo_e, hi_e = sorted((e1, e2))
    lo_t, hi_t = sorted((t1, t2))
    f = s_model_epsilon_profile
    assert f(s, lo_e, t1) <= f(s, hi_e, t1) + 1e-12
    assert f(s, e1, lo_t) <= f(s, e1, hi_t) + 1e-12
    assert f(s, 0.0, t1) == pytest.approx(t1, abs=1e-12)
    assert f(s, e1, 0.0) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("s", [0.5, 0.25, 0.0, -0.5, -0.25])
@pytest.mark.parametrize("theta", [0.1, 0.5, 0.9])
def test_s_model_profile_slope_at_zero(s, theta):
    h = 1e-5
    slope = (s_model_epsilon_profile(s, h, theta) - theta) / h
    if s == 0:
        want = -(1 - theta) * math.log(1 - theta)
    else:
        N = 1 / s
        want = -N * (1 - theta - (1 - theta) ** (1 - 1 / N))
    assert slope == pytest.approx(want, abs=1e-4)
