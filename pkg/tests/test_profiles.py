import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilation_lab.density import parse_measure
from dilation_lab.errors import DomainError, ExcludedTriple
from dilation_lab.measure1d import brute_force_profile
from dilation_lab.model import CurvatureTriple
from dilation_lab.profiles import (
    ProfileTable,
    cdd_profile_case,
    cdd_profile_case_details,
    cdd_profile_general,
    check_boundary_monotone,
    check_concavity,
    check_shift_monotonicity,
    closed_form_profile,
    flat_profile,
    gaussian_profile,
    profile_table,
)

INF = math.inf
HALF_EXP = 0.5 * math.log(2)
HALF_POWER = 2 * (math.sqrt(0.5) - 0.5)


def test_flat_profile_examples():
    assert flat_profile(lambda t: np.exp(-t), (0, INF), 0.5) == pytest.approx(HALF_EXP, abs=1e-10)
    assert flat_profile(lambda t: -t, (-1, 0), 0.5) == pytest.approx(HALF_POWER, abs=1e-10)
    th = np.linspace(0, 1, 11)
    np.testing.assert_allclose(flat_profile(lambda t: np.ones_like(t), (0, 3), th), th, atol=1e-12)


def test_flat_profile_rejects_non_integrable():
    with pytest.raises(DomainError):
        flat_profile(lambda t: np.ones_like(t), (0, INF), 0.5)


@given(st.floats(0.2, 5), st.floats(0.01, 0.99))
@settings(max_examples=40, deadline=None)
def test_flat_profile_scale_invariance(lam, theta):
    f = lambda t: np.exp(-t) * (1 + t)
    base = flat_profile(f, (0, 4), theta)
    assert flat_profile(lambda t: f(lam * t), (0, 4 / lam), theta) == pytest.approx(base, abs=1e-10)


def test_general_profile_examples():
    assert cdd_profile_general(CurvatureTriple(0, INF, INF), 0.5) == pytest.approx(HALF_EXP, abs=1e-4)
    assert cdd_profile_general(CurvatureTriple(0, 2, INF), 0.5) == pytest.approx(HALF_POWER, abs=1e-4)
    assert cdd_profile_general(CurvatureTriple(0, 0, 3), 0.4) == 0


def test_case_profile_examples():
    assert cdd_profile_case(CurvatureTriple(0, INF), 0.5) == pytest.approx(0.346574, abs=1e-6)
    assert cdd_profile_case(CurvatureTriple(0, 2), 0.5) == pytest.approx(0.414214, abs=1e-6)
    assert cdd_profile_case(CurvatureTriple(1, 2), 0.5) <= math.pi / 4 + 1e-12
    assert cdd_profile_case(CurvatureTriple(1, 2), np.array([0.0, 1.0])).tolist() == [0, 0]


def test_excluded_triples_refuse_case_formulas():
    with pytest.raises(ExcludedTriple):
        cdd_profile_case(CurvatureTriple(-1, 2, INF), 0.5)
    with pytest.raises(ExcludedTriple):
        cdd_profile_general(CurvatureTriple(0, 0.5, 1), 0.5)


def test_case_details_report_branch():
    res = cdd_profile_case_details(CurvatureTriple(1, INF, INF), [0.5])
    assert res.case == 1 and res.branch[0] is not None


def test_gaussian_profile_values():
    assert gaussian_profile(0.0) == 0 and gaussian_profile(1.0) == 0
    # independent route: (4/sqrt(2 pi)) e^{-a^2/2} a at the 3rd quartile a
    a = 0.6744897501960817
    assert gaussian_profile(0.5) == pytest.approx(4 / math.sqrt(2 * math.pi) * math.exp(-a * a / 2) * a,
                                                  abs=1e-12)
    assert gaussian_profile(0.5) == pytest.approx(0.8573481645, abs=1e-9)
    assert gaussian_profile(1 - 1e-12) < 1e-9


def test_gaussian_profile_against_brute_force():
    mu = parse_measure("gaussian:1")
    for theta in (0.2, 0.5, 0.8):
        g = gaussian_profile(theta)
        assert g == pytest.approx(brute_force_profile(mu, theta, k_max=1), abs=1e-3)
        assert g <= brute_force_profile(mu, theta, k_max=2, resolution=300) + 1e-3


def test_dimension_ordering_at_fixed_theta():
    vals = [closed_form_profile(N, 0.5) for N in (2, 5, INF, -5, -2)]
    np.testing.assert_allclose(vals, [0.414214, 0.371746, 0.346574, 0.323624, 0.292893], atol=1e-6)
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("triple", [(1, INF, INF), (1, 2, INF), (-1, 2, 1), (1, -2, 1), (-1, -2, 1.4)])
@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_case_profile_scale_invariance(triple, lam):
    t = CurvatureTriple(*triple)
    th = np.array([0.2, 0.5, 0.8])
    np.testing.assert_allclose(cdd_profile_case(t.scaled(lam), th), cdd_profile_case(t, th), atol=1e-6)


@pytest.mark.parametrize("K,N", [(0, INF), (0, 3), (0, -3)])
def test_zero_curvature_profiles_do_not_depend_on_diameter(K, N):
    th = np.array([0.3, 0.7])
    base = cdd_profile_case(CurvatureTriple(K, N, INF), th)
    for D in (0.5, 3.0):
        np.testing.assert_allclose(cdd_profile_case(CurvatureTriple(K, N, D), th), base, atol=1e-12)


@pytest.mark.parametrize("preset,triple", [("exponential", (0, INF, INF)), ("uniform:1", (0, 2, 1)),
                                         ("gaussian:1", (1, INF, INF))])
def test_profile_is_a_lower_bound_for_presets(preset, triple):
    mu = parse_measure(preset)
    t = CurvatureTriple(*triple)
    for theta in (0.25, 0.5, 0.75):
        assert brute_force_profile(mu, theta) >= cdd_profile_general(t, theta) - 1e-3


def test_concavity_checks():
    th = np.linspace(0.02, 0.98, 49)
    exp_table = ProfileTable("exp", th, flat_profile(lambda t: np.exp(-t), (0, INF), th), "flat")
    gauss_table = ProfileTable("gauss", th, flat_profile(lambda t: np.exp(-t * t / 2), (0, INF), th), "flat")
    control = ProfileTable("control", th, th * (1 - th) ** 2, "flat")
    assert check_concavity(exp_table).passed
    assert check_concavity(gauss_table).passed
    assert not check_concavity(control).passed


def test_shift_monotonicity_checks():
    xs = np.linspace(0.3, 3.0, 12)
    assert check_shift_monotonicity(np.sin, 0.0, xs, 0.5).passed
    assert check_shift_monotonicity(lambda t: (t + 1.0) ** -2, 0.0, xs, 0.5).passed
    rep = check_shift_monotonicity(lambda t: np.ones_like(np.asarray(t, dtype=float)), 0.0, xs, 0.5)
    assert rep.passed and rep.details["profile"] == "constant"


def test_boundary_monotone_checks():
    mu = parse_measure("exponential")
    assert check_boundary_monotone(mu, [1.0]).passed
    assert math.exp(-1) <= mu.mass(0.0, 1.0)
    assert check_boundary_monotone(parse_measure("linear"), [0.2, 0.5, 0.9]).passed
    assert check_boundary_monotone(parse_measure("uniform:1"), [0.3, 0.6]).passed


def test_profile_table_round_trip():
    table = profile_table(CurvatureTriple(0, INF), [0.1, 0.5, 0.9])
    again = ProfileTable.from_csv(table.to_csv(), table.descriptor)
    np.testing.assert_allclose(again.values, table.values, rtol=1e-8)
    assert again.method == "cdd-case"
    with pytest.raises(DomainError):
        ProfileTable("bad", [0.5, 0.2], [0.1, 0.1], "flat")
