import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si

from dilation_lab.density import compile_expression, from_expression, parse_measure
from dilation_lab.errors import DomainError
from dilation_lab.intervals import IntervalUnion

PRESETS = ["exponential", "laplace", "gaussian:1", "gaussian:2", "s-concave:-1", "s-concave:0.5",
           "power:3", "sin-power:1,3", "cosh-power:1,-2", "sinh-power:-1,3", "uniform:1", "linear",
           "psi:x^2/2 + x^4@-inf,inf"]


@pytest.mark.parametrize("preset", PRESETS)
def test_presets_are_normalized(preset):
    mu = parse_measure(preset)
    lo, hi = mu.support
    total = si.quad(lambda x: float(mu.pdf(x)), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    assert total == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("preset", PRESETS)
def test_dpsi_matches_finite_differences(preset):
    mu = parse_measure(preset)
    xs = mu.ppf(np.linspace(0.02, 0.98, 100))
    h = 1e-6
    fd = (mu.psi(xs + h) - mu.psi(xs - h)) / (2 * h)
    assert np.all(np.abs(mu.dpsi(xs) - fd) <= 1e-4 * (1 + np.abs(fd)))


@pytest.mark.parametrize("preset", ["exponential", "gaussian:1", "s-concave:-1", "sin-power:1,3"])
def test_cdf_and_ppf_are_inverse(preset):
    mu = parse_measure(preset)
    p = np.linspace(0.001, 0.999, 50)
    np.testing.assert_allclose(mu.cdf(mu.ppf(p)), p, atol=1e-10)
    np.testing.assert_allclose(mu.cdf(p) + mu.sf(p), 1, atol=1e-12)


def test_known_closed_forms():
    assert parse_measure("exponential").cdf(math.log(2)) == pytest.approx(0.5, abs=1e-14)
    assert parse_measure("gaussian:1").ppf(0.75) == pytest.approx(0.6744897501960817, abs=1e-10)
    assert parse_measure("laplace").pdf(0.0) == pytest.approx(0.5)


def test_expression_grammar():
    g, dg = compile_expression("x^2/2 + exp(-x)")
    assert g(1.0) == pytest.approx(0.5 + math.exp(-1))
    assert dg(1.0) == pytest.approx(1 - math.exp(-1))
    mu = from_expression("x", 0, math.inf)
    assert mu.cdf(1.0) == pytest.approx(1 - math.exp(-1), abs=1e-10)


@pytest.mark.parametrize("preset", ["nosuch", "psi:x", "gaussian:1,2,3", "psi:import os@0,1"])
def test_bad_measure_specs_rejected(preset):
    with pytest.raises(DomainError):
        parse_measure(preset)


def test_interval_union_merges_and_round_trips():
    A = IntervalUnion.from_pairs([(2, 3), (0, 1), (0.5, 1.5), (3, 4)])
    assert A.components == ((0, 1.5), (2, 4))
    assert IntervalUnion.from_json(A.to_json()) == A
    B = IntervalUnion.from_json('[[0, "inf"]]')
    assert B.components == ((0, math.inf),)
    assert A.length() == 3.5 and IntervalUnion().length() == 0
    assert A.covered_length(1, 3) == pytest.approx(1.5)
    assert list(A.contains([0.2, 1.8, 4.0])) == [True, False, True]
    assert A.intersect(1, 2.5).components == ((1, 1.5), (2, 2.5))


def test_interval_union_validation():
    with pytest.raises(DomainError):
        IntervalUnion(((0, 1), (1, 2)))
    with pytest.raises(DomainError):
        IntervalUnion(((1, 0),))


pairs = st.lists(st.tuples(st.floats(-5, 5), st.floats(0, 2)), max_size=5).map(
    lambda ps: IntervalUnion.from_pairs([(a, a + w) for a, w in ps]))


@given(pairs, pairs)
@settings(max_examples=100)
def test_union_contains_both_parts(A, B):
    U = A.union(B)
    assert A.is_subset(U) and B.is_subset(U)
    assert U.length() <= A.length() + B.length() + 1e-12
