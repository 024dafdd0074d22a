import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilation_lab.errors import BracketError, DomainError
from dilation_lab.numerics import Bracket, Tolerance, find_root, integrate, minimize_1d


def test_default_tolerance():
    tol = Tolerance()
    assert (tol.rel, tol.abs, tol.max_iter) == (1e-10, 1e-12, 200)


def test_bad_tolerance_and_bracket_rejected():
    with pytest.raises(DomainError):
        Tolerance(rel=0.0)
    with pytest.raises(DomainError):
        Bracket(1.0, 1.0)


def test_integrate_known_values():
    assert integrate(lambda t: math.exp(-t), 0, math.inf) == pytest.approx(1, abs=1e-10)
    assert integrate(math.sin, 0, math.pi) == pytest.approx(2, abs=1e-10)
    assert integrate(lambda t: 1.0, 0, math.inf) == math.inf


def test_integrate_power_tail_divergence():
    assert integrate(lambda t: 1 / (1 + t), 0, math.inf) == math.inf
    assert integrate(lambda t: 1 / (1 + t) ** 2, 0, math.inf) == pytest.approx(1, abs=1e-9)


@given(st.floats(0.05, 2.95))
@settings(max_examples=30, deadline=None)
def test_integrate_additive_over_splits(c):
    f = lambda t: math.exp(-t) * (1 + math.sin(t) ** 2)
    whole = integrate(f, 0, 3)
    assert integrate(f, 0, c) + integrate(f, c, 3) == pytest.approx(whole, abs=4e-10)


def test_find_root_known_values():
    assert find_root(lambda x: x - 1, (0, 2)) == pytest.approx(1, abs=1e-12)
    assert find_root(lambda x: math.exp(-x) - 0.5, (0, 2)) == pytest.approx(math.log(2), abs=1e-11)
    assert find_root(math.cos, Bracket(1, 2)) == pytest.approx(math.pi / 2, abs=1e-11)


def test_find_root_needs_sign_change():
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1, (0, 1))


@given(st.floats(-3, 3), st.floats(0.5, 4))
@settings(max_examples=40, deadline=None)
def test_find_root_residual_small(c, k):
    g = lambda x: math.tanh(k * (x - c))
    r = find_root(g, (-5, 5))
    assert abs(g(r)) <= 10 * Tolerance().abs


def test_minimize_known_values():
    x, v = minimize_1d(lambda x: (x - 1) ** 2, (0, 3))
    assert x == pytest.approx(1, abs=1e-5) and v == pytest.approx(0, abs=1e-10)
    x, v = minimize_1d(lambda x: x, (0, 1))
    assert (x, v) == (pytest.approx(0, abs=1e-12), pytest.approx(0, abs=1e-12))
    x, v = minimize_1d(math.sin, (0, 2 * math.pi))
    assert x == pytest.approx(3 * math.pi / 2, abs=1e-5) and v == pytest.approx(-1, abs=1e-10)


@given(st.floats(0.5, 6), st.floats(0, 6.3))
@settings(max_examples=30, deadline=None)
def test_minimize_never_beaten_by_samples(freq, phase):
    h = lambda x: math.sin(freq * x + phase) + 0.1 * x
    _, v = minimize_1d(h, (0, 4))
    xs = np.random.default_rng(0).uniform(0, 4, 1000)
    assert v <= min(h(x) for x in xs) + 1e-12
