import math

import numpy as np
import pytest

from seqgauss import hermite

# frozen low-degree values: H2(x) = x^2 - 1, H3(x) = x^3 - 3x,
# physicists' G2(x) = 4x^2 - 2


def test_degree_zero_and_one():
    for x in (-2.0, 0.0, 1.5):
        assert hermite.hermite_prob(0, x) == 1.0
        assert hermite.hermite_prob(1, x) == x
        assert hermite.hermite_phys(0, x) == 1.0
        assert hermite.hermite_phys(1, x) == 2.0 * x


def test_frozen_values():
    assert hermite.hermite_prob(2, 2.0) == pytest.approx(3.0, abs=1e-14)
    assert hermite.hermite_prob(3, 1.0) == pytest.approx(-2.0, abs=1e-14)
    assert hermite.hermite_phys(2, 1.0) == pytest.approx(2.0, abs=1e-14)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        hermite.hermite_prob(-1, 0.0)
    with pytest.raises(ValueError):
        hermite.hermite_phys(-2, 0.0)


def test_recurrence_matches_alternating_sum():
    rng = np.random.default_rng(0)
    for n in range(16):
        for x in rng.uniform(-5.0, 5.0, size=10):
            a = hermite.hermite_prob(n, float(x))
            b = hermite.hermite_prob_sum(n, float(x))
            assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_array_evaluation_matches_scalar():
    xs = np.linspace(-3.0, 3.0, 7)
    vals = hermite.hermite_prob(5, xs)
    assert vals.shape == xs.shape
    for x, v in zip(xs, vals):
        assert v == pytest.approx(hermite.hermite_prob(5, float(x)), rel=1e-14)


def test_convention_cross_relations():
    rng = np.random.default_rng(1)
    for n in range(13):
        for x in rng.uniform(-3.0, 3.0, size=6):
            lhs = hermite.hermite_prob(n, float(x))
            rhs = 2.0 ** (-n / 2) * hermite.hermite_phys(n, float(x) / np.sqrt(2.0))
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
            lhs2 = hermite.hermite_phys(n, float(x))
            rhs2 = 2.0 ** (n / 2) * hermite.hermite_prob(n, np.sqrt(2.0) * float(x))
            assert lhs2 == pytest.approx(rhs2, rel=1e-9, abs=1e-9)


def test_binomial_expansion():
    rng = np.random.default_rng(2)
    for _ in range(100):
        n = int(rng.integers(0, 11))
        theta = rng.uniform(0.0, 2.0 * np.pi)
        alpha, beta = float(np.cos(theta)), float(np.sin(theta))
        x, y = rng.uniform(-3.0, 3.0, size=2)
        lhs = hermite.hermite_prob(n, alpha * x + beta * y)
        rhs = hermite.hermite_binomial_sum(n, alpha, beta, float(x), float(y))
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_binomial_expansion_degenerate_direction():
    # alpha = 0 exercises the 0^0 = 1 convention at k = 0
    x, y = 0.7, -1.3
    for n in range(6):
        lhs = hermite.hermite_prob(n, y)
        rhs = hermite.hermite_binomial_sum(n, 0.0, 1.0, x, y)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_quadrature_rule_invariants():
    rule = hermite.gaussian_quadrature()
    assert (rule.weights > 0).all()
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert hermite.gh_expectation(lambda t: t * t) == pytest.approx(1.0, abs=1e-10)


def test_quadrature_rule_is_cached():
    assert hermite.gaussian_quadrature(32) is hermite.gaussian_quadrature(32)


def test_gh_expectation_orthogonality():
    for n in range(13):
        for m in range(13):
            val = hermite.gh_expectation(
                lambda t: hermite.hermite_prob(n, t) * hermite.hermite_prob(m, t)
            )
            target = float(math.factorial(n)) if n == m else 0.0
            assert val == pytest.approx(target, abs=1e-8 * max(1.0, target))


def test_gh_expectation_centered_polynomials():
    for n in range(1, 13):
        assert hermite.gh_expectation(
            lambda t: hermite.hermite_prob(n, t)
        ) == pytest.approx(0.0, abs=1e-8)


def test_gh_expectation_scalar_only_function():
    val = hermite.gh_expectation(lambda t: math.cos(t))
    assert val == pytest.approx(np.exp(-0.5), abs=1e-6)
