"""Matrix exponential kernel: examples, oracles and analytic properties."""
from __future__ import annotations

import math

import numpy as np
import pytest

from triggercds import (
    NumericRangeError,
    ValidationError,
    exp_action,
    expm,
    generator,
    integral_action,
)
from triggercds.montecarlo import MCConfig, occupation_sample


def _taylor_exp_action(A: np.ndarray, w: np.ndarray, t: float, terms: int = 30):
    """Truncated series sum_k (A t)^k w / k! — independent reference for
    small ||A t||."""
    acc = w.astype(float).copy()
    term = w.astype(float).copy()
    for k in range(1, terms + 1):
        term = (A @ term) * (t / k)
        acc += term
    return acc


class TestExpm:
    def test_zero_matrix_gives_identity(self):
        np.testing.assert_array_equal(expm(np.zeros((3, 3)), 2.0), np.eye(3))

    def test_t_zero_is_identity_exactly(self):
        A = np.array([[1.0, 2.0], [3.0, -4.0]])
        np.testing.assert_array_equal(expm(A, 0.0), np.eye(2))

    def test_scalar_exponential(self):
        a, t = -0.7, 2.5
        out = expm(np.array([[a]]), t)
        assert out[0, 0] == pytest.approx(math.exp(a * t), rel=1e-14)

    def test_chain_generator_exponential_is_stochastic(self, chain4):
        E = expm(generator(chain4), 1.0)
        np.testing.assert_allclose(E.sum(axis=1), 1.0, atol=1e-10)
        assert np.all(E >= 0)

    def test_transition_probabilities_match_simulation(self, chain4):
        # empirical terminal-state frequencies over 1e6 paths vs e^{Q t}
        E = expm(generator(chain4), 1.0)
        _, term = occupation_sample(
            chain4, 0, 1.0, MCConfig(paths=1_000_000, seed=3111, horizon=1.0)
        )
        n = term.shape[0]
        for j in range(4):
            freq = float((term == j).mean())
            se = math.sqrt(max(freq * (1 - freq), 1e-12) / n)
            assert abs(freq - E[0, j]) <= 3.0 * se

    def test_overflow_raises_numeric_range_error(self):
        with pytest.raises(NumericRangeError):
            expm(np.array([[1000.0]]), 10.0)

    def test_validation(self):
        with pytest.raises(ValidationError):
            expm(np.ones((2, 3)), 1.0)
        with pytest.raises(ValidationError):
            expm(np.full((2, 2), np.nan), 1.0)
        with pytest.raises(ValidationError):
            expm(np.eye(2), -1.0)
        with pytest.raises(ValidationError):
            expm(np.eye(65), 1.0)


class TestExpAction:
    def test_zero_vector(self):
        A = np.array([[1.0, -2.0], [0.5, 0.0]])
        np.testing.assert_array_equal(exp_action(A, np.zeros(2), 3.0), np.zeros(2))

    def test_zero_matrix_returns_w(self):
        w = np.array([1.0, -2.0, 0.25])
        np.testing.assert_array_equal(exp_action(np.zeros((3, 3)), w, 5.0), w)

    def test_matches_expm_product_and_taylor_series(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            A = rng.uniform(-1.0, 1.0, size=(4, 4))
            w = rng.uniform(-1.0, 1.0, size=4)
            t = rng.uniform(0.0, 1.0)
            got = exp_action(A, w, t)
            np.testing.assert_allclose(got, expm(A, t) @ w, rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(
                got, _taylor_exp_action(A, w, t), rtol=1e-10, atol=1e-12
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            exp_action(np.eye(3), np.ones(2), 1.0)


class TestIntegralAction:
    def test_t_zero_is_zero(self):
        B = np.array([[1.0, 2.0], [0.0, -1.0]])
        np.testing.assert_array_equal(integral_action(B, np.ones(2), 0.0), np.zeros(2))

    def test_zero_matrix_gives_linear_growth(self):
        y = np.array([2.0, -0.5])
        np.testing.assert_allclose(
            integral_action(np.zeros((2, 2)), y, 3.0), 3.0 * y, rtol=1e-12
        )

    def test_scalar_antiderivative(self):
        beta, T = 0.8, 2.5
        got = integral_action(np.array([[-beta]]), np.array([1.0]), T)
        assert got[0] == pytest.approx((1 - math.exp(-beta * T)) / beta, rel=1e-12)

    def test_singular_matrix_is_fine(self):
        # B with a zero eigenvalue: the augmented device needs no inverse
        B = np.array([[0.0, 0.0], [1.0, -1.0]])
        got = integral_action(B, np.array([1.0, 0.0]), 2.0)
        # first component integrates a constant row: exactly T
        assert got[0] == pytest.approx(2.0, rel=1e-12)


class TestProperties:
    def test_semigroup(self):
        rng = np.random.default_rng(314)
        A = rng.uniform(-10.0, 10.0, size=(4, 4))
        for _ in range(100):
            s = rng.uniform(0.0, 1.0)
            t = rng.uniform(0.0, 1.0)
            left = expm(A, s + t)
            right = expm(A, s) @ expm(A, t)
            scale = max(np.abs(left).max(), 1.0)
            assert np.abs(left - right).max() <= 1e-9 * scale

    def test_time_derivative_central_difference(self):
        rng = np.random.default_rng(217)
        h = 1e-5
        for _ in range(10):
            A = rng.uniform(-1.0, 1.0, size=(4, 4))
            w = rng.uniform(-1.0, 1.0, size=4)
            t = rng.uniform(0.1, 2.0)
            diff = (exp_action(A, w, t + h) - exp_action(A, w, t - h)) / (2 * h)
            exact = A @ exp_action(A, w, t)
            # truncation is O(h^2 ||A||^3), roundoff O(eps/h)
            assert np.abs(diff - exact).max() <= 1e-7

    def test_integral_derivative_recovers_integrand(self):
        rng = np.random.default_rng(218)
        h = 1e-5
        for _ in range(10):
            B = rng.uniform(-2.0, 2.0, size=(3, 3))
            y = rng.uniform(-1.0, 1.0, size=3)
            T = rng.uniform(0.2, 2.0)
            diff = (integral_action(B, y, T + h) - integral_action(B, y, T - h)) / (
                2 * h
            )
            np.testing.assert_allclose(diff, exp_action(B, y, T), atol=1e-6)
