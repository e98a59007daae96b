"""Occupation-time MGF: closed form vs simulation, ODE residual, gradient."""
from __future__ import annotations

import math

import numpy as np
import pytest

from triggercds import (
    MGFQuery,
    NumericRangeError,
    ValidationError,
    build_A,
    generator,
    mgf,
)
from triggercds.montecarlo import MCConfig, mgf_estimate, occupation_sample

from conftest import random_chain, single_state_chain


class TestBuildA:
    def test_zero_weights_give_generator(self, chain4):
        np.testing.assert_array_equal(build_A(chain4, np.zeros(4)), generator(chain4))

    def test_single_state(self):
        A = build_A(single_state_chain(), np.array([-1.5]))
        np.testing.assert_array_equal(A, [[-1.5]])

    def test_example_chain_first_row(self, chain4):
        # u_1 - v_1 = -1 - 3 on the diagonal, v_1 p_1k = 1 elsewhere
        A = build_A(chain4, np.array([-1.0, -2.0, -3.0, -4.0]))
        np.testing.assert_allclose(A[0], [-4.0, 1.0, 1.0, 1.0])

    def test_dimension_mismatch(self, chain4):
        with pytest.raises(ValidationError):
            build_A(chain4, np.zeros(3))


class TestMGF:
    def test_zero_weights_give_one(self, chain4):
        np.testing.assert_allclose(mgf(chain4, np.zeros(4), 3.7), 1.0, atol=1e-12)

    def test_constant_weights_give_scalar_exponential(self, chain4):
        # occupation times partition [0, t], so u = c 1 gives e^{c t}
        for c, t in [(-0.3, 2.0), (0.4, 1.5), (-2.0, 5.0)]:
            np.testing.assert_allclose(
                mgf(chain4, np.full(4, c), t), math.exp(c * t), rtol=1e-12
            )

    def test_at_time_zero_is_one(self, chain4):
        rng = np.random.default_rng(8)
        for _ in range(5):
            u = rng.uniform(-3.0, 1.0, size=4)
            np.testing.assert_array_equal(mgf(chain4, u, 0.0), np.ones(4))

    def test_matches_simulation(self, chain4):
        u = np.array([-0.05, -0.10, -0.15, -0.20])
        t = 5.0
        analytic = float(mgf(chain4, u, t)[0])
        est = mgf_estimate(
            chain4, u, 0, t, MCConfig(paths=1_000_000, seed=515, horizon=t)
        )
        assert abs(est.mean - analytic) <= 3.0 * est.std_error

    def test_monotone_in_u(self, chain4):
        rng = np.random.default_rng(9)
        for _ in range(20):
            u = rng.uniform(-2.0, 0.5, size=4)
            bump = rng.uniform(0.0, 0.5, size=4)
            t = rng.uniform(0.1, 4.0)
            lo = mgf(chain4, u, t)
            hi = mgf(chain4, u + bump, t)
            assert np.all(hi >= lo - 1e-12)

    def test_ode_residual(self, chain4):
        # d/dt Psi = A Psi checked by central differences
        rng = np.random.default_rng(10)
        h = 1e-5
        for _ in range(20):
            u = rng.uniform(-2.0, 0.5, size=4)
            t = rng.uniform(0.1, 4.0)
            A = build_A(chain4, u)
            diff = (mgf(chain4, u, t + h) - mgf(chain4, u, t - h)) / (2 * h)
            residual = np.abs(diff - A @ mgf(chain4, u, t)).max()
            assert residual <= 1e-6

    def test_gradient_at_zero_sums_to_t(self, chain4):
        # sum_j dPsi_i/du_j at u = 0 equals E[sum_j T_ij] = t
        t = 2.3
        h = 1e-5
        grad_sum = np.zeros(4)
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            grad_sum += (mgf(chain4, e, t) - mgf(chain4, -e, t)) / (2 * h)
        np.testing.assert_allclose(grad_sum, t, atol=1e-6)

    def test_gradient_at_zero_matches_expected_occupation(self, chain4):
        t = 2.3
        h = 1e-5
        occ, _ = occupation_sample(
            chain4, 0, t, MCConfig(paths=200_000, seed=616, horizon=t)
        )
        mean = occ.mean(axis=0)
        se = occ.std(axis=0, ddof=1) / math.sqrt(occ.shape[0])
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            grad = (mgf(chain4, e, t)[0] - mgf(chain4, -e, t)[0]) / (2 * h)
            assert abs(grad - mean[j]) <= 3.0 * se[j] + 1e-6

    def test_rk_fallback_cross_validates_closed_form(self, chain4):
        rng = np.random.default_rng(11)
        for _ in range(5):
            u = rng.uniform(-2.0, 0.3, size=4)
            t = rng.uniform(0.5, 5.0)
            np.testing.assert_allclose(
                mgf(chain4, u, t, method="rk"),
                mgf(chain4, u, t, method="expm"),
                rtol=1e-7,
                atol=1e-9,
            )

    def test_overflow_guard(self):
        spec = single_state_chain()
        with pytest.raises(NumericRangeError):
            mgf(spec, np.array([1e6]), 1e3)

    def test_unknown_method(self, chain4):
        with pytest.raises(ValidationError):
            mgf(chain4, np.zeros(4), 1.0, method="euler")

    def test_random_chains_identities(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            spec = random_chain(rng)
            t = rng.uniform(0.1, 3.0)
            c = rng.uniform(-1.0, 0.5)
            np.testing.assert_allclose(mgf(spec, np.zeros(spec.M), t), 1.0, atol=1e-10)
            np.testing.assert_allclose(
                mgf(spec, np.full(spec.M, c), t), math.exp(c * t), rtol=1e-10
            )


class TestMGFQuery:
    def test_validation(self):
        with pytest.raises(ValidationError):
            MGFQuery(u=np.array([np.inf]), t=1.0, i0=0)
        with pytest.raises(ValidationError):
            MGFQuery(u=np.zeros(2), t=-1.0, i0=0)
        q = MGFQuery(u=np.zeros(2), t=1.0, i0=1)
        assert q.i0 == 1
