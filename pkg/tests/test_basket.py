"""Ordered-default coefficients, kth-to-default CDF, premiums and sweeps."""
from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from scipy.stats import binom

from triggercds import (
    BasketContract,
    DegenerateParameterError,
    PrecisionWarning,
    ValidationError,
    coefficients,
    kth_default_cdf,
    premium,
    sweep,
    y_vector,
)
from triggercds.montecarlo import MCConfig, kth_default_cdf_estimates

from conftest import single_state_chain

B_GRID = [0.0, 0.05, 0.1, 0.15, 0.3, 0.35, 0.4, 0.45]
C_GRID = [0.5, 1.0, 2.0]


def _contract(chain, k: int = 1, b: float = 0.1, c: float = 1.0) -> BasketContract:
    return BasketContract(
        n=10, b=b, c=c, r=0.05, T=5.0, k=k, chain=chain, i0=0
    )


def _binomial_kth_cdf(n: int, k: int, rate: float, t: float) -> float:
    """Order statistic of n iid Exp(rate): P(tau_k <= t)."""
    q = 1.0 - math.exp(-rate * t)
    return float(binom.sf(k - 1, n, q))


class TestCoefficients:
    def test_first_row_is_n(self):
        assert coefficients(10, 0.1).row(1).tolist() == [10.0]

    def test_ordered_rate_values(self):
        beta = coefficients(10, 0.1).beta
        np.testing.assert_allclose(
            beta, [10.0, 9.9, 9.6, 9.1, 8.4, 7.5, 6.4, 5.1, 3.6, 1.9], rtol=1e-14
        )

    def test_one_recursion_step_by_hand(self):
        row = coefficients(10, 0.1).row(2)
        # alpha_{2,0} = 10 * 9.9 / (9.9 - 10), alpha_{2,1} closes the row
        assert row[0] == pytest.approx(-990.0, rel=1e-12)
        assert row[1] == pytest.approx(990.0, rel=1e-12)
        assert row[0] / 10.0 + row[1] / 9.9 == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("b", B_GRID)
    def test_row_identities(self, b):
        # both identities are exact in rational arithmetic; in floats the
        # deviation is bounded relative to the summand scale (the alphas
        # cancel massively, e.g. +-8.8e8 at b=0.15)
        coeffs = coefficients(10, b)
        for k in range(1, 11):
            row = coeffs.row(k)
            terms = [row[j] / coeffs.beta[j] for j in range(k)]
            scale = max(1.0, max(abs(t) for t in terms))
            assert abs(math.fsum(terms) - 1.0) <= 1e-8 * scale
            if k >= 2:
                assert abs(math.fsum(row)) <= 1e-8 * float(np.abs(row).max())

    @pytest.mark.parametrize("b", [0.0, 0.1, 0.15, 0.45])
    def test_recursion_against_exact_rational_arithmetic(self, b):
        from fractions import Fraction

        n = 10
        bF = Fraction(b)
        betaF = [(n - j) * (1 + j * bF) for j in range(n)]
        rowsF = [[Fraction(n)]]
        for k in range(1, n):
            prev = rowsF[-1]
            nxt = [prev[j] * betaF[k] / (betaF[k] - betaF[j]) for j in range(k)]
            nxt.append(-sum(nxt))
            rowsF.append(nxt)
        # identities hold exactly over the rationals
        for k in range(2, n + 1):
            assert sum(rowsF[k - 1]) == 0
            assert sum(a / be for a, be in zip(rowsF[k - 1], betaF)) == 1
        # float recursion tracks the exact values tightly; closing entries
        # inherit absolute error ~eps * max|row| from the cancelling sum
        coeffs = coefficients(n, b)
        for k in range(1, n + 1):
            row = coeffs.row(k)
            scale = float(np.abs(row).max())
            for got, exact in zip(row, rowsF[k - 1]):
                want = float(exact)
                assert abs(got - want) <= 1e-12 * scale + 1e-12 * abs(want)

    def test_collision_rejected_with_pair_named(self):
        with pytest.raises(DegenerateParameterError, match="1/2"):
            coefficients(10, 0.5)
        with pytest.raises(DegenerateParameterError, match="1/4"):
            coefficients(10, 0.25)

    def test_tolerance_window(self):
        with pytest.raises(DegenerateParameterError):
            coefficients(10, 1.0 / 3.0 + 5e-10)
        coefficients(10, 1.0 / 3.0 + 5e-8)  # outside the window


class TestYVector:
    def test_saturating_fatality(self, chain4):
        np.testing.assert_allclose(y_vector(chain4, 1e8), chain4.x, rtol=1e-12)

    def test_zero_state_value(self):
        chain = single_state_chain(0.0)
        assert y_vector(chain, 1.0)[0] == 0.0

    def test_example_value(self, chain4):
        y = y_vector(chain4, 1.0)
        assert y[0] == pytest.approx(0.1 * (1 - math.exp(-0.1)), rel=1e-14)
        assert y[0] == pytest.approx(0.00951626, abs=5e-9)
        assert np.all(y >= 0) and np.all(y <= chain4.x)


class TestKthDefaultCdf:
    def test_at_zero(self, chain4):
        assert kth_default_cdf(_contract(chain4, k=3), 0.0) == 0.0

    @pytest.mark.parametrize("k", range(1, 11))
    def test_binomial_order_statistic_oracle(self, k):
        # b = 0 and a frozen single-state chain: iid exponentials. Deep-tail
        # values (~1e-12 at k=10, t=1) legitimately warn about relative
        # precision; the oracle comparison is absolute.
        chain = single_state_chain(0.3)
        rate = 0.3 * (1 - math.exp(-1.0 * 0.3))
        con = BasketContract(
            n=10, b=0.0, c=1.0, r=0.05, T=5.0, k=k, chain=chain, i0=0
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)
            for t in (1.0, 2.0, 3.0, 4.0, 5.0):
                want = _binomial_kth_cdf(10, k, rate, t)
                assert kth_default_cdf(con, t) == pytest.approx(want, abs=1e-10)

    def test_matches_simulation_on_example_fixture(self, chain4):
        config = MCConfig(paths=100_000, seed=2024, horizon=5.0)
        estimates = kth_default_cdf_estimates(_contract(chain4), 5.0, config)
        for k in range(1, 11):
            analytic = kth_default_cdf(_contract(chain4, k=k), 5.0)
            est = estimates[k - 1]
            slack = 3.0 * est.std_error + 1e-12
            assert abs(est.mean - analytic) <= slack, k

    def test_monotone_in_t_and_k(self, chain4):
        grid = np.linspace(0.0, 8.0, 17)
        prev_curve = None
        for k in (1, 2, 5, 9, 10):
            con = _contract(chain4, k=k)
            curve = [kth_default_cdf(con, t) for t in grid]
            assert all(a <= b + 1e-12 for a, b in zip(curve, curve[1:]))
            assert all(0.0 <= v <= 1.0 + 1e-12 for v in curve)
            if prev_curve is not None:
                assert all(h <= l + 1e-10 for l, h in zip(prev_curve, curve))
            prev_curve = curve

    def test_cancellation_warning_near_degeneracy_gate(self, chain4):
        # b just outside the 1e-9 rejection window around 1/2: alphas blow
        # up to ~1e15 and the compensated sum reports the precision loss
        con = _contract(chain4, k=10, b=0.5 + 2e-9)
        with pytest.warns(PrecisionWarning):
            kth_default_cdf(con, 5.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            kth_default_cdf(_contract(chain4, k=10), 5.0)  # clean b stays quiet


class TestPremium:
    def test_first_to_default_ignores_contagion(self, chain4):
        values = {b: premium(_contract(chain4, k=1, b=b)) for b in B_GRID}
        baseline = values[0.0]
        for b, val in values.items():
            assert abs(val - baseline) <= 1e-12

    def test_zero_rate_is_cdf(self, chain4):
        con = BasketContract(
            n=10, b=0.1, c=1.0, r=0.0, T=5.0, k=4, chain=chain4, i0=0
        )
        assert premium(con) == kth_default_cdf(con, 5.0)

    def test_binomial_fixture(self):
        chain = single_state_chain(0.3)
        rate = 0.3 * (1 - math.exp(-1.0 * 0.3))
        con = BasketContract(
            n=10, b=0.0, c=1.0, r=0.05, T=5.0, k=3, chain=chain, i0=0
        )
        want = math.exp(-0.05 * 5.0) * _binomial_kth_cdf(10, 3, rate, 5.0)
        assert premium(con) == pytest.approx(want, abs=1e-10)

    def test_bounded_by_discount_factor(self, chain4):
        for k in (1, 5, 10):
            val = premium(_contract(chain4, k=k))
            assert 0.0 <= val <= math.exp(-0.05 * 5.0)


class TestContractValidation:
    def test_b_collision(self, chain4):
        with pytest.raises(DegenerateParameterError):
            _contract(chain4, b=0.5)

    def test_seniority_range(self, chain4):
        with pytest.raises(ValidationError):
            BasketContract(n=10, b=0.1, c=1.0, r=0.05, T=5.0, k=11, chain=chain4, i0=0)
        with pytest.raises(ValidationError):
            BasketContract(n=10, b=0.1, c=1.0, r=0.05, T=5.0, k=0, chain=chain4, i0=0)

    def test_bad_shape_and_state(self, chain4):
        with pytest.raises(ValidationError):
            BasketContract(n=10, b=0.1, c=0.0, r=0.05, T=5.0, k=1, chain=chain4, i0=0)
        with pytest.raises(ValidationError):
            BasketContract(n=10, b=0.1, c=1.0, r=0.05, T=5.0, k=1, chain=chain4, i0=7)


class TestSweep:
    def test_single_point_grid_matches_premium(self, chain4):
        result = sweep(_contract(chain4), [0.1], [1.0])
        assert len(result.rows) == 10
        for k, b, c, val in result.rows:
            assert val == pytest.approx(
                premium(_contract(chain4, k=k, b=b, c=c)), rel=1e-12
            )

    def test_degenerate_points_skipped_with_reason(self, chain4):
        result = sweep(_contract(chain4), [0.1, 0.5, 0.25, 0.2], C_GRID)
        skipped_b = [b for b, _ in result.skipped]
        assert skipped_b == [0.5, 0.25, 0.2]
        assert all("1/" in reason for _, reason in result.skipped)
        assert len(result.rows) == 10 * len(C_GRID)  # only b = 0.1 remains

    def test_full_grid_shape_and_order(self, chain4):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)  # deep-tail rows
            result = sweep(_contract(chain4), B_GRID, C_GRID)
        assert len(result.rows) == 10 * len(B_GRID) * len(C_GRID)
        assert not result.skipped
        # deterministic ordering: b outer, c inner, k innermost
        expect = [
            (k, b, c)
            for b in B_GRID
            for c in C_GRID
            for k in range(1, 11)
        ]
        assert [(k, b, c) for k, b, c, _ in result.rows] == expect

    def test_premium_monotone_in_contagion_and_fatality(self, chain4):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)  # deep-tail rows
            result = sweep(_contract(chain4), B_GRID, C_GRID)
        table = {(k, b, c): s for k, b, c, s in result.rows}
        for c in C_GRID:
            for k in range(2, 11):
                values = [table[(k, b, c)] for b in B_GRID]
                assert all(x <= y + 1e-12 for x, y in zip(values, values[1:])), (k, c)
        for b in B_GRID:
            for k in range(1, 11):
                values = [table[(k, b, c)] for c in C_GRID]
                assert all(x <= y + 1e-12 for x, y in zip(values, values[1:])), (k, b)

    def test_empty_grid_rejected(self, chain4):
        with pytest.raises(ValidationError):
            sweep(_contract(chain4), [], C_GRID)
