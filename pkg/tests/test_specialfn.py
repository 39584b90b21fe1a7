import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from smallslice import specialfn as sf


class TestLogGamma:
    def test_known_values(self):
        assert sf.log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert sf.log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)
        assert sf.log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-13)

    def test_relative_error_on_contract_interval(self):
        xs = np.linspace(0.5, 200.0, 4001)
        ours = np.array([sf.log_gamma(x) for x in xs])
        ref = gammaln(xs)
        scale = np.maximum(np.abs(ref), 1.0)
        assert np.max(np.abs(ours - ref) / scale) < 1e-12

    def test_domain_errors(self):
        for bad in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(ValueError):
                sf.log_gamma(bad)


class TestSphereSurface:
    def test_small_spheres(self):
        assert sf.sphere_surface(1) == pytest.approx(2.0, rel=1e-12)
        assert sf.sphere_surface(2) == pytest.approx(2.0 * math.pi, rel=1e-12)
        assert sf.sphere_surface(3) == pytest.approx(4.0 * math.pi, rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            sf.sphere_surface(0)


class TestGammaInequalityMargin:
    def test_equality_at_zero(self):
        assert sf.gamma_inequality_margin(3.0, 0.0) == 0.0

    def test_simple_value(self):
        assert sf.gamma_inequality_margin(2.0, 1.0) == pytest.approx(math.log(2.0), rel=1e-12)

    def test_frozen_value(self):
        # computed with 40-digit arithmetic: 3.25*ln(7.5) + lnG(4.25) - lnG(7.5)
        assert sf.gamma_inequality_margin(7.5, 3.25) == pytest.approx(
            1.1285275074539990, rel=1e-12
        )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            sf.gamma_inequality_margin(3.0, -0.1)
        with pytest.raises(ValueError):
            sf.gamma_inequality_margin(3.0, 3.0)

    @settings(max_examples=300, deadline=None)
    @given(
        lam=st.floats(min_value=1e-3, max_value=100.0),
        frac=st.floats(min_value=0.0, max_value=1.0 - 1e-12),
    )
    def test_nonnegative_everywhere(self, lam, frac):
        assert sf.gamma_inequality_margin(lam, frac * lam) >= -1e-10


class TestQuadratureRule:
    def test_invariants(self):
        for order in (4, 24, 64):
            rule = sf.gauss_legendre(order)
            assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.diff(rule.nodes) > 0)
            assert 0.0 < rule.nodes[0] and rule.nodes[-1] < 1.0
            assert np.all(rule.weights > 0)

    def test_polynomial_exactness(self):
        rule = sf.gauss_legendre(8)
        # exact for degree <= 15 on [0, 1]
        for deg in range(16):
            val = float(np.dot(rule.weights, rule.nodes ** deg))
            assert val == pytest.approx(1.0 / (deg + 1), rel=1e-13)

    def test_rejects_bad_rules(self):
        good = sf.gauss_legendre(4)
        with pytest.raises(ValueError):
            sf.QuadratureRule(nodes=good.nodes[::-1].copy(), weights=good.weights, order=4)
        with pytest.raises(ValueError):
            sf.QuadratureRule(nodes=good.nodes, weights=-good.weights, order=4)


class TestExpectationIntegral:
    def test_closed_form_n4_k2(self):
        # the (4, 2) integrand has an elementary antiderivative: (1 - e^-16)/16
        assert sf.expectation_integral(4, 2, 1.0) == pytest.approx(
            0.06249999296655158, rel=1e-11
        )
        assert sf.expectation_integral(4, 2, 1.0) <= 0.25

    def test_singular_weight_case(self):
        # n - k = 1 makes the (1 - t^2) exponent negative; frozen 40-digit value
        assert sf.expectation_integral(2, 1, 1.0) == pytest.approx(
            0.30850832255367104, rel=1e-11
        )

    def test_beta_to_zero_limit(self):
        for n, k in ((5, 2), (8, 3)):
            assert sf.expectation_integral(n, k, 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_bound_over_grid(self):
        for n in range(2, 33):
            for k in range(1, n):
                val = sf.expectation_integral(n, k, 1.0)
                assert val <= float(n) ** (-0.5 * k) + 1e-10, (n, k, val)

    def test_monotone_in_beta(self):
        for n, k in ((4, 1), (7, 3), (12, 5)):
            vals = [sf.expectation_integral(n, k, b) for b in (0.1, 0.5, 1.0, 2.0, 5.0)]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_doubling_stability(self):
        hi = sf.gauss_legendre(48)
        for n, k in ((2, 1), (10, 4), (16, 6)):
            m = n - k
            scale = float(n * n)

            def f(a):
                return (np.exp(-scale * np.cos(a) ** 2)
                        * np.cos(a) ** (k - 1) * np.sin(a) ** (m - 1))

            lo_val = sf.integrate_adaptive(f, 0.0, math.pi / 2)
            hi_val = sf.integrate_adaptive(f, 0.0, math.pi / 2, rule=hi)
            assert abs(lo_val - hi_val) < 1e-10

    def test_monte_carlo_agreement(self):
        # independent oracle: sample sphere points directly
        from smallslice.geometry import sample_sphere_batch

        rng = np.random.default_rng(2024)
        n, k = 6, 1
        theta = sample_sphere_batch(n, 1_000_000, rng)
        d2 = np.sum(theta[:, :k] ** 2, axis=1)  # F = span(e_{k+1}..e_n)
        vals = np.exp(-(float(n) ** 2) * d2)
        mc = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(vals.size))
        exact = sf.expectation_integral(n, k, 1.0)
        assert abs(exact - mc) <= 3.0 * se

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            sf.expectation_integral(4, 0, 1.0)
        with pytest.raises(ValueError):
            sf.expectation_integral(4, 4, 1.0)  # k = n unsupported
        with pytest.raises(ValueError):
            sf.expectation_integral(4, 2, 0.0)
