# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

import unittest

import numpy as np
from numpy.testing import assert_allclose

from conditionalqmc.models.Construction import Construction
from conditionalqmc.models.Example import Example
from conditionalqmc.models.MarketParams import MarketParams
from conditionalqmc.normal import cdf
from conditionalqmc.payoff import decompose, f_eval, g_eval, insert_column, phi, price_closed_form_digital

from tests.util import make_spec

class DiscriminantTest(unittest.TestCase):
    def test_origin(self):
        spec = make_spec(Example.PAYOFF)

        expected = np.mean(100.0 * np.exp(-0.0175 * np.arange(1, 5))) - 100.0

        self.assertAlmostEqual(expected, phi(np.zeros(4), spec), places=10)

    def test_zero_when_average_hits_strike(self):
        spec = make_spec(Example.PAYOFF, d=1, s0=100.0, strike=100.0, rate=0.08, sigma=0.4)

        self.assertAlmostEqual(0.0, phi(np.zeros(1), spec), places=12)

    def test_increasing_in_nonnegative_column(self):
        spec = make_spec(Example.DELTA, d=4, construction=Construction.BROWNIAN_BRIDGE)
        y = np.random.default_rng(1).standard_normal(3)

        values = [phi(insert_column(y[None, :], 2, s)[0], spec) for s in np.linspace(-3, 3, 13)]

        self.assertTrue(np.all(np.diff(values) > 0))

    def test_batch_shape(self):
        spec = make_spec(Example.DELTA)

        self.assertEqual((7,), phi(np.zeros((7, 4)), spec).shape)
        with self.assertRaises(ValueError):
            phi(np.zeros(3), spec)


class IntegrandTest(unittest.TestCase):
    def test_binary_is_constant(self):
        spec = make_spec(Example.BINARY)
        x = np.random.default_rng(2).standard_normal((20, 4))

        assert_allclose(np.exp(-0.01), g_eval(x, spec))

    def test_delta_at_origin(self):
        spec = make_spec(Example.DELTA)

        s_a = np.mean(100.0 * np.exp(-0.0175 * np.arange(1, 5)))

        self.assertAlmostEqual(np.exp(-0.01) * s_a / 100.0, g_eval(np.zeros(4), spec), places=14)

    def test_payoff_is_discounted_discriminant(self):
        spec = make_spec(Example.PAYOFF)
        x = np.random.default_rng(3).standard_normal((50, 4))

        assert_allclose(np.exp(-0.01) * phi(x, spec), g_eval(x, spec), rtol=1e-13, atol=1e-12)
        assert_allclose(np.exp(-0.01) * np.maximum(phi(x, spec), 0.0), f_eval(x, spec), rtol=1e-13, atol=1e-12)

    def test_indicator(self):
        spec = make_spec(Example.DELTA)

        self.assertEqual(0.0, f_eval(np.full(4, -1.0), spec))
        self.assertEqual(g_eval(np.full(4, 1.0), spec), f_eval(np.full(4, 1.0), spec))

    def test_digital_price_matches_monte_carlo(self):
        spec = make_spec(Example.BINARY, d=1)
        x = np.random.default_rng(4).standard_normal((1000000, 1))

        values = f_eval(x, spec)

        price = price_closed_form_digital(spec.params)
        d2 = (np.log(1.0) - 0.07) / 0.4
        self.assertAlmostEqual(np.exp(-0.01) * float(cdf(d2)), price, places=14)
        self.assertLess(abs(values.mean() - price), 4.0 * values.std() / np.sqrt(len(values)))


class DecompositionTest(unittest.TestCase):
    def test_reconstruction(self):
        rng = np.random.default_rng(5)
        for construction in (Construction.STANDARD, Construction.BROWNIAN_BRIDGE, Construction.PCA):
            for example in Example:
                spec = make_spec(example, d=4, construction=construction)
                y = rng.standard_normal((100, 3))
                xj = 2.0 * rng.standard_normal(100)
                for j in range(1, 5):
                    terms = decompose(spec, j, y)
                    x = insert_column(y, j, xj)
                    assert_allclose(terms.g(xj), g_eval(x, spec), rtol=1e-10, atol=1e-10,
                                    err_msg=f"{example.value} {construction.value} j={j}")
                    assert_allclose(terms.phi(xj), phi(x, spec), rtol=1e-10, atol=1e-9)

    def test_term_layout(self):
        spec = make_spec(Example.PAYOFF, d=4)

        terms = decompose(spec, 1, np.zeros(3))

        self.assertEqual((1, 5), terms.weights.shape)
        self.assertEqual(0.0, terms.ell[-1])
        self.assertEqual(0.0, terms.c[0, -1])
        self.assertAlmostEqual(-np.exp(-0.01) * 100.0, terms.weights[0, -1], places=12)

    def test_exponents_nonnegative_for_nonnegative_columns(self):
        for construction in (Construction.STANDARD, Construction.BROWNIAN_BRIDGE):
            spec = make_spec(Example.VEGA, d=6, construction=construction)
            for j in range(1, 7):
                self.assertTrue(np.all(decompose(spec, j, np.zeros(5)).ell >= 0))

    def test_gamma_standard_first_column(self):
        spec = make_spec(Example.GAMMA, d=4)

        terms = decompose(spec, 1, np.random.default_rng(6).standard_normal((10, 3)))

        assert_allclose(0.4 * np.sqrt(0.25), terms.c[:, :4])
        assert_allclose(0.4 * np.sqrt(0.25), terms.ell[:4])

    def test_theta_constant_term(self):
        params = MarketParams(d=3)
        spec = make_spec(Example.THETA, d=3)

        terms = decompose(spec, 2, np.zeros(2))

        self.assertAlmostEqual(params.discount * params.rate * params.strike, terms.weights[0, -1], places=12)

    def test_rejects_bad_column(self):
        with self.assertRaises(ValueError):
            decompose(make_spec(Example.DELTA), 0, np.zeros(3))
