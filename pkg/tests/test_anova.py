# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy import integrate, stats

from conditionalqmc.anova import (AnovaException, AnovaStatus, AnovaTermSet, anova_term, expectation,
                                  integrate_preintegrated, project, term_rate_study)
from conditionalqmc.models.Construction import Construction
from conditionalqmc.models.Example import Example
from conditionalqmc.normal import pdf
from conditionalqmc.payoff import f_eval
from conditionalqmc.smooth import preintegrate, psi

from tests.util import make_spec

def hermite_rule(nodes: int = 64):
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    return x, w / np.sqrt(2.0 * np.pi)

def price(example: Example, **params) -> float:
    return AnovaTermSet(make_spec(example, d=2, **params)).integral()

class ProjectionTest(unittest.TestCase):
    def test_dimension_limit(self):
        with self.assertRaises(AnovaException) as context:
            AnovaTermSet(make_spec(Example.DELTA, d=4))
        self.assertEqual(AnovaStatus.DIMENSION_TOO_LARGE, context.exception.status)

    def test_empty_projection_is_the_integrand(self):
        spec = make_spec(Example.DELTA, d=3)
        x = np.random.default_rng(20).standard_normal((10, 3))

        assert_allclose(f_eval(x, spec), project(spec, (), x))

    def test_single_coordinate_matches_preintegration(self):
        for construction in (Construction.STANDARD, Construction.BROWNIAN_BRIDGE):
            spec = make_spec(Example.PAYOFF, d=3, construction=construction)
            terms = AnovaTermSet(spec)
            y = np.random.default_rng(21).standard_normal((20, 2))
            for j in (1, 2, 3):
                assert_allclose(terms.project((j,), y), preintegrate(y, spec, j), rtol=1e-8, atol=1e-10,
                                err_msg=f"{construction.value} j={j}")

    def test_single_date_matches_black_scholes(self):
        spec = make_spec(Example.PAYOFF, d=1)
        d1 = (np.log(1.0) + (0.01 + 0.08)) / 0.4
        d2 = d1 - 0.4
        call = 100.0 * stats.norm.cdf(d1) - 100.0 * np.exp(-0.01) * stats.norm.cdf(d2)

        self.assertAlmostEqual(call, AnovaTermSet(spec).integral(), places=9)

    def test_expectation_of_integrand(self):
        spec = make_spec(Example.VEGA, d=2, construction=Construction.BROWNIAN_BRIDGE)
        terms = AnovaTermSet(spec)

        self.assertAlmostEqual(terms.integral(), expectation(spec, lambda x: f_eval(x, spec)), places=9)

    def test_integral_of_mixed_sign_matrix(self):
        spec = make_spec(Example.DELTA, d=3, construction=Construction.PCA)
        standard = make_spec(Example.DELTA, d=3)

        assert_allclose(AnovaTermSet(standard).integral(), AnovaTermSet(spec).integral(), rtol=1e-8)

    def test_projection_rejects_bad_coordinates(self):
        with self.assertRaises(ValueError):
            project(make_spec(Example.DELTA, d=2), (3,), np.zeros(2))


class ConservationTest(unittest.TestCase):
    def test_preintegration_keeps_the_integral(self):
        for d in (2, 3):
            for example in Example:
                spec = make_spec(example, d=d)
                exact = AnovaTermSet(spec).integral()
                for j in (1, d):
                    assert_allclose(integrate_preintegrated(spec, j), exact, rtol=1e-6,
                                    err_msg=f"{example.value} d={d} j={j}")


class GreekConsistencyTest(unittest.TestCase):
    def test_delta(self):
        h = 1e-2
        fd = (price(Example.PAYOFF, s0=100.0 + h) - price(Example.PAYOFF, s0=100.0 - h)) / (2 * h)

        assert_allclose(fd, price(Example.DELTA), rtol=1e-3)

    def test_gamma(self):
        h = 1e-2
        fd = (price(Example.DELTA, s0=100.0 + h) - price(Example.DELTA, s0=100.0 - h)) / (2 * h)

        assert_allclose(fd, price(Example.GAMMA), rtol=1e-3)

    def test_rho(self):
        h = 1e-4
        fd = (price(Example.PAYOFF, rate=0.01 + h) - price(Example.PAYOFF, rate=0.01 - h)) / (2 * h)

        assert_allclose(fd, price(Example.RHO), rtol=1e-3)

    def test_theta(self):
        h = 1e-4
        fd = (price(Example.PAYOFF, maturity=1.0 + h) - price(Example.PAYOFF, maturity=1.0 - h)) / (2 * h)

        assert_allclose(fd, price(Example.THETA), rtol=1e-3)

    def test_vega(self):
        h = 1e-4
        fd = (price(Example.PAYOFF, sigma=0.4 + h) - price(Example.PAYOFF, sigma=0.4 - h)) / (2 * h)

        assert_allclose(fd, price(Example.VEGA), rtol=1e-3)


class AnovaIdentityTest(unittest.TestCase):
    def setUp(self):
        self.spec = make_spec(Example.PAYOFF, d=2)
        self.terms = AnovaTermSet(self.spec)

    def test_empty_term_is_the_integral(self):
        self.assertEqual(self.terms.integral(), anova_term(self.spec, (), np.zeros(0)))

    def test_reconstruction(self):
        x = np.random.default_rng(22).standard_normal((100, 2))

        total = (self.terms.term((), np.zeros((100, 0))) + self.terms.term((1,), x[:, [0]])
                 + self.terms.term((2,), x[:, [1]]) + self.terms.term((1, 2), x))

        assert_allclose(total, f_eval(x, self.spec), rtol=1e-6, atol=1e-9)

    def test_reconstruction_three_dates(self):
        spec = make_spec(Example.DELTA, d=3, construction=Construction.BROWNIAN_BRIDGE)
        terms = AnovaTermSet(spec)
        x = np.random.default_rng(23).standard_normal((20, 3))
        subsets = [(), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]

        total = sum(np.asarray(terms.term(v, x[:, [k - 1 for k in v]] if v else np.zeros((20, 0)))) for v in subsets)

        assert_allclose(total, f_eval(x, spec), rtol=1e-6, atol=1e-9)

    def test_main_effects_integrate_to_zero(self):
        x, w = hermite_rule()

        for v in ((1,), (2,)):
            self.assertLess(abs(np.sum(self.terms.term(v, x[:, None]) * w)), 1e-6)

    def test_interaction_integrates_to_zero_in_each_coordinate(self):
        for x2 in (-1.0, 0.2, 1.5):
            root = psi(np.array([x2]), self.spec, 1).root[0]
            integrand = lambda s: float(self.terms.term((1, 2), np.array([s, x2]))) * float(pdf(s))
            value = integrate.quad(integrand, -12.0, 12.0, points=[root], epsabs=1e-12, epsrel=1e-10, limit=200)[0]
            self.assertLess(abs(value), 1e-6)

    def test_orthogonality(self):
        x, w = hermite_rule()
        f1 = self.terms.term((1,), x[:, None])
        f2 = self.terms.term((2,), x[:, None])

        self.assertLess(abs(np.sum(f1 * w) * np.sum(f2 * w)), 1e-12)
        cross = self.terms.expectation(lambda p: self.terms.term((1,), p[:, [0]]) * self.terms.term((1, 2), p))
        norm_1 = np.sqrt(np.sum(f1 ** 2 * w))
        norm_12 = np.sqrt(self.terms.expectation(lambda p: self.terms.term((1, 2), p) ** 2))
        self.assertLess(abs(cross), 1e-6 * (norm_1 * norm_12 + 1.0))

    def test_variance_additivity(self):
        x, w = hermite_rule()
        integral = self.terms.integral()
        total = self.terms.expectation(lambda p: f_eval(p, self.spec) ** 2) - integral ** 2
        parts = (np.sum(self.terms.term((1,), x[:, None]) ** 2 * w) + np.sum(self.terms.term((2,), x[:, None]) ** 2 * w)
                 + self.terms.expectation(lambda p: self.terms.term((1, 2), p) ** 2))

        assert_allclose(parts, total, rtol=1e-4)

    def test_term_rejects_wrong_width(self):
        with self.assertRaises(ValueError):
            self.terms.term((1, 2), np.zeros(3))


class TermRateStudyTest(unittest.TestCase):
    def test_empty_term_has_no_error(self):
        report = term_rate_study(make_spec(Example.PAYOFF, d=2), (), range(4, 8), 4)

        self.assertEqual("anova:empty", report.label)
        self.assertTrue(all(row.mean_abs_error == 0.0 for row in report.rows))
        self.assertEqual(0.0, report.slope)

    def test_budget(self):
        spec = make_spec(Example.PAYOFF, d=2)
        with self.assertRaises(AnovaException) as context:
            term_rate_study(spec, (1,), range(8, 14), 4)
        self.assertEqual(AnovaStatus.BUDGET_EXCEEDED, context.exception.status)
        with self.assertRaises(AnovaException):
            term_rate_study(spec, (1,), range(4, 8), 21)

    def test_dimension(self):
        with self.assertRaises(AnovaException) as context:
            term_rate_study(make_spec(Example.PAYOFF, d=1), (1,), range(4, 8), 4)
        self.assertEqual(AnovaStatus.DIMENSION_TOO_LARGE, context.exception.status)

    def test_smooth_term_rate(self):
        report = term_rate_study(make_spec(Example.PAYOFF, d=2), (1,), range(6, 13), 20)

        self.assertEqual("anova:1", report.label)
        self.assertEqual([2 ** m for m in range(6, 13)], [row.n for row in report.rows])
        self.assertLessEqual(report.slope, -0.85)

    def test_full_order_term_rate(self):
        report = term_rate_study(make_spec(Example.PAYOFF, d=2), (1, 2), range(6, 13), 20)

        self.assertEqual("anova:1,2", report.label)
        self.assertLessEqual(report.slope, -0.55)
