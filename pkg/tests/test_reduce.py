# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy import stats

from conditionalqmc.models.Construction import Construction
from conditionalqmc.models.Example import Example
from conditionalqmc.models.OrthogonalTransform import OrthogonalTransform
from conditionalqmc.models.ScrambleSeed import ScrambleSeed
from conditionalqmc.models.TransformProvenance import TransformProvenance
from conditionalqmc.reduce import TransformedIntegrand, apply, gpca_matrix, gpca_transform, gradient_samples
from conditionalqmc.smooth import PreintegratedIntegrand

from tests.util import make_spec

class OrthogonalTransformTest(unittest.TestCase):
    def test_identity(self):
        transform = OrthogonalTransform.identity(3)

        self.assertEqual(3, transform.k)
        self.assertEqual(TransformProvenance.IDENTITY, transform.provenance)

    def test_rejects_non_orthogonal(self):
        with self.assertRaises(ValueError):
            OrthogonalTransform(np.array([[1.0, 0.1], [0.0, 1.0]]))
        with self.assertRaises(ValueError):
            OrthogonalTransform(np.ones((2, 3)))


class GradientTest(unittest.TestCase):
    def test_linear_function(self):
        slope = np.array([0.5, -2.0, 1.0])

        gradients = gradient_samples(lambda y: y @ slope, 64, 7, dimension=3)

        self.assertEqual((64, 3), gradients.shape)
        assert_allclose(np.broadcast_to(slope, (64, 3)), gradients, atol=1e-8)

    def test_constant_integrand(self):
        spec = make_spec(Example.BINARY, d=3, strike=1.0)

        gradients = gradient_samples(PreintegratedIntegrand(spec, 3), 16, 7)

        assert_allclose(np.zeros((16, 2)), gradients, atol=1e-12)

    def test_payoff_gradients_are_finite(self):
        pint = PreintegratedIntegrand(make_spec(Example.PAYOFF, d=4), 1)

        gradients = gradient_samples(pint, 256, ScrambleSeed(42, 0, "gpca"))

        self.assertEqual((256, 3), gradients.shape)
        self.assertTrue(np.all(np.isfinite(gradients)))

    def test_integer_seed_uses_gpca_stream(self):
        pint = PreintegratedIntegrand(make_spec(Example.DELTA, d=3), 1)

        assert_allclose(gradient_samples(pint, 32, ScrambleSeed(9, 0, "gpca")), gradient_samples(pint, 32, 9), rtol=0, atol=0)

    def test_too_few_samples(self):
        with self.assertRaises(ValueError):
            gradient_samples(PreintegratedIntegrand(make_spec(Example.DELTA, d=4), 1), 2, 7)

    def test_dimension_required(self):
        with self.assertRaises(ValueError):
            gradient_samples(lambda y: y.sum(axis=1), 8, 7)


class GpcaMatrixTest(unittest.TestCase):
    def test_single_direction(self):
        gradients = np.random.default_rng(30).standard_normal(50)[:, None] * np.array([[-1.0, 0.0, 0.0]])

        transform = gpca_matrix(gradients)

        assert_allclose([1.0, 0.0, 0.0], transform.matrix[:, 0], atol=1e-12)
        self.assertEqual(TransformProvenance.GPCA, transform.provenance)

    def test_zero_gradients(self):
        with self.assertLogs("conditionalqmc.reduce", level="WARNING"):
            transform = gpca_matrix(np.zeros((10, 4)))

        assert_allclose(np.eye(4), transform.matrix)
        self.assertEqual(TransformProvenance.IDENTITY, transform.provenance)

    def test_random_gradients_are_orthogonal(self):
        gradients = np.random.default_rng(31).standard_normal((100, 6)) * np.arange(1, 7)

        matrix = gpca_matrix(gradients).matrix

        self.assertLessEqual(np.max(np.abs(matrix.T @ matrix - np.eye(6))), 1e-10)
        self.assertTrue(np.all(matrix[np.argmax(np.abs(matrix), axis=0), np.arange(6)] > 0))

    def test_strongest_direction_first(self):
        gradients = np.random.default_rng(32).standard_normal((400, 3)) * np.array([0.1, 5.0, 1.0])

        matrix = gpca_matrix(gradients).matrix

        self.assertEqual(1, int(np.argmax(np.abs(matrix[:, 0]))))
        self.assertEqual(2, int(np.argmax(np.abs(matrix[:, 1]))))

    def test_scale_invariant(self):
        gradients = np.random.default_rng(33).standard_normal((100, 4)) * np.array([3.0, 2.0, 1.0, 0.5])

        assert_allclose(gpca_matrix(gradients).matrix, gpca_matrix(7.5 * gradients).matrix, atol=1e-10)


class ApplyTest(unittest.TestCase):
    def setUp(self):
        self.pint = PreintegratedIntegrand(make_spec(Example.DELTA, d=4, construction=Construction.BROWNIAN_BRIDGE), 1)
        self.y = np.random.default_rng(34).standard_normal((100, 3))

    def test_identity(self):
        transformed = apply(self.pint, OrthogonalTransform.identity(3))

        assert_allclose(self.pint(self.y), transformed(self.y), rtol=1e-14)
        self.assertEqual(3, transformed.dimension)

    def test_permutation(self):
        permutation = np.eye(3)[:, [2, 0, 1]]

        transformed = apply(self.pint, permutation)

        assert_allclose(self.pint(self.y @ permutation.T), transformed(self.y), rtol=1e-14)
        assert_allclose(self.pint(self.y[:, [1, 2, 0]]), transformed(self.y), rtol=1e-14)

    def test_single_point(self):
        transformed = TransformedIntegrand(self.pint, OrthogonalTransform.identity(3))

        self.assertIsInstance(transformed(np.zeros(3)), float)

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            apply(self.pint, np.eye(2))

    def test_expectation_unchanged(self):
        rotation = stats.ortho_group.rvs(3, random_state=35)
        x = np.random.default_rng(36).standard_normal((100000, 3))

        plain = self.pint(x)
        rotated = apply(self.pint, rotation)(x)

        combined = np.sqrt((np.var(plain) + np.var(rotated)) / len(x))
        self.assertLess(abs(plain.mean() - rotated.mean()), 4.0 * combined)

    def test_gpca_transform(self):
        transform = gpca_transform(self.pint, 128, 42)

        self.assertEqual(3, transform.k)
        self.assertEqual(TransformProvenance.GPCA, transform.provenance)
