# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

import os
import tempfile
import unittest
import xml.etree.ElementTree as ElementTree

import numpy as np
from numpy.testing import assert_allclose

from conditionalqmc.anova import AnovaTermSet
from conditionalqmc.harness import (StudyException, StudyStatus, build_evaluator, compare_methods, convergence_study,
                                    emit_csv, emit_svg, estimate, fit_slope, method_label, reference_value,
                                    summarize_errors)
from conditionalqmc.models.ConvergenceRow import ConvergenceRow
from conditionalqmc.models.Example import Example
from conditionalqmc.models.ExperimentConfig import ExperimentConfig
from conditionalqmc.models.Provenance import Provenance
from conditionalqmc.models.ReduceMethod import ReduceMethod
from conditionalqmc.models.ReferenceValue import ReferenceValue
from conditionalqmc.models.Sampler import Sampler
from conditionalqmc.models.ScrambleSeed import ScrambleSeed
from conditionalqmc.payoff import price_closed_form_digital

from tests.util import make_spec

def small_config(**overrides) -> ExperimentConfig:
    return ExperimentConfig(**{"d": 3, "n": (4, 5, 6, 7), "reps": 4, "reference_exponent": 10, "reference_reps": 4,
                               **overrides})

def exact_reference(config: ExperimentConfig) -> ReferenceValue:
    value = AnovaTermSet(make_spec(config.example, d=config.d, construction=config.construction)).integral()
    return ReferenceValue(value=value, stderr=0.0, provenance=Provenance.EXACT)

def sample_report(label: str = "cqmc"):
    reference = ReferenceValue(value=1.5, stderr=0.0, provenance=Provenance.EXACT)
    errors = np.array([[0.4, -0.2, 0.3], [0.1, -0.1, 0.05], [0.02, 0.03, -0.01], [0.01, -0.004, 0.006]])
    return summarize_errors(label, [4, 5, 6, 7], errors, reference, 3, 42)

class MethodLabelTest(unittest.TestCase):
    def test_labels(self):
        self.assertEqual("mc", method_label(ExperimentConfig(smoothing="none", sampler=Sampler.MC)))
        self.assertEqual("rqmc", method_label(ExperimentConfig(smoothing="none")))
        self.assertEqual("cmc", method_label(ExperimentConfig(sampler=Sampler.MC)))
        self.assertEqual("cqmc", method_label(ExperimentConfig()))
        self.assertEqual("cqmc+gpca", method_label(ExperimentConfig(reduce=ReduceMethod.GPCA)))


class FitSlopeTest(unittest.TestCase):
    def test_exact_power_law(self):
        ns = [2 ** m for m in range(4, 11)]

        slope, stderr = fit_slope(ns, [3.0 / n for n in ns])

        self.assertAlmostEqual(-1.0, slope, places=12)
        self.assertAlmostEqual(0.0, stderr, places=10)

    def test_smallest_sizes_are_excluded(self):
        ns = [2 ** m for m in range(4, 11)]
        errors = [n ** -0.5 for n in ns]
        errors[0] = errors[1] = 1e3

        slope, _ = fit_slope(ns, errors)

        self.assertAlmostEqual(-0.5, slope, places=12)

    def test_vanishing_errors(self):
        with self.assertLogs("conditionalqmc.harness", level="WARNING"):
            self.assertEqual((0.0, 0.0), fit_slope([16, 32, 64, 128, 256], [0.0] * 5))

    def test_few_points(self):
        with self.assertLogs("conditionalqmc.harness", level="WARNING"):
            slope, _ = fit_slope([16, 32], [0.5, 0.25])
        self.assertAlmostEqual(-1.0, slope, places=12)


class SummarizeErrorsTest(unittest.TestCase):
    def test_rows(self):
        reference = ReferenceValue(value=0.0, stderr=0.0, provenance=Provenance.EXACT)

        report = summarize_errors("mc", [1, 2], np.array([[1.0, -1.0], [2.0, -2.0]]), reference, 2, 7)

        self.assertEqual([ConvergenceRow(2, 1.0, 1.0, 0.0), ConvergenceRow(4, 2.0, 2.0, 0.0)], report.rows)
        self.assertAlmostEqual(1.0, report.slope, places=12)
        self.assertEqual(7, report.master_seed)
        self.assertEqual(2.0, report.row(4).mean_abs_error)
        with self.assertRaises(KeyError):
            report.row(8)


class EstimateTest(unittest.TestCase):
    def test_constant_evaluator(self):
        value = estimate(lambda x: np.full(len(x), 2.5), 3, Sampler.RQMC, 6, ScrambleSeed(1, 0))

        self.assertEqual(2.5, value)

    def test_zero_dimensional(self):
        self.assertEqual(4.0, estimate(lambda x: np.full(len(x), 4.0), 0, Sampler.RQMC, 10, ScrambleSeed(1, 0)))

    def test_non_finite(self):
        with self.assertRaises(StudyException) as context:
            estimate(lambda x: np.where(x[:, 0] > 0, np.nan, 1.0), 2, Sampler.MC, 6, ScrambleSeed(1, 0))
        self.assertEqual(StudyStatus.NON_FINITE_ESTIMATE, context.exception.status)

    def test_digital_without_smoothing(self):
        config = ExperimentConfig(example=Example.BINARY, d=1, smoothing="none")
        evaluator, s = build_evaluator(config)
        price = price_closed_form_digital(config.params())

        value = estimate(evaluator, s, Sampler.RQMC, 16, ScrambleSeed(42, 0))

        bound = 3.0 * np.exp(-0.01) * np.sqrt(0.25 / 2 ** 16)
        self.assertLess(abs(value - price), bound)

    def test_evaluator_dimension(self):
        self.assertEqual(4, build_evaluator(ExperimentConfig(smoothing="none"))[1])
        self.assertEqual(3, build_evaluator(ExperimentConfig())[1])
        self.assertEqual(3, build_evaluator(ExperimentConfig(reduce=ReduceMethod.GPCA, gpca_samples=16))[1])


class ReferenceValueTest(unittest.TestCase):
    def test_single_date_is_exact(self):
        config = ExperimentConfig(example=Example.BINARY, d=1)

        reference = reference_value(config)

        self.assertEqual(Provenance.EXACT, reference.provenance)
        self.assertEqual(0.0, reference.stderr)
        self.assertAlmostEqual(price_closed_form_digital(config.params()), reference.value, places=12)

    def test_quadrature_checked(self):
        reference = reference_value(small_config(example=Example.PAYOFF, d=2, reference_exponent=12, reference_reps=8))

        self.assertEqual(Provenance.CQMC_QUADRATURE_CHECKED, reference.provenance)
        self.assertEqual(4096, reference.n)
        self.assertEqual(8, reference.reps)
        self.assertIsNotNone(reference.quadrature_value)

    def test_theta_matches_finite_difference(self):
        reference = reference_value(small_config(example=Example.THETA, d=2, reference_exponent=12, reference_reps=8))
        h = 1e-4
        up = AnovaTermSet(make_spec(Example.PAYOFF, d=2, maturity=1.0 + h)).integral()
        down = AnovaTermSet(make_spec(Example.PAYOFF, d=2, maturity=1.0 - h)).integral()

        assert_allclose((up - down) / (2 * h), reference.value, rtol=1e-3)

    def test_ignores_study_construction(self):
        config = small_config(d=2, reference_reps=16)
        other = small_config(d=2, reference_reps=16, construction="pca", smoothing="none")

        self.assertEqual(reference_value(config), reference_value(other))


class ConvergenceStudyTest(unittest.TestCase):
    def test_deterministic(self):
        config = small_config()
        reference = exact_reference(config)

        self.assertEqual(convergence_study(config, reference), convergence_study(config, reference))

    def test_worker_count_does_not_matter(self):
        config = small_config(reduce=ReduceMethod.GPCA, gpca_samples=32)
        reference = exact_reference(config)

        serial = convergence_study(config, reference)
        parallel = convergence_study(small_config(reduce=ReduceMethod.GPCA, gpca_samples=32, workers=3), reference)

        self.assertEqual(serial, parallel)

    def test_rows(self):
        config = small_config(sampler=Sampler.MC, smoothing="none")

        report = convergence_study(config, exact_reference(config))

        self.assertEqual("mc", report.label)
        self.assertEqual([16, 32, 64, 128], [row.n for row in report.rows])
        self.assertTrue(all(row.mean_abs_error > 0 for row in report.rows))
        self.assertEqual(4, report.reps)

    def test_compare_methods(self):
        reports = compare_methods(small_config(d=2, reference_reps=16))

        self.assertEqual(["mc", "rqmc", "cqmc", "cqmc+gpca"], [report.label for report in reports])
        self.assertEqual(1, len({report.reference for report in reports}))


class EmitTest(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.directory.name, name)

    def read(self, name: str) -> bytes:
        with open(self.path(name), "rb") as handle:
            return handle.read()

    def test_csv(self):
        report = sample_report()

        emit_csv(report, self.path("a.csv"))
        emit_csv(report, self.path("b.csv"))

        lines = self.read("a.csv").decode("utf-8").splitlines()
        self.assertEqual("n,mean_abs_error,rmse,stderr", lines[0])
        self.assertEqual(5, len(lines))
        fields = lines[1].split(",")
        self.assertEqual("16", fields[0])
        self.assertAlmostEqual(0.3, float(fields[1]), places=12)
        self.assertAlmostEqual(np.sqrt(0.29 / 3), float(fields[2]), places=12)
        self.assertEqual(self.read("a.csv"), self.read("b.csv"))

    def test_csv_output_failure(self):
        with self.assertRaises(StudyException) as context:
            emit_csv(sample_report(), self.directory.name)
        self.assertEqual(StudyStatus.OUTPUT_FAILED, context.exception.status)

    def test_svg(self):
        reports = [sample_report("rqmc"), sample_report("cqmc")]

        emit_svg(reports, self.path("a.svg"))
        emit_svg(reports, self.path("b.svg"))

        self.assertEqual(self.read("a.svg"), self.read("b.svg"))
        root = ElementTree.fromstring(self.read("a.svg"))
        self.assertTrue(root.tag.endswith("svg"))

    def test_svg_output_failure(self):
        with self.assertRaises(StudyException) as context:
            emit_svg(sample_report(), self.path(os.path.join("missing", "plot.svg")))
        self.assertEqual(StudyStatus.OUTPUT_FAILED, context.exception.status)
