# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from typing import Callable, List, Optional, Sequence, Tuple, Union
import csv
import logging
import pathlib

import attr
import matplotlib
from matplotlib.figure import Figure
import numpy as np
from scipy import stats

from .anova import MAX_DIMENSION, AnovaTermSet
from .lds import MonteCarloSampler, SobolSampler, make_sampler
from .models.ConvergenceReport import ConvergenceReport
from .models.ConvergenceRow import ConvergenceRow
from .models.Construction import Construction
from .models.ExperimentConfig import ExperimentConfig
from .models.IntegrandSpec import IntegrandSpec
from .models.LibraryUtility import _get_cattrs_converter
from .models.Provenance import Provenance
from .models.ReduceMethod import ReduceMethod
from .models.ReferenceValue import ReferenceValue
from .models.Sampler import Sampler
from .models.ScrambleSeed import ScrambleSeed
from .normal import inv_cdf
from .path import make_matrix
from .payoff import f_eval
from .reduce import apply, gpca_transform
from .smooth import PreintegratedIntegrand

LOGGER = logging.getLogger(__name__)

EXCLUDED_FROM_FIT = 2
CROSS_CHECK_SIGMAS = 5.0
CSV_COLUMNS = ("n", "mean_abs_error", "rmse", "stderr")

Evaluator = Callable[[np.ndarray], np.ndarray]

class StudyStatus(IntEnum):
    NON_FINITE_ESTIMATE = 1
    """
    An evaluator returned NaN or ±∞ inside a replicate.
    """

    CROSS_CHECK_FAILED = 2
    """
    The sampled reference value disagrees with the tensor quadrature value.
    """

    OUTPUT_FAILED = 3


class StudyException(Exception):
    def __init__(self, status: StudyStatus, message: Optional[str] = None):
        super().__init__("Study failed with status " + status.name + (": " + message if message else ""))
        self.status = status


def build_spec(config: ExperimentConfig) -> IntegrandSpec:
    params = config.params()
    return IntegrandSpec(config.example, params, make_matrix(config.construction, params))


def build_evaluator(config: ExperimentConfig, spec: Optional[IntegrandSpec] = None) -> Tuple[Evaluator, int]:
    """
    Assemble the integrand an estimator averages: f itself, P_j f, or P_j f after a GPCA rotation.

    :return: The evaluator and its input dimension.
    """
    spec = build_spec(config) if spec is None else spec
    j = config.conditioned_column()
    if j is None:
        return (lambda x: f_eval(x, spec)), spec.d
    pint = PreintegratedIntegrand(spec, j)
    if config.reduce == ReduceMethod.GPCA and pint.dimension > 1:
        transform = gpca_transform(pint, max(config.gpca_samples, pint.dimension), ScrambleSeed(config.seed, 0, "gpca"))
        return apply(pint, transform), pint.dimension
    return pint, pint.dimension


def estimate(evaluator: Evaluator, s: int, sampler: Union[Sampler, SobolSampler, MonteCarloSampler], m: int,
             seed: ScrambleSeed) -> float:
    """
    Î = (1/n)·Σ evaluator(Φ⁻¹(u_i)) over n = 2^m points of one randomized point set.

    :throws StudyException: If the evaluator returns a non-finite value.
    """
    if s == 0:
        values = np.asarray(evaluator(np.zeros((1, 0))))
    else:
        if isinstance(sampler, Sampler):
            sampler = make_sampler(sampler, s)
        values = np.asarray(evaluator(inv_cdf(sampler.uniforms(m, seed))))
    if not np.all(np.isfinite(values)):
        bad = int(np.sum(~np.isfinite(values)))
        raise StudyException(StudyStatus.NON_FINITE_ESTIMATE, f"{bad} non-finite values at n=2^{m}, replicate {seed.replicate}")
    return float(np.mean(values))


def _replicates(evaluator: Evaluator, s: int, kind: Sampler, exponents: Sequence[int], reps: int, master_seed: int,
                stream: str, workers: int) -> np.ndarray:
    sampler = make_sampler(kind, s) if s > 0 else None
    tasks = [(m, rep) for m in exponents for rep in range(reps)]

    def run(task: Tuple[int, int]) -> float:
        m, rep = task
        return estimate(evaluator, s, sampler, m, ScrambleSeed(master_seed, rep, stream))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            values = list(executor.map(run, tasks))
    else:
        values = [run(task) for task in tasks]
    return np.array(values).reshape(len(exponents), reps)


def fit_slope(ns: Sequence[int], mean_errors: Sequence[float], excluded: int = EXCLUDED_FROM_FIT) -> Tuple[float, float]:
    """
    Least-squares slope of log2 mean error against log2 n, leaving out the smallest sample sizes.

    :return: The slope and its standard error.
    """
    ns = np.asarray(ns, dtype=float)
    mean_errors = np.asarray(mean_errors, dtype=float)
    if len(ns) - excluded >= 2:
        ns, mean_errors = ns[excluded:], mean_errors[excluded:]
    if len(ns) < 3:
        LOGGER.warning("Fitting a slope through %d points", len(ns))
    if len(ns) < 2 or np.any(mean_errors <= 0):
        LOGGER.warning("Errors vanish or too few sample sizes; reporting slope 0")
        return 0.0, 0.0
    fit = stats.linregress(np.log2(ns), np.log2(mean_errors))
    return float(fit.slope), float(fit.stderr)


def summarize_errors(label: str, exponents: Sequence[int], errors: np.ndarray, reference: ReferenceValue, reps: int,
                     master_seed: int) -> ConvergenceReport:
    """
    Reduce signed replicate errors, shape (len(exponents), reps), to a report.
    """
    rows = []
    for m, row in zip(exponents, np.asarray(errors, dtype=float)):
        absolute = np.abs(row)
        rows.append(ConvergenceRow(
            n=2 ** int(m),
            mean_abs_error=float(np.mean(absolute)),
            rmse=float(np.sqrt(np.mean(row ** 2))),
            stderr=float(np.std(absolute, ddof=1) / np.sqrt(len(row))) if len(row) > 1 else 0.0,
        ))
    slope, slope_stderr = fit_slope([row.n for row in rows], [row.mean_abs_error for row in rows])
    return ConvergenceReport(label=label, rows=rows, slope=slope, slope_stderr=slope_stderr, reference=reference,
                             reps=reps, master_seed=master_seed, excluded_from_fit=EXCLUDED_FROM_FIT)


def method_label(config: ExperimentConfig) -> str:
    if config.conditioned_column() is None:
        return "mc" if config.sampler == Sampler.MC else "rqmc"
    label = "cmc" if config.sampler == Sampler.MC else "cqmc"
    return label + "+gpca" if config.reduce == ReduceMethod.GPCA else label


def reference_value(config: ExperimentConfig) -> ReferenceValue:
    """
    The value errors are measured against: CQMC with GPCA under the standard construction, conditioned on x_1, at
    n = 2^reference_exponent averaged over reference_reps replicates.

    For d = 1 the conditional expectation is a constant and is returned exactly. For d ≤ 3 the estimate is checked
    against tensor quadrature.

    :throws StudyException: If the quadrature check fails.
    """
    reference_config = attr.evolve(config, construction=Construction.STANDARD, smoothing="cond:first",
                                   reduce=ReduceMethod.GPCA, sampler=Sampler.RQMC)
    spec = build_spec(reference_config)
    if spec.d == 1:
        value = float(PreintegratedIntegrand(spec, 1)(np.zeros((1, 0)))[0])
        LOGGER.info("Exact reference %.12g for d=1", value)
        return ReferenceValue(value=value, stderr=0.0, provenance=Provenance.EXACT)
    evaluator, s = build_evaluator(reference_config, spec)
    estimates = _replicates(evaluator, s, Sampler.RQMC, [config.reference_exponent], config.reference_reps, config.seed,
                            "reference", config.workers)[0]
    value = float(np.mean(estimates))
    stderr = float(np.std(estimates, ddof=1) / np.sqrt(len(estimates)))
    n = 2 ** config.reference_exponent
    if spec.d > MAX_DIMENSION:
        LOGGER.info("Reference %.12g ± %.3g from %d × 2^%d points", value, stderr, len(estimates), config.reference_exponent)
        return ReferenceValue(value=value, stderr=stderr, provenance=Provenance.CQMC, n=n, reps=len(estimates))
    quadrature = AnovaTermSet(spec).integral()
    allowed = CROSS_CHECK_SIGMAS * stderr + 1e-9 * (1.0 + abs(quadrature))
    if abs(value - quadrature) > allowed:
        raise StudyException(StudyStatus.CROSS_CHECK_FAILED,
                             f"sampled reference {value:.12g} ± {stderr:.3g} but quadrature gives {quadrature:.12g}")
    LOGGER.info("Reference %.12g ± %.3g agrees with quadrature %.12g", value, stderr, quadrature)
    return ReferenceValue(value=value, stderr=stderr, provenance=Provenance.CQMC_QUADRATURE_CHECKED, n=n,
                          reps=len(estimates), quadrature_value=quadrature)


def convergence_study(config: ExperimentConfig, reference: Optional[ReferenceValue] = None) -> ConvergenceReport:
    """
    Replicated estimates at every configured sample size, reduced to mean absolute errors and a fitted slope.

    Replicate r always uses the seed (config.seed, r), and results are reduced in index order, so the report does not
    depend on the number of workers.
    """
    reference = reference_value(config) if reference is None else reference
    label = method_label(config)
    LOGGER.info("Starting %s study: %s, d=%d, %s, %d replicates", label, config.example.value, config.d,
                config.construction.value, config.reps)
    evaluator, s = build_evaluator(config)
    estimates = _replicates(evaluator, s, config.sampler, config.n, config.reps, config.seed, "replicate", config.workers)
    report = summarize_errors(label, config.n, estimates - reference.value, reference, config.reps, config.seed)
    for row in report.rows:
        LOGGER.info("%s n=%d mean error %.3e (± %.1e)", label, row.n, row.mean_abs_error, row.stderr)
    LOGGER.info("%s fitted slope %.3f ± %.3f", label, report.slope, report.slope_stderr)
    return report


def compare_methods(config: ExperimentConfig) -> List[ConvergenceReport]:
    """
    Plain MC, plain RQMC, CQMC and CQMC with GPCA on the same integrand, seeds and reference.
    """
    smoothing = "cond:first" if config.smoothing == "none" else config.smoothing
    reference = reference_value(config)
    methods = [
        attr.evolve(config, sampler=Sampler.MC, smoothing="none", reduce=ReduceMethod.NONE),
        attr.evolve(config, sampler=Sampler.RQMC, smoothing="none", reduce=ReduceMethod.NONE),
        attr.evolve(config, sampler=Sampler.RQMC, smoothing=smoothing, reduce=ReduceMethod.NONE),
        attr.evolve(config, sampler=Sampler.RQMC, smoothing=smoothing, reduce=ReduceMethod.GPCA),
    ]
    return [convergence_study(method, reference) for method in methods]


def emit_csv(report: ConvergenceReport, path: Union[str, pathlib.Path]) -> None:
    """
    Write the per-n rows with columns n,mean_abs_error,rmse,stderr.

    :throws StudyException: If the file cannot be written.
    """
    converter = _get_cattrs_converter(ConvergenceRow)
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in report.rows:
                writer.writerow(converter.unstructure(row))
    except OSError as e:
        raise StudyException(StudyStatus.OUTPUT_FAILED, f"cannot write {path}") from e


def emit_svg(reports: Union[ConvergenceReport, Sequence[ConvergenceReport]], path: Union[str, pathlib.Path]) -> None:
    """
    Draw mean absolute error against n on log-log axes, with n^−1/2 and n^−1 reference lines anchored at the first
    point of each series.

    :throws StudyException: If the file cannot be written.
    """
    reports = [reports] if isinstance(reports, ConvergenceReport) else list(reports)
    with matplotlib.rc_context({"svg.hashsalt": "conditionalqmc", "svg.fonttype": "none"}):
        figure = Figure(figsize=(6.4, 4.8))
        axes = figure.add_subplot()
        for index, report in enumerate(reports):
            ns = np.array([row.n for row in report.rows], dtype=float)
            errors = np.array([row.mean_abs_error for row in report.rows])
            color = f"C{index}"
            axes.loglog(ns, errors, marker="o", color=color, label=f"{report.label} (slope {report.slope:.2f})")
            if errors.size and errors[0] > 0:
                axes.loglog(ns, errors[0] * (ns / ns[0]) ** -0.5, linestyle=":", color=color, alpha=0.6,
                            label="$n^{-1/2}$" if index == 0 else None)
                axes.loglog(ns, errors[0] * (ns / ns[0]) ** -1.0, linestyle="--", color=color, alpha=0.6,
                            label="$n^{-1}$" if index == 0 else None)
        axes.set_xlabel("n")
        axes.set_ylabel("mean absolute error")
        axes.legend(loc="lower left", fontsize="small")
        try:
            figure.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise StudyException(StudyStatus.OUTPUT_FAILED, f"cannot write {path}") from e
