# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from typing import Any, Dict, Optional, Sequence
import argparse
import configparser
import json
import logging
import pathlib
import sys

import cattrs
import numpy as np

from .anova import AnovaException, AnovaTermSet, term_rate_study
from .harness import StudyException, build_spec, compare_methods, convergence_study, emit_csv, emit_svg, reference_value
from .lds import NetException
from .models.ConvergenceReport import ConvergenceReport
from .models.ExperimentConfig import ExperimentConfig
from .models.LibraryUtility import _get_cattrs_converter, parse_exponents
from .smooth import PreintegrationException, boundary_point, smoothness_probe

LOGGER = logging.getLogger(__name__)

PROFILES = {
    "default": ExperimentConfig,
    "desk": ExperimentConfig.desk,
    "full": ExperimentConfig.full,
}

_CONFIG_SECTION = "cqmc"

# flag name → ExperimentConfig field, for the flags every subcommand shares
_EXPERIMENT_FLAGS = {
    "example": str, "d": int, "s0": float, "strike": float, "rate": float, "sigma": float, "maturity": float,
    "construction": str, "seed": int,
}
_STUDY_FLAGS = {
    "smoothing": str, "reduce": str, "sampler": str, "n": str, "reps": int, "workers": int, "out": str, "plot": str,
    "gpca-samples": int, "reference-exponent": int, "reference-reps": int,
}


def read_config_file(path: str) -> Dict[str, str]:
    """
    Read plain `key = value` lines; keys use the flag names with - or _.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = pathlib.Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValueError(f"cannot read config file {path}") from e
    parser.read_string(f"[{_CONFIG_SECTION}]\n" + text, source=path)
    return {key.replace("-", "_"): value for key, value in parser[_CONFIG_SECTION].items()}


def resolve_config(profile: str = "default", config_path: Optional[str] = None,
                   overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Layer configuration sources: built-in defaults, then the named profile, then the config file, then flags.
    """
    converter = _get_cattrs_converter(ExperimentConfig)
    values = converter.unstructure(PROFILES[profile]())
    if config_path is not None:
        from_file = read_config_file(config_path)
        unknown = sorted(set(from_file) - set(values) - {"out", "plot"})
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        values.update(from_file)
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        return converter.structure(values, ExperimentConfig)
    except cattrs.BaseValidationError as e:
        raise ValueError("; ".join(cattrs.transform_error(e))) from e


def _add_flags(parser: argparse.ArgumentParser, flags: Dict[str, type]) -> None:
    for flag, kind in flags.items():
        parser.add_argument(f"--{flag}", type=kind, default=None, dest=flag.replace("-", "_"))


def build_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqmc", description="Conditional quasi-Monte Carlo for Asian option integrands.")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a convergence study and write CSV/SVG reports.")
    reference = commands.add_parser("reference", help="Compute the reference value of an integrand.")
    for sub in (run, reference):
        sub.add_argument("--config", default=None, help="A file of key = value lines mirroring the flags.")
        sub.add_argument("--profile", default="default", choices=sorted(PROFILES))
        sub.add_argument("--json", action="store_true", help="Print the result as JSON.")
        _add_flags(sub, _EXPERIMENT_FLAGS)
        _add_flags(sub, _STUDY_FLAGS)
    run.add_argument("--compare", action="store_true", help="Run MC, RQMC, CQMC and CQMC+GPCA side by side.")

    anova = commands.add_parser("anova-check", help="ANOVA identities and the per-term RQMC rate study (d ≤ 3).")
    _add_flags(anova, _EXPERIMENT_FLAGS)
    anova.add_argument("--v", default="1", help="Comma-separated 1-based coordinates of the term.")
    anova.add_argument("--n", default="6..12", help="log2 sample sizes, e.g. 6..12.")
    anova.add_argument("--reps", type=int, default=20)

    probe = commands.add_parser("probe-smoothness", help="Finite-difference derivatives of P_j f along a path.")
    _add_flags(probe, _EXPERIMENT_FLAGS)
    probe.add_argument("--j", type=int, default=1, help="The conditioned column, 1-based.")
    probe.add_argument("--step", type=float, default=1e-3)
    probe.add_argument("--points", type=int, default=10, help="Path points on each side of the center.")
    return parser


def _overrides(args: argparse.Namespace, flags: Dict[str, type]) -> Dict[str, Any]:
    return {flag.replace("-", "_"): getattr(args, flag.replace("-", "_")) for flag in flags}


def _print_report(report: ConvergenceReport) -> None:
    print(f"{report.label}: slope {report.slope:.3f} ± {report.slope_stderr:.3f} (reference {report.reference.value:.10g}, "
          f"{report.reference.provenance.value})")
    for row in report.rows:
        print(f"  n={row.n:<8d} mean_abs_error={row.mean_abs_error:.4e} rmse={row.rmse:.4e} stderr={row.stderr:.2e}")


def _suffixed(path: str, label: str) -> str:
    target = pathlib.Path(path)
    return str(target.with_name(f"{target.stem}-{label.replace('+', '-')}{target.suffix}"))


def _run(args: argparse.Namespace) -> int:
    config = resolve_config(args.profile, args.config, {**_overrides(args, _EXPERIMENT_FLAGS), **_overrides(args, _STUDY_FLAGS)})
    reports = compare_methods(config) if args.compare else [convergence_study(config)]
    if config.out:
        for report in reports:
            emit_csv(report, _suffixed(config.out, report.label) if args.compare else config.out)
    if config.plot:
        emit_svg(reports, config.plot)
    if args.json:
        converter = _get_cattrs_converter(ConvergenceReport)
        print(json.dumps([converter.unstructure(report) for report in reports], indent=2, sort_keys=True))
    else:
        for report in reports:
            _print_report(report)
    return 0


def _reference(args: argparse.Namespace) -> int:
    config = resolve_config(args.profile, args.config, {**_overrides(args, _EXPERIMENT_FLAGS), **_overrides(args, _STUDY_FLAGS)})
    reference = reference_value(config)
    if args.json:
        print(json.dumps(_get_cattrs_converter(type(reference)).unstructure(reference), indent=2, sort_keys=True))
    else:
        print(f"{reference.value:.12g} ± {reference.stderr:.3g} ({reference.provenance.value})")
    return 0


def _anova_check(args: argparse.Namespace) -> int:
    overrides = {**_overrides(args, _EXPERIMENT_FLAGS), "smoothing": "none"}
    overrides["d"] = overrides["d"] or 2
    config = resolve_config("default", None, overrides)
    spec = build_spec(config)
    v = tuple(int(k) for k in args.v.split(",") if k.strip())
    terms = AnovaTermSet(spec)
    x = np.random.default_rng(config.seed).standard_normal((100, spec.d))
    subsets = [tuple(k for k in range(1, spec.d + 1) if mask >> (k - 1) & 1) for mask in range(2 ** spec.d)]
    total = sum(np.asarray(terms.term(w, x[:, [k - 1 for k in w]] if w else np.zeros((100, 0)))) for w in subsets)
    exact = terms.project((), x)
    reconstruction = float(np.max(np.abs(total - exact) / (np.abs(exact) + 1.0)))
    print(f"I(f) = {terms.integral():.12g}")
    print(f"reconstruction: max relative error {reconstruction:.3e} over 100 points")
    report = term_rate_study(spec, v, parse_exponents(args.n), args.reps, config.seed)
    _print_report(report)
    return 0


def _probe_smoothness(args: argparse.Namespace) -> int:
    config = resolve_config("default", None, {**_overrides(args, _EXPERIMENT_FLAGS), "smoothing": "none"})
    spec = build_spec(config)
    k = spec.d - 1
    if k == 0:
        raise ValueError("probing needs d ≥ 2")
    spec.matrix.check_column(args.j)
    if spec.matrix.sign_ok[args.j - 1]:
        center, direction = np.zeros(k), np.ones(k)
    else:
        direction = np.eye(k)[0]
        center = boundary_point(spec, args.j, np.zeros(k), direction)
    report = smoothness_probe(spec, args.j, center, direction, step=args.step, half_points=args.points)
    print(f"column {args.j} ({spec.matrix.construction.value}, sign condition {'holds' if spec.matrix.sign_ok[args.j - 1] else 'fails'})")
    print(f"step {report.step:g}: first-derivative jump {report.first_jump:.3e}, second-derivative jump "
          f"{report.second_jump:.3e}, max |first derivative| {report.max_abs_first:.3e}")
    return 0


_COMMANDS = {
    "run": _run,
    "reference": _reference,
    "anova-check": _anova_check,
    "probe-smoothness": _probe_smoothness,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_argument_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, NetException, PreintegrationException, AnovaException, StudyException) as e:
        LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"cqmc: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
