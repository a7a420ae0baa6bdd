# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import IntEnum
from itertools import combinations, product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .lds import SobolSampler
from .models.IntegrandSpec import IntegrandSpec
from .models.Provenance import Provenance
from .models.ReferenceValue import ReferenceValue
from .models.ConvergenceReport import ConvergenceReport
from .models.RootRegion import RootRegion
from .models.ScrambleSeed import ScrambleSeed
from .normal import inv_cdf, pdf
from .payoff import as_rows, f_eval, g_eval, insert_column
from .smooth import PreintegratedIntegrand, _oriented_psi

LOGGER = logging.getLogger(__name__)

MAX_DIMENSION = 3
HERMITE_NODES = 64
LEGENDRE_PANELS = 12
LEGENDRE_NODES = 16
TRUNCATION = 12.0
MAX_STUDY_EXPONENT = 12
MAX_STUDY_REPS = 20
_CHUNK = 4096

class AnovaStatus(IntEnum):
    DIMENSION_TOO_LARGE = 1
    """
    Tensor quadrature is only carried out for d ≤ 3.
    """

    BUDGET_EXCEEDED = 2
    """
    A term-rate study asked for more than 2^12 points or 20 replicates.
    """


class AnovaException(Exception):
    def __init__(self, status: AnovaStatus, message: Optional[str] = None):
        super().__init__("ANOVA oracle failed with status " + status.name + (": " + message if message else ""))
        self.status = status


def _hermite(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    return x, w / np.sqrt(2.0 * np.pi)


def _legendre_panels(lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss–Legendre nodes and weights on [lo_r, hi_r] for each row r, shape (n, panels·nodes).
    """
    x, w = np.polynomial.legendre.leggauss(LEGENDRE_NODES)
    edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, LEGENDRE_PANELS + 1)[None, :]
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    middle = 0.5 * (edges[:, 1:] + edges[:, :-1])
    nodes = middle[:, :, None] + half[:, :, None] * x[None, None, :]
    weights = half[:, :, None] * w[None, None, :]
    return nodes.reshape(lo.shape[0], -1), weights.reshape(lo.shape[0], -1)


def _grid(nodes: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = _hermite(nodes)
    if k == 0:
        return np.zeros((1, 0)), np.ones(1)
    points = np.array(list(product(x, repeat=k)))
    weights = np.prod(np.array(list(product(w, repeat=k))), axis=1)
    return points, weights


def _assemble(axes: Sequence[int], values: np.ndarray, other_axes: Sequence[int], other: np.ndarray) -> np.ndarray:
    """
    Interleave two coordinate blocks into rows ordered by 1-based axis index.
    """
    column = {axis: position for position, axis in enumerate(sorted(list(axes) + list(other_axes)))}
    full = np.empty((values.shape[0], len(column)))
    for position, axis in enumerate(axes):
        full[:, column[axis]] = values[:, position]
    for position, axis in enumerate(other_axes):
        full[:, column[axis]] = other[:, position]
    return full


def _normalize_subset(v: Iterable[int], d: int) -> Tuple[int, ...]:
    subset = tuple(sorted(set(int(k) for k in v)))
    if any(k < 1 or k > d for k in subset):
        raise ValueError(f"coordinates must lie in 1..{d}, got {subset}")
    return subset


class AnovaTermSet:
    """
    The ANOVA decomposition f = Σ_{v ⊆ 1:d} f_v of one integrand, evaluated by tensor quadrature.

    Gauss–Hermite rules integrate the smooth directions. The discontinuity of the indicator is handled by splitting
    one axis whose generating-matrix column has a single sign at the root ψ of φ and integrating that axis with
    composite Gauss–Legendre on [−12, 12]. Without such an axis, Gauss–Hermite with doubled nodes is used.
    """

    def __init__(self, spec: IntegrandSpec, nodes: int = HERMITE_NODES):
        """
        :throws AnovaException: If d > 3.
        """
        if spec.d > MAX_DIMENSION:
            raise AnovaException(AnovaStatus.DIMENSION_TOO_LARGE, f"d={spec.d} but tensor quadrature is limited to d ≤ {MAX_DIMENSION}")
        self.spec = spec
        self.nodes = nodes
        self._constants: Dict[Tuple[int, ...], float] = {}

    @property
    def d(self) -> int:
        return self.spec.d

    def _split_axis(self, axes: Sequence[int]) -> Optional[int]:
        ok = [k for k in axes if self.spec.matrix.sign_ok[k - 1]]
        return max(ok) if ok else None

    def project(self, v: Iterable[int], y: np.ndarray):
        """
        P_v f: the expectation of f over the coordinates in v, as a function of the others.

        :param v: 1-based coordinates integrated out.
        :param y: Values of the remaining coordinates in increasing index order, shape (d−|v|,) or (n, d−|v|).
        """
        v = _normalize_subset(v, self.d)
        keep = [k for k in range(1, self.d + 1) if k not in v]
        rows, single = as_rows(y, len(keep), "y")
        if not v:
            return f_eval(rows[0] if single else rows, self.spec)
        if not keep and v in self._constants:
            values = np.full(rows.shape[0], self._constants[v])
        else:
            values = np.concatenate([self._project_rows(v, keep, rows[start:start + _CHUNK])
                                     for start in range(0, rows.shape[0], _CHUNK)]) if rows.shape[0] else np.zeros(0)
            if not keep:
                self._constants[v] = float(values[0])
        return float(values[0]) if single else values

    def _project_rows(self, v: Tuple[int, ...], keep: List[int], rows: np.ndarray) -> np.ndarray:
        split = self._split_axis(v)
        hermite_axes = [k for k in v if k != split]
        grid, grid_weights = _grid(self.nodes if split else 2 * self.nodes, len(hermite_axes))
        n, g = rows.shape[0], grid.shape[0]
        # every (row, grid point) pair as one point of the coordinates other than the split axis
        repeated = np.repeat(rows, g, axis=0)
        tiled = np.tile(grid, (n, 1))
        if split is None:
            values = f_eval(_assemble(keep, repeated, hermite_axes, tiled), self.spec)
            return (values.reshape(n, g) * grid_weights[None, :]).sum(axis=1)
        other = _assemble(keep, repeated, hermite_axes, tiled)
        inner = self._split_integral(split, other)
        return (inner.reshape(n, g) * grid_weights[None, :]).sum(axis=1)

    def _split_integral(self, split: int, other: np.ndarray) -> np.ndarray:
        """
        ∫ f(x) ρ(x_split) dx_split for each row of the other coordinates, integrating g above the root.
        """
        region, t, sign, _ = _oriented_psi(self.spec, split, other, 1e-12, 100)
        lo = np.where(region == int(RootRegion.ROOT), np.clip(np.nan_to_num(t), -TRUNCATION, TRUNCATION), -TRUNCATION)
        lo = np.where(region == int(RootRegion.ALL_BELOW), TRUNCATION, lo)
        hi = np.full(other.shape[0], TRUNCATION)
        nodes, weights = _legendre_panels(lo, hi)
        count = nodes.shape[1]
        inner = np.empty(other.shape[0])
        block = max(1, _CHUNK // 2)
        for start in range(0, other.shape[0], block):
            stop = min(start + block, other.shape[0])
            points = insert_column(np.repeat(other[start:stop], count, axis=0), split, sign * nodes[start:stop].reshape(-1))
            values = g_eval(points, self.spec).reshape(stop - start, count)
            inner[start:stop] = np.sum(values * pdf(nodes[start:stop]) * weights[start:stop], axis=1)
        return inner

    def integral(self) -> float:
        """
        I(f) = f_∅.
        """
        return self.project(range(1, self.d + 1), np.zeros(0))

    def term(self, v: Iterable[int], x_v: np.ndarray):
        """
        f_v(x_v) = Σ_{w ⊆ v} (−1)^{|v|−|w|} P_{−w} f(x_w).

        :param v: 1-based coordinates of the term.
        :param x_v: Values of those coordinates, shape (|v|,) or (n, |v|).
        """
        v = _normalize_subset(v, self.d)
        if not v:
            rows, single = as_rows(x_v, 0, "x_v")
            value = self.integral()
            return value if single else np.full(rows.shape[0], value)
        rows, single = as_rows(x_v, len(v), "x_v")
        total = np.zeros(rows.shape[0])
        for size in range(len(v) + 1):
            for w in combinations(range(len(v)), size):
                integrated = [k for k in range(1, self.d + 1) if k not in [v[p] for p in w]]
                sign = (-1) ** (len(v) - size)
                total += sign * np.asarray(self.project(integrated, rows[:, list(w)]))
        return float(total[0]) if single else total

    def expectation(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """
        E[fn(x)] for x ~ N(0, I_d), where fn is smooth except across {φ = 0}.

        :param fn: Maps full points (n, d) to values (n,).
        """
        split = self._split_axis(range(1, self.d + 1))
        if split is None:
            grid, weights = _grid(2 * self.nodes, self.d)
            return float(np.sum(np.asarray(fn(grid)) * weights))
        other_axes = [k for k in range(1, self.d + 1) if k != split]
        grid, grid_weights = _grid(self.nodes, self.d - 1)
        region, t, sign, _ = _oriented_psi(self.spec, split, grid, 1e-12, 100)
        cut = np.where(region == int(RootRegion.ROOT), np.clip(np.nan_to_num(t), -TRUNCATION, TRUNCATION), 0.0)
        total = 0.0
        for lo, hi in ((np.full_like(cut, -TRUNCATION), cut), (cut, np.full_like(cut, TRUNCATION))):
            nodes, weights = _legendre_panels(lo, hi)
            count = nodes.shape[1]
            for start in range(0, grid.shape[0], max(1, _CHUNK // 4)):
                stop = min(start + max(1, _CHUNK // 4), grid.shape[0])
                block = nodes[start:stop]
                points = insert_column(np.repeat(grid[start:stop], count, axis=0), split, sign * block.reshape(-1))
                values = np.asarray(fn(points)).reshape(stop - start, count)
                inner = np.sum(values * pdf(block) * weights[start:stop], axis=1)
                total += float(np.sum(inner * grid_weights[start:stop]))
        return total

    def integrate_preintegrated(self, j: int) -> float:
        """
        I(P_j f) by Gauss–Hermite quadrature over the d−1 remaining coordinates.
        """
        pint = PreintegratedIntegrand(self.spec, j)
        grid, weights = _grid(self.nodes, self.d - 1)
        return float(np.sum(np.asarray(pint(grid)) * weights))


def project(spec: IntegrandSpec, v: Iterable[int], y: np.ndarray, nodes: int = HERMITE_NODES):
    """
    P_v f(y); see AnovaTermSet.project.
    """
    return AnovaTermSet(spec, nodes).project(v, y)


def anova_term(spec: IntegrandSpec, v: Iterable[int], x_v: np.ndarray, nodes: int = HERMITE_NODES):
    """
    f_v(x_v); see AnovaTermSet.term.
    """
    return AnovaTermSet(spec, nodes).term(v, x_v)


def expectation(spec: IntegrandSpec, fn: Callable[[np.ndarray], np.ndarray], nodes: int = HERMITE_NODES) -> float:
    return AnovaTermSet(spec, nodes).expectation(fn)


def integrate_preintegrated(spec: IntegrandSpec, j: int, nodes: int = HERMITE_NODES) -> float:
    return AnovaTermSet(spec, nodes).integrate_preintegrated(j)


def term_rate_study(spec: IntegrandSpec, v: Iterable[int], exponents: Sequence[int], reps: int, seed: int = 42,
                    nodes: int = HERMITE_NODES) -> ConvergenceReport:
    """
    RQMC mean absolute error of ∫ f_v over its |v| coordinates, whose exact value is 0 for v ≠ ∅.

    :param exponents: log2 sample sizes, each at most 12.
    :param reps: Replicates per sample size, at most 20.
    :throws AnovaException: If d is not 2 or 3, or the study exceeds the budget.
    """
    from .harness import summarize_errors

    if spec.d not in (2, 3):
        raise AnovaException(AnovaStatus.DIMENSION_TOO_LARGE, f"term-rate studies run at d = 2 or 3, got d={spec.d}")
    exponents = tuple(int(m) for m in exponents)
    if max(exponents) > MAX_STUDY_EXPONENT or reps > MAX_STUDY_REPS:
        raise AnovaException(AnovaStatus.BUDGET_EXCEEDED, f"n ≤ 2^{MAX_STUDY_EXPONENT} and reps ≤ {MAX_STUDY_REPS} required")
    terms = AnovaTermSet(spec, nodes)
    v = _normalize_subset(v, spec.d)
    reference = ReferenceValue(value=0.0, stderr=0.0, provenance=Provenance.EXACT)
    errors = np.zeros((len(exponents), reps))
    if v:
        sampler = SobolSampler(len(v))
        for row, m in enumerate(exponents):
            for rep in range(reps):
                x_v = inv_cdf(sampler.uniforms(m, ScrambleSeed(seed, rep, "anova")))
                errors[row, rep] = float(np.mean(terms.term(v, x_v)))
            LOGGER.info("Term %s at n=2^%d: mean error %.3e", v, m, np.mean(np.abs(errors[row])))
    label = "anova:" + ",".join(str(k) for k in v) if v else "anova:empty"
    return summarize_errors(label, exponents, errors, reference, reps, seed)
