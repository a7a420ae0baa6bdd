# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import IntEnum
from typing import Callable, Optional, Tuple
import logging

import numpy as np
from scipy import integrate, optimize, special

from .models.IntegrandSpec import IntegrandSpec
from .models.PreintegrationMethod import PreintegrationMethod
from .models.RootRegion import RootRegion
from .models.RootSolution import RootSolution
from .models.SmoothnessReport import SmoothnessReport
from .normal import pdf
from .payoff import as_rows, decompose, g_eval, insert_column

LOGGER = logging.getLogger(__name__)

ROOT_TOLERANCE = 1e-12
MAX_ITERATIONS = 100
QUADRATURE_TOLERANCE = 1e-10
QUADRATURE_SPAN = 40.0

class PreintegrationStatus(IntEnum):
    SIGN_CONDITION_VIOLATED = 1
    """
    The conditioned column has entries of both signs, so φ is not monotone in x_j.
    """

    ROOT_NOT_CONVERGED = 2

    QUADRATURE_FAILED = 3


class PreintegrationException(Exception):
    def __init__(self, status: PreintegrationStatus, message: Optional[str] = None):
        super().__init__("Preintegration failed with status " + status.name + (": " + message if message else ""))
        self.status = status


def mu(a, b, c, ell):
    """
    μ(a,b,c,ℓ) = (1/√(2π))∫_a^∞ (b + cx)·exp(−x²/2 + ℓx) dx
               = e^{ℓ²/2}·[(b + cℓ)·Φ(ℓ − a) + c·ρ(a − ℓ)].

    a may be −∞ (the whole line) or +∞ (an empty range). All arguments broadcast.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    ell = np.asarray(ell, dtype=float)
    density = np.where(np.isinf(a), 0.0, pdf(np.where(np.isinf(a), 0.0, a - ell)))
    value = np.exp(0.5 * ell * ell) * ((b + c * ell) * special.ndtr(ell - a) + c * density)
    return value if value.ndim else float(value)


def _column_sign(spec: IntegrandSpec, j: int) -> int:
    spec.matrix.check_column(j)
    sign = spec.matrix.column_signs[j - 1]
    if sign == 0:
        raise PreintegrationException(PreintegrationStatus.SIGN_CONDITION_VIOLATED, f"column {j} of the {spec.matrix.construction.value} matrix has mixed signs")
    return sign


def _solve_roots(log_w: np.ndarray, ell: np.ndarray, log_c: np.ndarray, scale: np.ndarray, tolerance: float,
                 max_iterations: int) -> Tuple[np.ndarray, int]:
    """
    Solve Σ_i exp(log_w_i + ℓ_i t) = exp(log_c) for t, row by row, with every ℓ_i > 0.

    Newton steps on h(t) = logsumexp(log_w + ℓt) − log_c, kept inside the bracket [q/ℓ_max, q/ℓ_min]
    (ordered) with q = log_c − logsumexp(log_w); steps leaving the bracket are replaced by bisection.
    """
    q = log_c - special.logsumexp(log_w, axis=1)
    ell_min, ell_max = np.min(ell), np.max(ell)
    if np.isclose(ell_min, ell_max, rtol=1e-15, atol=0.0):
        return q / ell_max, 0
    lo = np.minimum(q / ell_max, q / ell_min)
    hi = np.maximum(q / ell_max, q / ell_min)
    t = 0.5 * (lo + hi)
    pending = np.ones(t.shape, dtype=bool)
    for iteration in range(1, max_iterations + 1):
        exponents = log_w[pending] + ell[None, :] * t[pending, None]
        total = special.logsumexp(exponents, axis=1)
        h = total - log_c[pending]
        weights = np.exp(exponents - total[:, None])
        slope = weights @ ell
        residual = np.abs(np.exp(log_c[pending]) * np.expm1(h))
        tp = t[pending]
        collapsed = (hi[pending] - lo[pending]) <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(tp))
        done = (residual <= tolerance * scale[pending]) | collapsed
        lo_p = np.where(h < 0, tp, lo[pending])
        hi_p = np.where(h < 0, hi[pending], tp)
        step = tp - h / slope
        bisect = ~((step > lo_p) & (step < hi_p))
        t_new = np.where(bisect, 0.5 * (lo_p + hi_p), step)
        lo[pending] = lo_p
        hi[pending] = hi_p
        t[pending] = np.where(done, tp, t_new)
        pending[np.flatnonzero(pending)[done]] = False
        if not pending.any():
            LOGGER.debug("Root solve converged in %d iterations", iteration)
            return t, iteration
    raise PreintegrationException(PreintegrationStatus.ROOT_NOT_CONVERGED, f"{int(pending.sum())} roots unresolved after {max_iterations} iterations")


def _oriented_psi(spec: IntegrandSpec, j: int, rows: np.ndarray, tolerance: float,
                  max_iterations: int) -> Tuple[np.ndarray, np.ndarray, int, int]:
    """
    Classify rows and solve for the root in the reflected coordinate t = sign·x_j, in which φ is nondecreasing.
    """
    sign = _column_sign(spec, j)
    terms = decompose(spec, j, rows)
    d = spec.d
    ell = sign * terms.phi_ell
    active = ell > 0
    w = terms.phi_weights / d
    remainder = spec.params.strike - np.sum(w[:, ~active], axis=1)
    region = np.full(rows.shape[0], int(RootRegion.ROOT))
    region[remainder <= 0] = int(RootRegion.ALL_ABOVE)
    if not active.any():
        region[remainder > 0] = int(RootRegion.ALL_BELOW)
    t = np.full(rows.shape[0], np.nan)
    iterations = 0
    solve = region == int(RootRegion.ROOT)
    if solve.any():
        scale = np.full(int(solve.sum()), spec.params.strike + 1.0)
        t[solve], iterations = _solve_roots(np.log(w[solve][:, active]), ell[active], np.log(remainder[solve]), scale,
                                            tolerance, max_iterations)
    return region, t, sign, iterations


def psi(y: np.ndarray, spec: IntegrandSpec, j: int, tolerance: float = ROOT_TOLERANCE,
        max_iterations: int = MAX_ITERATIONS) -> RootSolution:
    """
    Classify y = x_{−j} into U_j (a single crossing), U_j⁺ (φ ≥ 0 for all x_j) or U_j⁻ (φ < 0 for all x_j), and
    solve φ(ψ_j(y), y) = 0 on U_j to |φ| ≤ tolerance·(K + 1).

    Roots have a closed form when every moving term of φ shares one exponent, which covers the standard matrix at
    j = 1 and j = d; otherwise a safeguarded Newton iteration runs.

    :param y: Shape (d−1,) or (n, d−1).
    :param spec: The integrand.
    :param j: The conditioned column, 1-based. Its entries must share one sign.
    :throws PreintegrationException: If the column has mixed signs or the iteration does not converge.
    """
    rows, _ = as_rows(y, spec.d - 1, "y")
    region, t, sign, iterations = _oriented_psi(spec, j, rows, tolerance, max_iterations)
    return RootSolution(region=region, root=sign * t, iterations=iterations)


def _lower_limits(region: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.where(region == int(RootRegion.ALL_ABOVE), -np.inf, np.where(region == int(RootRegion.ALL_BELOW), np.inf, t))


def _quad(func: Callable[[float], float], lo: float, hi: float) -> float:
    value, error = integrate.quad(func, lo, hi, epsabs=1e-13, epsrel=QUADRATURE_TOLERANCE, limit=200)
    if not error <= 1e-8 * (1.0 + abs(value)):
        raise PreintegrationException(PreintegrationStatus.QUADRATURE_FAILED, f"error estimate {error:.3e} on [{lo:.6g}, {hi:.6g}]")
    return value


class PreintegratedIntegrand:
    """
    P_j f(y) = E[f(x) | x_{−j} = y], the integrand with coordinate x_j integrated out.

    Evaluation is vectorized over rows of y and safe to share between threads.
    """

    def __init__(self, spec: IntegrandSpec, j: int, method: PreintegrationMethod = PreintegrationMethod.ANALYTIC,
                 tolerance: float = ROOT_TOLERANCE, max_iterations: int = MAX_ITERATIONS):
        """
        :param spec: The integrand.
        :param j: The conditioned column, 1-based.
        :param method: Closed form through μ(a,b,c,ℓ), or adaptive quadrature of g·ρ above the root.
        :throws PreintegrationException: If column j has entries of both signs.
        """
        self.spec = spec
        self.j = j
        self.method = PreintegrationMethod(method)
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self._sign = _column_sign(spec, j)

    @property
    def dimension(self) -> int:
        return self.spec.d - 1

    def psi(self, y: np.ndarray) -> RootSolution:
        return psi(y, self.spec, self.j, self.tolerance, self.max_iterations)

    def __call__(self, y: np.ndarray):
        rows, single = as_rows(y, self.dimension, "y")
        if self.method == PreintegrationMethod.ANALYTIC:
            values = self._analytic(rows)
        else:
            values = self._quadrature(rows)
        return float(values[0]) if single else values

    def _analytic(self, rows: np.ndarray) -> np.ndarray:
        region, t, sign, _ = _oriented_psi(self.spec, self.j, rows, self.tolerance, self.max_iterations)
        terms = decompose(self.spec, self.j, rows)
        a = _lower_limits(region, t)[:, None]
        return np.sum(terms.weights * mu(a, terms.b, sign * terms.c, sign * terms.ell[None, :]), axis=1)

    def _quadrature(self, rows: np.ndarray) -> np.ndarray:
        region, t, sign, _ = _oriented_psi(self.spec, self.j, rows, self.tolerance, self.max_iterations)
        values = np.zeros(rows.shape[0])
        for index, row in enumerate(rows):
            if region[index] == int(RootRegion.ALL_BELOW):
                continue
            point = row[None, :]
            integrand = lambda s: float(g_eval(insert_column(point, self.j, sign * s), self.spec)[0]) * float(pdf(s))
            if region[index] == int(RootRegion.ALL_ABOVE):
                lo, hi = -QUADRATURE_SPAN, QUADRATURE_SPAN
            else:
                lo = max(t[index], -QUADRATURE_SPAN)
                hi = max(t[index], 0.0) + QUADRATURE_SPAN
            values[index] = _quad(integrand, lo, hi)
        LOGGER.debug("Quadrature preintegration of %d points", rows.shape[0])
        return values


def preintegrate(y: np.ndarray, spec: IntegrandSpec, j: int, method: PreintegrationMethod = PreintegrationMethod.ANALYTIC):
    """
    Evaluate P_j f at y. See PreintegratedIntegrand.
    """
    return PreintegratedIntegrand(spec, j, method)(y)


def _phi_profile(spec: IntegrandSpec, j: int, row: np.ndarray):
    terms = decompose(spec, j, row[None, :])
    log_w = np.log(terms.phi_weights[0] / spec.d)
    ell = terms.phi_ell
    strike = spec.params.strike

    def phi(x: float) -> float:
        return float(np.exp(special.logsumexp(log_w + ell * x))) - strike

    def slope(x: float) -> float:
        return float(np.sum(ell * np.exp(log_w + ell * x)))

    return phi, slope


def _expand(func: Callable[[float], float], start: float, step: float, want_positive: bool, limit: int = 60) -> float:
    x = start
    for _ in range(limit):
        x += step
        if (func(x) > 0) == want_positive:
            return x
        step *= 2.0
    raise PreintegrationException(PreintegrationStatus.ROOT_NOT_CONVERGED, "no sign change found while bracketing")


def _minimiser(spec: IntegrandSpec, j: int, row: np.ndarray) -> Tuple[float, float]:
    """
    The minimiser Ψ of the convex map x_j ↦ φ(x_j, y) for a mixed-sign column, and the minimum value.
    """
    phi, slope = _phi_profile(spec, j, row)
    lo = _expand(slope, 0.0, -1.0, False) if slope(0.0) >= 0 else 0.0
    hi = _expand(slope, 0.0, 1.0, True) if slope(0.0) <= 0 else 0.0
    if lo == hi:
        return 0.0, phi(0.0)
    center = optimize.brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITERATIONS)
    return center, phi(center)


def conditional_expectation_two_sided(y: np.ndarray, spec: IntegrandSpec, j: int):
    """
    P_j f(y) for a column whose entries have both signs, by quadrature.

    φ is convex in x_j and tends to +∞ on both sides, so {φ ≥ 0} is the whole line when min φ ≥ 0 and the two tails
    outside the roots ψ^L < Ψ < ψ^R otherwise. Not smooth in y across the set where min φ = 0.

    :throws ValueError: If column j satisfies the sign condition; use preintegrate.
    """
    spec.matrix.check_column(j)
    if spec.matrix.column_signs[j - 1] != 0:
        raise ValueError(f"column {j} satisfies the sign condition; use preintegrate")
    rows, single = as_rows(y, spec.d - 1, "y")
    values = np.zeros(rows.shape[0])
    for index, row in enumerate(rows):
        point = row[None, :]
        integrand = lambda s: float(g_eval(insert_column(point, j, s), spec)[0]) * float(pdf(s))
        center, minimum = _minimiser(spec, j, row)
        if minimum >= 0:
            values[index] = _quad(integrand, center - QUADRATURE_SPAN, center) + _quad(integrand, center, center + QUADRATURE_SPAN)
            continue
        phi, _ = _phi_profile(spec, j, row)
        left = optimize.brentq(phi, _expand(phi, center, -1.0, True), center, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        right = optimize.brentq(phi, center, _expand(phi, center, 1.0, True), xtol=1e-15, rtol=4 * np.finfo(float).eps)
        values[index] = (_quad(integrand, min(left, 0.0) - QUADRATURE_SPAN, left)
                         + _quad(integrand, right, max(right, 0.0) + QUADRATURE_SPAN))
    return float(values[0]) if single else values


def minimum_phi(y: np.ndarray, spec: IntegrandSpec, j: int) -> float:
    """
    min over x_j of φ(x_j, y) at a single point y, for a mixed-sign column j.
    """
    return _minimiser(spec, j, np.asarray(y, dtype=float))[1]


def boundary_point(spec: IntegrandSpec, j: int, y0: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """
    A point y* = y0 + s·direction of the set B = {y : min_x φ(x, y) = 0}, where P_j f loses differentiability for
    a mixed-sign column j.

    :throws PreintegrationException: If no crossing of B is found along the line.
    """
    y0 = np.asarray(y0, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if spec.matrix.column_signs[j - 1] != 0:
        raise ValueError(f"column {j} satisfies the sign condition and has no boundary set")
    level = lambda s: minimum_phi(y0 + s * direction, spec, j)
    start = level(0.0)
    if start == 0:
        return y0
    for step in (1.0, -1.0):
        s = 0.0
        width = step
        for _ in range(8):
            s += width
            if (level(s) > 0) != (start > 0):
                root = optimize.brentq(level, min(0.0, s), max(0.0, s), xtol=1e-14, rtol=4 * np.finfo(float).eps)
                return y0 + root * direction
            width *= 2.0
    raise PreintegrationException(PreintegrationStatus.ROOT_NOT_CONVERGED, "no boundary point found along the line")


def smoothness_probe(spec: IntegrandSpec, j: int, y_boundary: np.ndarray, direction: Optional[np.ndarray] = None,
                     step: float = 1e-3, spacing: Optional[float] = None, half_points: int = 10) -> SmoothnessReport:
    """
    Central finite-difference first and second derivatives of P_j f along the path
    y(s) = y_boundary + s·direction, s = k·spacing for |k| ≤ half_points.

    Columns that satisfy the sign condition are evaluated in closed form; mixed-sign columns go through
    conditional_expectation_two_sided.

    :param step: The finite-difference step h.
    :param spacing: Distance between path points; defaults to the step.
    """
    y_boundary = np.asarray(y_boundary, dtype=float)
    k = spec.d - 1
    if direction is None:
        direction = np.eye(k)[0]
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    spacing = step if spacing is None else spacing
    positions = spacing * np.arange(-half_points, half_points + 1)
    if spec.matrix.column_signs[j - 1] != 0:
        evaluate = PreintegratedIntegrand(spec, j)
    else:
        evaluate = lambda rows: conditional_expectation_two_sided(rows, spec, j)
    centers = y_boundary[None, :] + positions[:, None] * direction[None, :]
    minus = np.asarray(evaluate(centers - step * direction))
    middle = np.asarray(evaluate(centers))
    plus = np.asarray(evaluate(centers + step * direction))
    first = (plus - minus) / (2.0 * step)
    second = (plus - 2.0 * middle + minus) / step ** 2
    report = SmoothnessReport(
        j=j,
        step=step,
        positions=positions,
        first_derivative=first,
        second_derivative=second,
        first_jump=float(np.max(np.abs(np.diff(first, 2)))) if first.size > 2 else 0.0,
        second_jump=float(np.max(np.abs(np.diff(second, 2)))) if second.size > 2 else 0.0,
        max_abs_first=float(np.max(np.abs(first))),
    )
    LOGGER.debug("Smoothness probe j=%d step=%g: first jump %.3e, second jump %.3e", j, step, report.first_jump, report.second_jump)
    return report
