# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from typing import Tuple

import numpy as np

from .models.Example import Example
from .models.IntegrandSpec import IntegrandSpec
from .models.MarketParams import MarketParams
from .models.TermDecomposition import TermDecomposition
from .normal import cdf
from .path import log_assets


def as_rows(x: np.ndarray, width: int, name: str = "x") -> Tuple[np.ndarray, bool]:
    """
    View a point (width,) or batch (n, width) as a 2-D batch. The flag tells whether the input was a single point.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    rows = x[None, :] if single else x
    if rows.ndim != 2 or rows.shape[1] != width:
        raise ValueError(f"{name} must have {width} coordinates, got shape {x.shape}")
    return rows, single


def _unwrap(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def phi(x: np.ndarray, spec: IntegrandSpec):
    """
    φ(x) = S_A − K, the discriminant whose sign switches the integrand on.
    """
    rows, single = as_rows(x, spec.d)
    return _unwrap(np.mean(np.exp(log_assets(rows, spec.matrix, spec.params)), axis=1) - spec.params.strike, single)


def _g_rows(rows: np.ndarray, spec: IntegrandSpec) -> np.ndarray:
    params = spec.params
    d = params.d
    log_s = log_assets(rows, spec.matrix, params)
    s = np.exp(log_s)
    s_a = np.mean(s, axis=1)
    disc = params.discount
    example = spec.example
    if example == Example.PAYOFF:
        return disc * (s_a - params.strike)
    if example == Example.DELTA:
        return disc * s_a / params.s0
    if example == Example.GAMMA:
        score = log_s[:, 0] - np.log(params.s0) - (params.rate + 0.5 * params.sigma ** 2) * params.dt
        return disc * s_a * score / (params.s0 ** 2 * params.sigma ** 2 * params.dt)
    if example == Example.RHO:
        ds_dr = params.maturity / d ** 2 * (s @ np.arange(1, d + 1))
        return disc * (ds_dr - params.maturity * (s_a - params.strike))
    if example == Example.THETA:
        index = np.arange(1, d + 1)
        ds_dt = np.mean(s * (params.drift * index / (2 * d) + (log_s - np.log(params.s0)) / (2 * params.maturity)), axis=1)
        return disc * (ds_dt - params.rate * (s_a - params.strike))
    if example == Example.VEGA:
        ds_dsigma = s / params.sigma * (log_s - np.log(params.s0) - (params.rate + 0.5 * params.sigma ** 2) * params.times)
        return disc * np.mean(ds_dsigma, axis=1)
    return np.full(rows.shape[0], disc)


def g_eval(x: np.ndarray, spec: IntegrandSpec):
    """
    The smooth factor g of the example's integrand: the discounted payoff, a pathwise Greek estimate, or the constant
    e^{−μT} of the binary option.

    :param x: A point (d,) or a batch (n, d).
    """
    rows, single = as_rows(x, spec.d)
    return _unwrap(_g_rows(rows, spec), single)


def f_eval(x: np.ndarray, spec: IntegrandSpec):
    """
    f(x) = g(x)·1{φ(x) ≥ 0}.
    """
    rows, single = as_rows(x, spec.d)
    log_s = log_assets(rows, spec.matrix, spec.params)
    active = np.mean(np.exp(log_s), axis=1) >= spec.params.strike
    values = np.where(active, _g_rows(rows, spec), 0.0)
    return _unwrap(values, single)


def insert_column(y: np.ndarray, j: int, xj) -> np.ndarray:
    """
    Rebuild full points x from y = x_{−j} (shape (n, d−1)) and x_j (scalar or shape (n,)).
    """
    xj = np.broadcast_to(np.asarray(xj, dtype=float), (y.shape[0],))
    return np.concatenate([y[:, :j - 1], xj[:, None], y[:, j - 1:]], axis=1)


def decompose(spec: IntegrandSpec, j: int, y: np.ndarray) -> TermDecomposition:
    """
    Write g and φ as sums of affine-exponential terms in x_j at fixed y = x_{−j}.

    Path terms come first, one per monitoring date with ℓ_i = σ a_ij; the last term is the x_j-free constant
    (−K for the payoff, +TK for rho, +μK for theta, the whole integrand for the binary option, 0 otherwise).

    :param spec: The integrand.
    :param j: The column, 1-based.
    :param y: The remaining coordinates, shape (d−1,) or (n, d−1).
    """
    spec.matrix.check_column(j)
    params = spec.params
    d = params.d
    rows, _ = as_rows(y, d - 1, "y")
    n = rows.shape[0]
    log_g = log_assets(insert_column(rows, j, 0.0), spec.matrix, params)
    g = np.exp(log_g)
    level = log_g - np.log(params.s0)
    column = spec.matrix.column(j)
    ell = params.sigma * column
    disc = params.discount
    index = np.arange(1, d + 1)

    weights = np.zeros((n, d + 1))
    b = np.ones((n, d + 1))
    c = np.zeros((n, d + 1))
    constant = 0.0
    example = spec.example
    if example == Example.PAYOFF:
        weights[:, :d] = disc * g / d
        constant = -disc * params.strike
    elif example == Example.DELTA:
        weights[:, :d] = disc * g / (d * params.s0)
    elif example == Example.GAMMA:
        weights[:, :d] = disc * g / (d * params.s0 ** 2 * params.sigma ** 2 * params.dt)
        b[:, :d] = (level[:, 0] - (params.rate + 0.5 * params.sigma ** 2) * params.dt)[:, None]
        c[:, :d] = ell[0]
    elif example == Example.RHO:
        weights[:, :d] = disc * g * params.maturity * (index - d) / d ** 2
        constant = disc * params.maturity * params.strike
    elif example == Example.THETA:
        weights[:, :d] = disc * g / d
        b[:, :d] = params.drift * index / (2 * d) + level / (2 * params.maturity) - params.rate
        c[:, :d] = ell / (2 * params.maturity)
        constant = disc * params.rate * params.strike
    elif example == Example.VEGA:
        weights[:, :d] = disc * g / (d * params.sigma)
        b[:, :d] = level - (params.rate + 0.5 * params.sigma ** 2) * params.times
        c[:, :d] = ell
    else:
        constant = disc
    weights[:, d] = constant

    return TermDecomposition(
        j=j,
        weights=weights,
        b=b,
        c=c,
        ell=np.append(ell, 0.0),
        phi_weights=g,
        phi_ell=ell,
        strike=params.strike,
    )


def price_closed_form_digital(params: MarketParams) -> float:
    """
    The Black–Scholes price e^{−μT}Φ(d₂) of a digital call at a single date, the d=1 binary option.
    """
    d2 = (np.log(params.s0 / params.strike) + params.drift * params.maturity) / (params.sigma * np.sqrt(params.maturity))
    return float(params.discount * cdf(d2))
