# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

import numpy as np
from scipy import optimize

from conditionalqmc.models.Construction import Construction
from conditionalqmc.models.Example import Example
from conditionalqmc.models.IntegrandSpec import IntegrandSpec
from conditionalqmc.models.MarketParams import MarketParams
from conditionalqmc.path import make_matrix
from conditionalqmc.payoff import insert_column, phi

def make_spec(example: Example = Example.DELTA, d: int = 4, construction: Construction = Construction.STANDARD,
              **params) -> IntegrandSpec:
    market = MarketParams(d=d, **params)
    return IntegrandSpec(example, market, make_matrix(construction, market))

def bisect_root(spec: IntegrandSpec, j: int, y: np.ndarray, lo: float = -60.0, hi: float = 60.0) -> float:
    """
    The root of x_j ↦ φ(x_j, y) by brentq, as an oracle for the root solver.
    """
    point = np.asarray(y, dtype=float)[None, :]
    return optimize.brentq(lambda s: float(phi(insert_column(point, j, s)[0], spec)), lo, hi, xtol=1e-14)
