# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.
from typing import List

from attr import define
import attr

from .ConvergenceRow import ConvergenceRow
from .ReferenceValue import ReferenceValue

@define(frozen=True)
class ConvergenceReport:
    """
    Mean errors of one estimator over a range of sample sizes, with the fitted log-log slope.
    """

    label: str = attr.ib()
    """
    The method name, for example "cqmc" or "mc".
    """

    rows: List[ConvergenceRow] = attr.ib()

    slope: float = attr.ib()
    """
    The least-squares slope of log2 mean_abs_error against log2 n.
    """

    slope_stderr: float = attr.ib()

    reference: ReferenceValue = attr.ib()

    reps: int = attr.ib()

    master_seed: int = attr.ib()

    excluded_from_fit: int = attr.ib(default=2)
    """
    How many of the smallest sample sizes were left out of the slope fit.
    """

    def row(self, n: int) -> ConvergenceRow:
        for row in self.rows:
            if row.n == n:
                return row
        raise KeyError(n)
