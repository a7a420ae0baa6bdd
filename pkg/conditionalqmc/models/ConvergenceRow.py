# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr

@define(frozen=True)
class ConvergenceRow:
    """
    The replicated error of an estimator at one sample size.
    """

    n: int = attr.ib()
    """
    The sample size 2^m.
    """

    mean_abs_error: float = attr.ib()
    """
    The mean over replicates of |estimate − reference|.
    """

    rmse: float = attr.ib()
    """
    The root mean square of estimate − reference over replicates.
    """

    stderr: float = attr.ib()
    """
    The standard error of mean_abs_error.
    """
