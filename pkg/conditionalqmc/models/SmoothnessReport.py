# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr
import numpy as np

@define(frozen=True)
class SmoothnessReport:
    """
    Finite-difference directional derivatives of a preintegrated integrand along a path of points.
    """

    j: int = attr.ib()
    """
    The conditioned column, 1-based.
    """

    step: float = attr.ib()
    """
    The finite-difference step h along the path direction.
    """

    positions: np.ndarray = attr.ib(eq=False)
    """
    Path parameters at which the derivatives were taken.
    """

    first_derivative: np.ndarray = attr.ib(eq=False)

    second_derivative: np.ndarray = attr.ib(eq=False)

    first_jump: float = attr.ib()
    """
    The largest second difference of consecutive first-derivative values; tends to 0 with the path spacing when the
    derivative is continuous.
    """

    second_jump: float = attr.ib()
    """
    The same measure taken over the second-derivative sequence.
    """

    max_abs_first: float = attr.ib()
    """
    The largest |first derivative| seen along the path.
    """
