# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr
import numpy as np

from .RootRegion import RootRegion

@define(frozen=True)
class RootSolution:
    """
    The classification of a batch of points y and, where it exists, the root ψ_j(y) of φ(·, y).
    """

    region: np.ndarray = attr.ib(eq=False)
    """
    RootRegion values, shape (n,).
    """

    root: np.ndarray = attr.ib(eq=False)
    """
    ψ_j(y) on ROOT points and NaN elsewhere, shape (n,), in the original x_j orientation.
    """

    iterations: int = attr.ib(default=0)
    """
    Newton iterations used by the slowest point; 0 when every root came from a closed form.
    """

    def at(self, index: int) -> RootRegion:
        return RootRegion(int(self.region[index]))
