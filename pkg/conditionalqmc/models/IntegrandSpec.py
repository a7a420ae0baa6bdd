# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr

from .Example import Example
from .GeneratingMatrix import GeneratingMatrix
from .MarketParams import MarketParams

@define(frozen=True)
class IntegrandSpec:
    """
    One integrand f(x) = g(x)·1{φ(x) ≥ 0} over x ∈ R^d, with φ = S_A − K shared by every example.
    """

    example: Example = attr.ib()
    """
    Which g the integrand carries.
    """

    params: MarketParams = attr.ib()

    matrix: GeneratingMatrix = attr.ib()
    """
    The generating matrix mapping x to the asset path.
    """

    def __attrs_post_init__(self):
        if self.matrix.d != self.params.d:
            raise ValueError(f"generating matrix is {self.matrix.d}×{self.matrix.d} but d={self.params.d}")

    @property
    def d(self) -> int:
        return self.params.d
