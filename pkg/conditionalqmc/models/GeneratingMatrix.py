# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.
from typing import Tuple

from attr import define
import attr
import numpy as np

from .Construction import Construction

def _column_signs(matrix: np.ndarray) -> Tuple[int, ...]:
    signs = []
    for column in np.asarray(matrix).T:
        if np.all(column >= 0):
            signs.append(1)
        elif np.all(column <= 0):
            signs.append(-1)
        else:
            signs.append(0)
    return tuple(signs)

@define(frozen=True)
class GeneratingMatrix:
    """
    A d×d matrix A with AAᵀ = Σ that maps i.i.d. standard normals to a discretized Brownian path.
    """

    matrix: np.ndarray = attr.ib(eq=False)
    """
    The matrix A. Row i holds the loadings of the Brownian motion at t_i.
    """

    construction: Construction = attr.ib()
    """
    How the matrix was built.
    """

    column_signs: Tuple[int, ...] = attr.ib(default=None)
    """
    Per column: 1 if all entries are ≥ 0, −1 if all entries are ≤ 0 (and some is negative), 0 for mixed signs.
    Derived from the matrix when not given.
    """

    def __attrs_post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"generating matrix must be square, got shape {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.column_signs is None:
            object.__setattr__(self, "column_signs", _column_signs(matrix))

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def sign_ok(self) -> Tuple[bool, ...]:
        """
        Per column, whether all entries share one sign (zeros allowed).
        """
        return tuple(sign != 0 for sign in self.column_signs)

    def column(self, j: int) -> np.ndarray:
        """
        Column j, 1-based.
        """
        self.check_column(j)
        return self.matrix[:, j - 1]

    def check_column(self, j: int) -> None:
        if not 1 <= j <= self.d:
            raise ValueError(f"column j must be in 1..{self.d}, got {j}")
