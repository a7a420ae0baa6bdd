# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr
import numpy as np

from .TransformProvenance import TransformProvenance

ORTHOGONALITY_TOLERANCE = 1e-10

@define(frozen=True)
class OrthogonalTransform:
    """
    An orthogonal change of variables y ↦ U·y of the coordinates left after conditioning.
    """

    matrix: np.ndarray = attr.ib(eq=False)
    """
    U, shape (k, k).
    """

    provenance: TransformProvenance = attr.ib(default=TransformProvenance.IDENTITY)

    def __attrs_post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"transform must be square, got shape {matrix.shape}")
        defect = np.max(np.abs(matrix.T @ matrix - np.eye(matrix.shape[0]))) if matrix.size else 0.0
        if defect > ORTHOGONALITY_TOLERANCE:
            raise ValueError(f"transform is not orthogonal: max |UᵀU − I| = {defect:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, k: int) -> 'OrthogonalTransform':
        return cls(np.eye(k), TransformProvenance.IDENTITY)

    @property
    def k(self) -> int:
        return self.matrix.shape[0]
