# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.
from typing import Optional

from attr import define
import attr

from .Provenance import Provenance

@define(frozen=True)
class ReferenceValue:
    """
    The value an estimator's error is measured against.
    """

    value: float = attr.ib()

    stderr: float = attr.ib()
    """
    The standard error of value; 0 for exact references.
    """

    provenance: Provenance = attr.ib()

    n: int = attr.ib(default=0)
    """
    Points per replicate used to compute the value; 0 for exact references.
    """

    reps: int = attr.ib(default=0)

    quadrature_value: Optional[float] = attr.ib(default=None)
    """
    The tensor quadrature value the estimate was checked against, when a check ran.
    """
