# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class Provenance(str, Enum, metaclass=LibraryEnumMeta):
    """
    Where a reference value came from.
    """
    CQMC = "cqmc"
    """
    Replicated CQMC (+GPCA) estimate at a large sample size.
    """

    CQMC_QUADRATURE_CHECKED = "cqmc+quadrature"
    """
    CQMC estimate that also agreed with the tensor quadrature oracle (d ≤ 3).
    """

    EXACT = "exact"
    """
    d = 1: the conditional expectation is a constant and needs no sampling.
    """
