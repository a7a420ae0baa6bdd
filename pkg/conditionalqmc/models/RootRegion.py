# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import IntEnum

from .LibraryUtility import LibraryEnumMeta

class RootRegion(IntEnum, metaclass=LibraryEnumMeta):
    """
    Where a point y of the remaining coordinates falls for the conditioned column j.
    """
    ROOT = 0
    """
    y ∈ U_j: x_j ↦ φ(x_j, y) crosses zero exactly once.
    """

    ALL_ABOVE = 1
    """
    y ∈ U_j⁺: φ(x_j, y) ≥ 0 for every x_j.
    """

    ALL_BELOW = 2
    """
    y ∈ U_j⁻: φ(x_j, y) < 0 for every x_j.
    """
