# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class Construction(str, Enum, metaclass=LibraryEnumMeta):
    """
    How a generating matrix A with AAᵀ = Σ was built.
    """
    STANDARD = "standard"
    BROWNIAN_BRIDGE = "brownian-bridge"
    PCA = "pca"
    CUSTOM_ORTHOGONAL_COMPOSITE = "custom-orthogonal-composite" # Built by path.compose, not selectable from the CLI
