# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class ReduceMethod(str, Enum, metaclass=LibraryEnumMeta):
    """
    Dimension reduction applied after conditioning.
    """
    NONE = "none"
    GPCA = "gpca"
