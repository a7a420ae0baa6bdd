# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class PreintegrationMethod(str, Enum, metaclass=LibraryEnumMeta):
    """
    How the conditioned coordinate is integrated out.
    """
    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"
