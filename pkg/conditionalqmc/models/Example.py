# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class Example(str, Enum, metaclass=LibraryEnumMeta):
    """
    The integrands of the form g(x)·1{S_A ≥ K}: the arithmetic Asian option, its pathwise
    Greeks, and the binary Asian option.
    """
    PAYOFF = "payoff"
    DELTA = "delta"
    GAMMA = "gamma"
    RHO = "rho"
    THETA = "theta"
    VEGA = "vega"
    BINARY = "binary"
