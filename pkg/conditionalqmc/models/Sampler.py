# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class Sampler(str, Enum, metaclass=LibraryEnumMeta):
    """
    The point generator feeding an estimator.
    """
    RQMC = "rqmc"
    MC = "mc"
