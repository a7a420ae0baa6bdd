# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum

from .LibraryUtility import LibraryEnumMeta

class TransformProvenance(str, Enum, metaclass=LibraryEnumMeta):
    IDENTITY = "identity"
    GPCA = "gpca"
