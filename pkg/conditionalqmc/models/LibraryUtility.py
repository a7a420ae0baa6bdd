# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from enum import Enum, EnumMeta
from functools import lru_cache
from typing import Any, List, Tuple, Type, TypeVar

from attr import Attribute, fields, has
from cattrs.gen import make_dict_structure_fn, make_dict_unstructure_fn, override
import cattrs
import numpy as np

T = TypeVar('T')

class LibraryEnumMeta(EnumMeta):
    def __contains__(c, val):
        try:
            c(val)
        except ValueError:
            return False
        return True


def parse_exponents(value: Any) -> Tuple[int, ...]:
    """
    Parse a list of log2 sample sizes.

    Accepts an iterable of integers, a range string ``"8..18"`` (inclusive) or a
    comma separated list ``"8,10,12"``.
    """
    if isinstance(value, str):
        text = value.strip()
        if ".." in text:
            first, last = text.split("..", 1)
            lo, hi = int(first), int(last)
            if hi < lo:
                raise ValueError(f"exponent range {text!r} is empty")
            return tuple(range(lo, hi + 1))
        return tuple(int(part) for part in text.split(",") if part.strip())
    return tuple(int(v) for v in value)


def _structure_enum(value: Any, enum_type: Type[Enum]) -> Enum:
    if isinstance(value, enum_type):
        return value
    if isinstance(value, str) and value.isdigit() and issubclass(enum_type, int):
        return enum_type(int(value))
    return enum_type(value)


@lru_cache(maxsize=None)
def _get_cattrs_converter(destination_class: Type[T]) -> cattrs.Converter:
    c = cattrs.Converter()

    # Enums travel as their values, numpy scalars and arrays as plain Python values
    c.register_unstructure_hook_func(lambda t: isinstance(t, type) and issubclass(t, Enum), lambda e: e.value)
    c.register_structure_hook_func(lambda t: isinstance(t, type) and issubclass(t, Enum), _structure_enum)
    c.register_unstructure_hook(np.ndarray, lambda a: a.tolist())
    c.register_structure_hook(np.ndarray, lambda d, _: np.asarray(d, dtype=float))
    c.register_structure_hook_func(lambda t: t == Tuple[int, ...], lambda d, _: parse_exponents(d))
    c.register_structure_hook(bool, lambda d, _: d if isinstance(d, bool) else str(d).strip().lower() in ("1", "true", "yes", "on"))

    def make_overrides(cl):
        attributes: List[Attribute] = fields(cl)
        cattrs_overrides = {}
        # Fields marked internal never leave the process
        for attribute in attributes:
            if attribute.metadata.get('internal'):
                cattrs_overrides[attribute.name] = override(omit=True)
            elif attribute.default is None:
                cattrs_overrides[attribute.name] = override(omit_if_default=True)
        return cattrs_overrides

    c.register_structure_hook_factory(has, lambda cl: make_dict_structure_fn(cl, c, **make_overrides(cl)))
    c.register_unstructure_hook_factory(has, lambda cl: make_dict_unstructure_fn(cl, c, **make_overrides(cl)))
    return c
