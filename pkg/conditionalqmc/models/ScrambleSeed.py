# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.
import zlib

from attr import define
import attr
import numpy as np

@define(frozen=True)
class ScrambleSeed:
    """
    Identifies one randomization of a point set.

    The same seed always yields the same random stream, regardless of which thread draws it or when.
    """

    master_seed: int = attr.ib(converter=int)
    """
    The study-wide seed, a 64-bit integer.
    """

    replicate: int = attr.ib(default=0, converter=int)
    """
    The replicate index within the study.
    """

    stream: str = attr.ib(default="replicate")
    """
    A tag separating independent uses of the same master seed, for example "replicate", "gpca" or "reference".
    """

    def __attrs_post_init__(self):
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.replicate < 0:
            raise ValueError(f"replicate must be nonnegative, got {self.replicate}")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=(zlib.crc32(self.stream.encode("utf-8")), self.replicate))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))
