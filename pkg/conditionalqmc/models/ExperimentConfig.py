# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.
import re
from typing import Optional, Tuple

from attr import define
import attr

from .Construction import Construction
from .Example import Example
from .LibraryUtility import parse_exponents
from .MarketParams import MarketParams
from .ReduceMethod import ReduceMethod
from .Sampler import Sampler

MAX_EXPONENT = 20

_SMOOTHING = re.compile(r"^(none|cond:(first|last|[0-9]+))$")

@define(frozen=True)
class ExperimentConfig:
    """
    Everything a convergence study needs. Market defaults are
    S(0)=100, K=100, μ=0.01, σ=0.4, T=1.
    """

    example: Example = attr.ib(default=Example.DELTA, converter=Example)

    d: int = attr.ib(default=4)

    s0: float = attr.ib(default=100.0)

    strike: float = attr.ib(default=100.0)

    rate: float = attr.ib(default=0.01)

    sigma: float = attr.ib(default=0.4)

    maturity: float = attr.ib(default=1.0)

    construction: Construction = attr.ib(default=Construction.STANDARD, converter=Construction)

    smoothing: str = attr.ib(default="cond:first")
    """
    none, cond:first, cond:last or cond:<j> with j 1-based.
    """

    reduce: ReduceMethod = attr.ib(default=ReduceMethod.NONE, converter=ReduceMethod)
    """
    Dimension reduction applied after conditioning. Ignored without smoothing.
    """

    sampler: Sampler = attr.ib(default=Sampler.RQMC, converter=Sampler)

    n: Tuple[int, ...] = attr.ib(default=tuple(range(8, 19)), converter=parse_exponents)
    """
    log2 of the sample sizes to study.
    """

    reps: int = attr.ib(default=200)
    """
    The number of independent replicates R per sample size.
    """

    seed: int = attr.ib(default=42)

    workers: int = attr.ib(default=1)

    out: Optional[str] = attr.ib(default=None)
    """
    Where to write the CSV report.
    """

    plot: Optional[str] = attr.ib(default=None)
    """
    Where to write the SVG chart.
    """

    gpca_samples: int = attr.ib(default=256)
    """
    Scrambled points at which gradients are sampled for GPCA.
    """

    reference_exponent: int = attr.ib(default=20)

    reference_reps: int = attr.ib(default=32)

    def __attrs_post_init__(self):
        if not self.n:
            raise ValueError("n must list at least one exponent")
        if any(m < 0 or m > MAX_EXPONENT for m in self.n):
            raise ValueError(f"n exponents must lie in 0..{MAX_EXPONENT}, got {list(self.n)}")
        if self.reference_exponent < 0 or self.reference_exponent > MAX_EXPONENT:
            raise ValueError(f"reference_exponent must lie in 0..{MAX_EXPONENT}, got {self.reference_exponent}")
        if self.reps < 2:
            raise ValueError(f"reps must be at least 2, got {self.reps}")
        if self.reference_reps < 2:
            raise ValueError(f"reference_reps must be at least 2, got {self.reference_reps}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if not _SMOOTHING.match(self.smoothing):
            raise ValueError(f"smoothing must be one of none|cond:first|cond:last|cond:<j>, got {self.smoothing!r}")
        self.conditioned_column()
        self.params()

    @classmethod
    def desk(cls, **overrides) -> 'ExperimentConfig':
        """
        Desk-scale profile: R=50, n=2^8..2^14.
        """
        return cls(**{"reps": 50, "n": tuple(range(8, 15)), **overrides})

    @classmethod
    def full(cls, **overrides) -> 'ExperimentConfig':
        """
        The full experiment profile: R=200, n=2^8..2^18. Run it for d in {4, 20, 50}.
        """
        return cls(**{"reps": 200, "n": tuple(range(8, 19)), **overrides})

    def params(self) -> MarketParams:
        return MarketParams(s0=self.s0, strike=self.strike, rate=self.rate, sigma=self.sigma, maturity=self.maturity, d=self.d)

    def conditioned_column(self) -> Optional[int]:
        """
        The 1-based column the smoothing choice conditions on, or None for no smoothing.
        """
        if self.smoothing == "none":
            return None
        choice = self.smoothing.split(":", 1)[1]
        if choice == "first":
            return 1
        if choice == "last":
            return self.d
        j = int(choice)
        if not 1 <= j <= self.d:
            raise ValueError(f"smoothing column must be in 1..{self.d}, got {j}")
        return j
