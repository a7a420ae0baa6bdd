# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr
import numpy as np

@define(frozen=True)
class MarketParams:
    """
    Black–Scholes market and contract parameters of a discretely monitored arithmetic Asian option.

    Monitoring dates are evenly spaced, t_i = iΔt for i = 1..d with Δt = T/d.
    """

    s0: float = attr.ib(default=100.0, converter=float)
    """
    The initial asset price S(0).
    """

    strike: float = attr.ib(default=100.0, converter=float)
    """
    The strike price K.
    """

    rate: float = attr.ib(default=0.01, converter=float)
    """
    The riskfree interest rate μ, per year.
    """

    sigma: float = attr.ib(default=0.4, converter=float)
    """
    The volatility σ, per square root of a year.
    """

    maturity: float = attr.ib(default=1.0, converter=float)
    """
    The maturity T, in years.
    """

    d: int = attr.ib(default=4, converter=int)
    """
    The number of monitoring dates.
    """

    def __attrs_post_init__(self):
        for name in ("s0", "strike", "sigma", "maturity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.d < 1:
            raise ValueError(f"d must be at least 1, got {self.d}")

    @property
    def dt(self) -> float:
        return self.maturity / self.d

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(1, self.d + 1)

    @property
    def drift(self) -> float:
        """
        The log-price drift ω = μ − σ²/2.
        """
        return self.rate - 0.5 * self.sigma ** 2

    @property
    def discount(self) -> float:
        return float(np.exp(-self.rate * self.maturity))
