# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from attr import define
import attr
import numpy as np

@define(frozen=True)
class TermDecomposition:
    """
    The affine-exponential form of g and φ in one coordinate x_j, for a batch of n points y = x_{−j}:

    g(x_j, y) = Σ_m w_m(y)·(b_m(y) + c_m(y)·x_j)·exp(ℓ_m·x_j)

    φ(x_j, y) = (1/d)·Σ_i G_i(y)·exp(σ a_ij x_j) − K
    """

    j: int = attr.ib()
    """
    The conditioned column, 1-based.
    """

    weights: np.ndarray = attr.ib(eq=False)
    """
    w_m(y), shape (n, M).
    """

    b: np.ndarray = attr.ib(eq=False)
    """
    b_m(y), shape (n, M).
    """

    c: np.ndarray = attr.ib(eq=False)
    """
    c_m(y), shape (n, M).
    """

    ell: np.ndarray = attr.ib(eq=False)
    """
    ℓ_m, shape (M,). Constant terms carry ℓ = 0 and c = 0.
    """

    phi_weights: np.ndarray = attr.ib(eq=False)
    """
    G_i(y) = S_i at x_j = 0, shape (n, d).
    """

    phi_ell: np.ndarray = attr.ib(eq=False)
    """
    σ a_ij, shape (d,).
    """

    strike: float = attr.ib()

    def g(self, xj: np.ndarray) -> np.ndarray:
        """
        Reassemble g at x_j (shape (n,)) from the terms.
        """
        xj = np.asarray(xj, dtype=float)[:, None]
        return np.sum(self.weights * (self.b + self.c * xj) * np.exp(self.ell[None, :] * xj), axis=1)

    def phi(self, xj: np.ndarray) -> np.ndarray:
        xj = np.asarray(xj, dtype=float)[:, None]
        return np.mean(self.phi_weights * np.exp(self.phi_ell[None, :] * xj), axis=1) - self.strike
