# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from typing import Callable, Optional, Union
import logging
import math

import numpy as np

from .lds import SobolSampler
from .models.OrthogonalTransform import OrthogonalTransform
from .models.ScrambleSeed import ScrambleSeed
from .models.TransformProvenance import TransformProvenance
from .normal import inv_cdf
from .payoff import as_rows

LOGGER = logging.getLogger(__name__)

GRADIENT_STEP = 1e-5
GPCA_STREAM = "gpca"


def _dimension(pint: Callable, dimension: Optional[int]) -> int:
    if dimension is not None:
        return dimension
    if hasattr(pint, "dimension"):
        return pint.dimension
    raise ValueError("dimension is required for evaluators without a dimension attribute")


def gradient_samples(pint: Callable[[np.ndarray], np.ndarray], m: int, seed: Union[ScrambleSeed, int],
                     dimension: Optional[int] = None, step: float = GRADIENT_STEP) -> np.ndarray:
    """
    Central finite-difference gradients of y ↦ P_j f(y) at m scrambled Sobol' points mapped through Φ⁻¹.

    :param pint: A vectorized evaluator, usually a PreintegratedIntegrand.
    :param m: The number of gradient samples, at least the dimension.
    :param seed: The scramble seed; an integer is taken as the master seed of the "gpca" stream.
    :param dimension: The evaluator's input dimension, when it has no dimension attribute.
    :return: Shape (m, dimension).
    """
    k = _dimension(pint, dimension)
    if m < k:
        raise ValueError(f"m must be at least the dimension {k}, got {m}")
    if not isinstance(seed, ScrambleSeed):
        seed = ScrambleSeed(seed, 0, GPCA_STREAM)
    exponent = max(0, math.ceil(math.log2(m)))
    y = inv_cdf(SobolSampler(k).uniforms(exponent, seed)[:m])
    offsets = step * np.eye(k)
    # rows: all +h perturbations, then all −h perturbations, each block ordered by coordinate
    shifted = np.concatenate([y[None, :, :] + offsets[:, None, :], y[None, :, :] - offsets[:, None, :]]).reshape(-1, k)
    values = np.asarray(pint(shifted), dtype=float).reshape(2, k, m)
    return ((values[0] - values[1]) / (2.0 * step)).T


def gpca_matrix(gradients: np.ndarray) -> OrthogonalTransform:
    """
    The principal axes of the gradient second-moment matrix (1/m)·GᵀG, strongest first, each column signed so its
    largest-magnitude entry is positive.

    Zero gradients give the identity transform.
    """
    gradients = np.atleast_2d(np.asarray(gradients, dtype=float))
    m, k = gradients.shape
    moment = gradients.T @ gradients / m
    moment = 0.5 * (moment + moment.T)
    if not np.any(moment):
        LOGGER.warning("All %d gradient samples vanish; using the identity transform", m)
        return OrthogonalTransform.identity(k)
    eigenvalues, vectors = np.linalg.eigh(moment)
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    vectors = vectors[:, order]
    largest = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(k)]
    vectors = vectors * np.where(largest < 0, -1.0, 1.0)
    LOGGER.debug("GPCA eigenvalues %s", np.array2string(eigenvalues[order], precision=4))
    return OrthogonalTransform(vectors, TransformProvenance.GPCA)


class TransformedIntegrand:
    """
    y ↦ P_j f(U·y). Has the same expectation as P_j f for any orthogonal U.
    """

    def __init__(self, pint: Callable[[np.ndarray], np.ndarray], transform: OrthogonalTransform):
        self.pint = pint
        self.transform = transform

    @property
    def dimension(self) -> int:
        return self.transform.k

    def __call__(self, y: np.ndarray):
        rows, single = as_rows(y, self.dimension, "y")
        values = np.asarray(self.pint(rows @ self.transform.matrix.T))
        return float(values[0]) if single else values


def apply(pint: Callable[[np.ndarray], np.ndarray], transform: Union[OrthogonalTransform, np.ndarray]) -> TransformedIntegrand:
    """
    Compose an evaluator with an orthogonal change of variables.

    :throws ValueError: If the transform's size differs from the evaluator's dimension.
    """
    if not isinstance(transform, OrthogonalTransform):
        transform = OrthogonalTransform(transform)
    if hasattr(pint, "dimension") and pint.dimension != transform.k:
        raise ValueError(f"transform is {transform.k}×{transform.k} but the integrand takes {pint.dimension} coordinates")
    return TransformedIntegrand(pint, transform)


def gpca_transform(pint: Callable[[np.ndarray], np.ndarray], m: int, seed: Union[ScrambleSeed, int]) -> OrthogonalTransform:
    return gpca_matrix(gradient_samples(pint, m, seed))
