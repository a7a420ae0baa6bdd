# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

from typing import Union

import numpy as np

from .models.Construction import Construction
from .models.GeneratingMatrix import GeneratingMatrix
from .models.MarketParams import MarketParams
from .models.OrthogonalTransform import OrthogonalTransform


def covariance(params: MarketParams) -> np.ndarray:
    """
    The covariance Σ_ik = Δt·min(i, k) of Brownian motion at the monitoring dates.
    """
    index = np.arange(1, params.d + 1)
    return params.dt * np.minimum.outer(index, index).astype(float)


def standard_matrix(params: MarketParams) -> GeneratingMatrix:
    """
    The Cholesky factor √Δt·(lower-triangular ones): the path is built by cumulative increments.
    """
    matrix = np.sqrt(params.dt) * np.tril(np.ones((params.d, params.d)))
    return GeneratingMatrix(matrix, Construction.STANDARD)


def _bridge_path(times: np.ndarray, z: np.ndarray) -> np.ndarray:
    d = len(times)
    filled = np.zeros(d, dtype=bool)
    path = np.zeros(d)
    path[d - 1] = np.sqrt(times[d - 1]) * z[0]
    filled[d - 1] = True
    left = 0
    for i in range(1, d):
        while filled[left]:
            left += 1
        right = left
        while not filled[right]:
            right += 1
        # fill the middle of the gap (left − 1, right); index −1 stands for W(0) = 0
        middle = left + ((right - 1 - left) >> 1)
        t_left = times[left - 1] if left > 0 else 0.0
        w_left = path[left - 1] if left > 0 else 0.0
        span = times[right] - t_left
        left_weight = (times[right] - times[middle]) / span
        right_weight = (times[middle] - t_left) / span
        std = np.sqrt((times[middle] - t_left) * (times[right] - times[middle]) / span)
        path[middle] = left_weight * w_left + right_weight * path[right] + std * z[i]
        filled[middle] = True
        left = right + 1
        if left >= d:
            left = 0
    return path


def bb_matrix(params: MarketParams) -> GeneratingMatrix:
    """
    The Brownian bridge construction: column 1 generates W(T), later columns fill the midpoints of the largest gaps
    in level order. Every entry is nonnegative.
    """
    times = params.times
    matrix = np.column_stack([_bridge_path(times, unit) for unit in np.eye(params.d)])
    return GeneratingMatrix(matrix, Construction.BROWNIAN_BRIDGE)


def pca_matrix(params: MarketParams) -> GeneratingMatrix:
    """
    A = V·diag(√λ) from the closed-form eigensystem of Σ, eigenvalues decreasing.

    λ_k = (Δt/4)/sin²((2k−1)π/(4d+2)) and eigenvector k has components ∝ sin((2k−1)iπ/(2d+1)). Each column is signed so
    that its largest-magnitude entry is positive.
    """
    d = params.d
    k = np.arange(1, d + 1)
    i = np.arange(1, d + 1)
    eigenvalues = (params.dt / 4.0) / np.sin((2 * k - 1) * np.pi / (4 * d + 2)) ** 2
    vectors = np.sin(np.outer(i, 2 * k - 1) * np.pi / (2 * d + 1))
    vectors /= np.linalg.norm(vectors, axis=0)
    largest = vectors[np.argmax(np.abs(vectors), axis=0), k - 1]
    vectors *= np.where(largest < 0, -1.0, 1.0)
    return GeneratingMatrix(vectors * np.sqrt(eigenvalues), Construction.PCA)


def make_matrix(construction: Construction, params: MarketParams) -> GeneratingMatrix:
    if construction == Construction.STANDARD:
        return standard_matrix(params)
    if construction == Construction.BROWNIAN_BRIDGE:
        return bb_matrix(params)
    if construction == Construction.PCA:
        return pca_matrix(params)
    raise ValueError(f"construction {construction.value} is built with compose(), not from market parameters")


def compose(matrix: GeneratingMatrix, transform: Union[OrthogonalTransform, np.ndarray], j: int) -> GeneratingMatrix:
    """
    The generating matrix whose column j equals A's and whose other columns are A_{−j}·U.

    Conditioning on x_j under the result at y equals conditioning under A at U·y.

    :param matrix: The generating matrix A.
    :param transform: An orthogonal (d−1)×(d−1) matrix U.
    :param j: The kept column, 1-based.
    """
    matrix.check_column(j)
    if not isinstance(transform, OrthogonalTransform):
        transform = OrthogonalTransform(transform)
    if transform.k != matrix.d - 1:
        raise ValueError(f"transform must be {matrix.d - 1}×{matrix.d - 1}, got {transform.k}×{transform.k}")
    rest = np.delete(matrix.matrix, j - 1, axis=1) @ transform.matrix
    composite = np.insert(rest, j - 1, matrix.matrix[:, j - 1], axis=1)
    return GeneratingMatrix(composite, Construction.CUSTOM_ORTHOGONAL_COMPOSITE)


def log_assets(x: np.ndarray, matrix: GeneratingMatrix, params: MarketParams) -> np.ndarray:
    """
    log S_i for each row of x, shape (n, d) in and out.
    """
    x = np.asarray(x, dtype=float)
    return np.log(params.s0) + params.drift * params.times + params.sigma * (x @ matrix.matrix.T)


def assets(x: np.ndarray, matrix: GeneratingMatrix, params: MarketParams) -> np.ndarray:
    """
    S_i = S0·exp[(μ − σ²/2)iΔt + σ Σ_k a_ik x_k], computed in log space.

    :param x: Standard normal inputs, shape (d,) or (n, d).
    :return: Asset prices with the same shape as x.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != params.d:
        raise ValueError(f"x must have {params.d} coordinates, got {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    return np.exp(log_assets(x, matrix, params))
