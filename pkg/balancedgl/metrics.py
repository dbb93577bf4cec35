import typing

import numpy as np

from balancedgl.exceptions import DimensionMismatch
from balancedgl.types import Array, ArrayLike

FM_EDGE_TOL = 1e-6


def _pair(L_est: ArrayLike, L_true: ArrayLike) -> typing.Tuple[Array, Array]:
    L_est = np.asarray(L_est, dtype=float)
    L_true = np.asarray(L_true, dtype=float)
    if L_est.shape != L_true.shape:
        raise DimensionMismatch(L_true.shape, L_est.shape, "estimate")
    return L_est, L_true


def _support(L: Array, eps: float) -> Array:
    return np.triu(np.abs(L) > eps, k=1)


def precision_recall(
    L_est: ArrayLike, L_true: ArrayLike, eps: float = FM_EDGE_TOL
) -> typing.Tuple[float, float]:
    """
    Precision and recall of the estimated edge support, ignoring signs.
    An empty estimate has precision 0; an empty truth has recall 0.
    """
    L_est, L_true = _pair(L_est, L_true)
    estimated = _support(L_est, eps)
    true = _support(L_true, eps)
    hits = int(np.count_nonzero(estimated & true))
    n_est = int(np.count_nonzero(estimated))
    n_true = int(np.count_nonzero(true))
    precision = hits / n_est if n_est else 0.0
    recall = hits / n_true if n_true else 0.0
    return precision, recall


def f_measure(L_est: ArrayLike, L_true: ArrayLike, eps: float = FM_EDGE_TOL) -> float:
    L_est, L_true = _pair(L_est, L_true)
    estimated = _support(L_est, eps)
    true = _support(L_true, eps)
    if not estimated.any() and not true.any():
        return 1.0
    precision, recall = precision_recall(L_est, L_true, eps)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def relative_error(L_est: ArrayLike, L_true: ArrayLike) -> float:
    """
    `||L_est - L_true||_F / ||L_true||_F` over the full matrices.
    """
    L_est, L_true = _pair(L_est, L_true)
    reference = np.linalg.norm(L_true)
    if reference == 0:
        raise ValueError("Relative error is undefined for an all-zero reference.")
    return float(np.linalg.norm(L_est - L_true) / reference)


def sign_accuracy(L_est: ArrayLike, L_true: ArrayLike, eps: float = FM_EDGE_TOL) -> float:
    """
    Fraction of recovered true edges whose sign matches the truth.
    """
    L_est, L_true = _pair(L_est, L_true)
    recovered = _support(L_est, eps) & _support(L_true, eps)
    if not recovered.any():
        return 0.0
    agree = np.sign(L_est[recovered]) == np.sign(L_true[recovered])
    return float(np.mean(agree))


def mse(estimate: ArrayLike, reference: ArrayLike) -> float:
    estimate, reference = _pair(estimate, reference)
    return float(np.mean((estimate - reference) ** 2))


def rmse(estimate: ArrayLike, reference: ArrayLike) -> float:
    return float(np.sqrt(mse(estimate, reference)))
