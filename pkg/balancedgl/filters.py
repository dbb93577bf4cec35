import logging
import typing

import numpy as np

from balancedgl.datastructures import (
    BalancedLaplacian,
    GeneralizedLaplacian,
    SpectralBasis,
)
from balancedgl.exceptions import DimensionMismatch
from balancedgl.graphs import positive_counterpart, transform_signal
from balancedgl.types import Array, ArrayLike, Seed

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF = 0.3
PSD_TOL = 1e-8


def spectral_decompose(L: GeneralizedLaplacian) -> SpectralBasis:
    eigenvalues, eigenvectors = np.linalg.eigh(L.L)
    return SpectralBasis(eigenvalues, eigenvectors)


def gft(basis: SpectralBasis, x: ArrayLike) -> Array:
    """
    Graph Fourier coefficients `U' x`.
    """
    return basis.eigenvectors.T @ _signal(basis.n, x)


def igft(basis: SpectralBasis, coefficients: ArrayLike) -> Array:
    return basis.eigenvectors @ _signal(basis.n, coefficients)


def _signal(n: int, x: ArrayLike) -> Array:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[0] != n:
        raise DimensionMismatch((n,), x.shape, "signal")
    return x


def passband(basis: SpectralBasis, cutoff_frac: float = DEFAULT_CUTOFF) -> Array:
    """
    Mask of the eigenvalues inside the closed band `[0, cutoff_frac * lambda_max]`.
    """
    if not 0 < cutoff_frac <= 1:
        raise ValueError(f"cutoff_frac must lie in (0, 1], got {cutoff_frac!r}.")
    return basis.eigenvalues <= cutoff_frac * basis.lambda_max


def lowpass_denoise(
    L_plus: GeneralizedLaplacian,
    y: ArrayLike,
    cutoff_frac: float = DEFAULT_CUTOFF,
    basis: SpectralBasis = None,
) -> Array:
    """
    Ideal band-limiting filter: keep the graph frequencies up to
    `cutoff_frac * lambda_max` and drop the rest. `y` is one signal or an
    n x m block of signals stored as columns.
    """
    basis = basis or spectral_decompose(L_plus)
    y = _signal(basis.n, y)
    if basis.lambda_max <= 0:
        return y.copy()
    U = basis.eigenvectors[:, passband(basis, cutoff_frac)]
    return U @ (U.T @ y)


def psd_guard(L: GeneralizedLaplacian, tol: float = PSD_TOL) -> typing.Tuple[GeneralizedLaplacian, float]:
    """
    Diagonal loading that lifts the smallest eigenvalue to `tol` when it is
    below `-tol`. Returns the (possibly) loaded Laplacian and the shift used.
    """
    if L.n == 0:
        return L, 0.0
    lambda_min = float(np.linalg.eigvalsh(L.L)[0])
    if lambda_min >= -tol:
        return L, 0.0
    shift = abs(lambda_min) + tol
    logger.warning(
        "Laplacian has lambda_min = %.3g; loading the diagonal by %.3g", lambda_min, shift
    )
    return GeneralizedLaplacian(L.L + shift * np.eye(L.n)), shift


def denoise_signals(
    b: BalancedLaplacian, y: ArrayLike, cutoff_frac: float = DEFAULT_CUTOFF
) -> Array:
    """
    Filter signals on a balanced signed graph by moving to its positive
    counterpart: `T lowpass(T Lb T, T y)`.
    """
    L_plus, T = positive_counterpart(b)
    L_plus, _ = psd_guard(L_plus)
    filtered = lowpass_denoise(L_plus, transform_signal(T, y), cutoff_frac)
    return transform_signal(T, filtered)


def bandlimited_signal(
    basis: SpectralBasis,
    cutoff_frac: float = DEFAULT_CUTOFF,
    count: int = 1,
    seed: Seed = None,
) -> Array:
    """
    Random signals whose spectrum lies inside the passband: standard normal
    coefficients on the in-band eigenvectors. Returns shape (n,) for a single
    signal and (n, count) otherwise.
    """
    rng = np.random.default_rng(seed)
    band = passband(basis, cutoff_frac)
    coefficients = np.zeros((basis.n, count))
    coefficients[band] = rng.standard_normal((int(band.sum()), count))
    signals = basis.eigenvectors @ coefficients
    return signals[:, 0] if count == 1 else signals
