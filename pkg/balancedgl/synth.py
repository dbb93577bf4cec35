"""
Synthetic ground truth: balanced Erdos-Renyi graphs and GMRF samples.

Random streams are numpy `PCG64` generators. A `SynthSpec.seed` drives, in
order: one 31-bit integer that seeds the networkx edge draw, the n
polarities, then one magnitude per edge in sorted (i < j) edge order.
Benchmark trials derive their seeds with `trial_seeds`.
"""
import logging
import typing

import networkx as nx
import numpy as np
import pandas as pd
import scipy.linalg

from balancedgl.datastructures import (
    BalancedLaplacian,
    GeneralizedLaplacian,
    PolarityVector,
    SignedGraph,
    SynthSpec,
)
from balancedgl.exceptions import DegenerateCovariance, DimensionMismatch, NotPositiveDefinite
from balancedgl.graphs import laplacian_from_adjacency
from balancedgl.types import Array, ArrayLike, Seed

logger = logging.getLogger(__name__)


def balanced_selfloops(W: ArrayLike, factor: float = 2.5) -> Array:
    """
    `w_ii = factor * sum_j [-w_ij]_+` over the off-diagonal weights.
    """
    W = np.array(W, dtype=float)
    np.fill_diagonal(W, 0.0)
    return factor * np.clip(-W, 0.0, None).sum(axis=1)


def gen_balanced_er_graph(spec: SynthSpec) -> BalancedLaplacian:
    rng = np.random.default_rng(spec.seed)
    structure = nx.gnp_random_graph(spec.n, spec.p, seed=int(rng.integers(2 ** 31 - 1)))
    beta = rng.choice(np.array([-1, 1]), size=spec.n)
    edges = sorted((min(u, v), max(u, v)) for u, v in structure.edges())
    lo, hi = spec.weight_range
    magnitudes = rng.uniform(lo, hi, size=len(edges))

    W = np.zeros((spec.n, spec.n))
    for (i, j), magnitude in zip(edges, magnitudes):
        W[i, j] = W[j, i] = beta[i] * beta[j] * magnitude
    np.fill_diagonal(W, balanced_selfloops(W, spec.selfloop_factor) + spec.selfloop_offset)

    logger.debug("Generated balanced ER graph: n=%d, %d edges", spec.n, len(edges))
    return BalancedLaplacian(laplacian_from_adjacency(SignedGraph(W)), PolarityVector(beta))


def cholesky_upper(L: GeneralizedLaplacian) -> Array:
    try:
        return scipy.linalg.cholesky(L.L, lower=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Laplacian is not positive definite: {exc}") from exc


def sample_gmrf(L: GeneralizedLaplacian, K: int, seed: Seed = None) -> Array:
    """
    K draws from N(0, L^-1) as the columns of an n x K matrix. With `L = R'R`,
    solving `R' x = z` for white `z` gives `cov(x) = L^-1`.
    """
    if K < 0:
        raise ValueError(f"Sample count must be non-negative, got {K!r}.")
    R = cholesky_upper(L)
    if K == 0:
        return np.empty((L.n, 0))
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((L.n, K))
    return scipy.linalg.solve_triangular(R, Z, trans="T", lower=False)


def trial_seeds(seed: Seed, trials: int) -> typing.List[typing.Tuple[int, int, int]]:
    """
    Per-trial (graph, samples, learner) seeds, split from `seed` with
    `numpy.random.SeedSequence.spawn` so that trials are independent of how
    many run in parallel.
    """
    children = np.random.SeedSequence(seed).spawn(trials)
    return [tuple(int(v) for v in child.generate_state(3)) for child in children]  # type: ignore


def add_awgn(X: ArrayLike, sigma: float, seed: Seed = None) -> Array:
    X = np.asarray(X, dtype=float)
    if sigma < 0:
        raise ValueError(f"Noise level must be non-negative, got {sigma!r}.")
    rng = np.random.default_rng(seed)
    return X + sigma * rng.standard_normal(X.shape)


def prepare_timeseries(
    X: ArrayLike, moving_average: int = 1, normalize: bool = True
) -> Array:
    """
    Smooth every row (station) with a trailing moving average over
    `moving_average` observations, then rescale each row to zero mean and
    unit variance.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("(n, K)", X.shape, "time series")
    if moving_average < 1:
        raise ValueError(f"Moving average window must be positive, got {moving_average!r}.")
    frame = pd.DataFrame(X.T)
    if moving_average > 1:
        frame = frame.rolling(window=moving_average).mean().dropna()
    if normalize:
        spread = frame.std(ddof=1)
        flat = np.flatnonzero(~(spread > 0).to_numpy())
        if flat.size:
            raise DegenerateCovariance(f"Rows {flat.tolist()} have zero variance.")
        frame = (frame - frame.mean()) / spread
    return frame.to_numpy().T
