import logging
import typing

import networkx as nx
import numpy as np

from balancedgl.datastructures import (
    EDGE_TOL,
    BalancedLaplacian,
    GeneralizedLaplacian,
    PolarityVector,
    SignedGraph,
    SimilarityTransform,
    adjacency_from_laplacian,
    inconsistent_edges,
)
from balancedgl.exceptions import DimensionMismatch, InconsistentLaplacian
from balancedgl.types import Array, ArrayLike, Seed

logger = logging.getLogger(__name__)


def laplacian_from_adjacency(g: SignedGraph) -> GeneralizedLaplacian:
    """
    `L = D - W + diag(W)`, with the degree `D_ii` summing the whole row of `W`
    including the self-loop.
    """
    return GeneralizedLaplacian(laplacian_matrix(g.W))


def laplacian_matrix(W: Array) -> Array:
    L = -np.array(W, dtype=float)
    np.fill_diagonal(L, np.asarray(W).sum(axis=1))
    return L


def check_consistency(L: GeneralizedLaplacian, beta: PolarityVector) -> bool:
    if L.n != beta.n:
        raise DimensionMismatch(L.n, beta.n, "polarity vector")
    return not inconsistent_edges(L.L, beta.beta)


def to_networkx(W: ArrayLike) -> nx.Graph:
    """
    Off-diagonal entries with `|W_ij| > EDGE_TOL` become edges carrying their
    signed weight; every node is present even when isolated.
    """
    W = np.asarray(W, dtype=float)
    graph = nx.Graph()
    graph.add_nodes_from(range(W.shape[0]))
    rows, cols = np.nonzero(np.triu(np.abs(W) > EDGE_TOL, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        graph.add_edge(i, j, weight=float(W[i, j]))
    return graph


def _components(graph: nx.Graph) -> typing.List[typing.List[int]]:
    components = [sorted(component) for component in nx.connected_components(graph)]
    return sorted(components, key=lambda component: component[0])


def two_coloring_balance_check(g: SignedGraph) -> typing.Optional[PolarityVector]:
    """
    Try to polarize the nodes so that positive edges join equal labels and
    negative edges join opposite labels. Returns the polarization when the
    graph is balanced, otherwise None.
    """
    graph = to_networkx(g.W)
    beta = np.zeros(g.n, dtype=np.int64)
    for component in _components(graph):
        root = component[0]
        beta[root] = 1
        for u, v in nx.bfs_edges(graph, root):
            beta[v] = beta[u] * int(np.sign(graph.edges[u, v]["weight"]))
    polarity = PolarityVector(beta)
    if inconsistent_edges(-g.W, polarity.beta):
        return None
    return polarity


def positive_counterpart(
    b: BalancedLaplacian,
) -> typing.Tuple[GeneralizedLaplacian, SimilarityTransform]:
    """
    `L+ = T Lb T` with `T = diag(beta)`: every off-diagonal becomes `-|W_ij|`
    and the diagonal is untouched, so both matrices share one spectrum.
    """
    edges = inconsistent_edges(b.L, b.beta)
    if edges:
        raise InconsistentLaplacian(edges)
    signs = b.beta.astype(float)
    L_plus = signs[:, None] * b.L * signs[None, :]
    return GeneralizedLaplacian(L_plus), SimilarityTransform(b.beta)


def positive_adjacency(b: BalancedLaplacian) -> Array:
    """
    Adjacency of the positive counterpart: `W+_ij = |W_ij|` off the diagonal and
    `W+_ii = W_ii - 2 * sum_j [-W_ij]_+`. The self-loop may come out negative.
    """
    W = adjacency_from_laplacian(b.L)
    off_diagonal = W - np.diag(np.diag(W))
    W_plus = np.abs(off_diagonal)
    negative = np.clip(-off_diagonal, 0.0, None).sum(axis=1)
    np.fill_diagonal(W_plus, np.diag(W) - 2.0 * negative)
    return W_plus


def transform_signal(t: SimilarityTransform, x: ArrayLike) -> Array:
    """
    Multiply by `T`. Accepts a single signal of length n or an n x m block of
    signals stored as columns.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[:1] != (t.n,):
        raise DimensionMismatch((t.n,), x.shape, "signal")
    signs = t.signs.astype(float)
    if x.ndim == 1:
        return signs * x
    return signs.reshape((-1,) + (1,) * (x.ndim - 1)) * x


def _canonical(beta: Array, graph: nx.Graph) -> Array:
    """
    Flip whole components so that the lowest-indexed node of each is +1.
    """
    beta = beta.copy()
    for component in _components(graph):
        if beta[component[0]] < 0:
            beta[component] *= -1
    return beta


def greedy_polarize(g: SignedGraph, seed: Seed = None) -> PolarityVector:
    """
    Grow a polarized set from a random node. At each step the lowest-indexed
    node adjacent to the set takes the polarity that makes more of its edges
    into the set consistent (ties go to +1). When the frontier empties, the
    lowest-indexed unpolarized node starts a new component at +1.
    """
    n = g.n
    beta = np.zeros(n, dtype=np.int64)
    if n == 0:
        return PolarityVector(beta)

    rng = np.random.default_rng(seed)
    signs = np.sign(g.W) * (np.abs(g.W) > EDGE_TOL)
    np.fill_diagonal(signs, 0.0)
    adjacent = signs != 0

    beta[int(rng.integers(n))] = 1
    while True:
        unpolarized = beta == 0
        if not unpolarized.any():
            break
        frontier = np.flatnonzero(unpolarized & adjacent[:, ~unpolarized].any(axis=1))
        if frontier.size == 0:
            beta[np.flatnonzero(unpolarized)[0]] = 1
            continue
        v = frontier[0]
        # +1 where beta_v = +1 makes the edge consistent, -1 where beta_v = -1 does.
        agreement = signs[v] * beta
        plus = int(np.count_nonzero(agreement > 0))
        minus = int(np.count_nonzero(agreement < 0))
        beta[v] = 1 if plus >= minus else -1

    return PolarityVector(_canonical(beta, to_networkx(g.W)))


def spectral_polarize(g: SignedGraph, max_passes: int = None) -> PolarityVector:
    """
    Split the nodes by the signs of the leading eigenvector of `W`, then let
    every node in turn take the polarity favoured by the weighted vote
    `sum_j W_vj beta_j` until a full pass changes nothing. Zero entries and
    zero votes go to +1 on the first assignment and keep the current
    polarity afterwards.
    """
    n = g.n
    if n == 0:
        return PolarityVector(np.zeros(0, dtype=np.int64))
    W = np.array(g.W)
    np.fill_diagonal(W, 0.0)

    _, vectors = np.linalg.eigh(W)
    leading = vectors[:, -1]
    beta = np.where(leading < -EDGE_TOL, -1, 1).astype(np.int64)

    for _ in range(max_passes or n + 1):
        changed = False
        for v in range(n):
            vote = float(W[v] @ beta)
            if abs(vote) <= EDGE_TOL:
                continue
            sign = 1 if vote > 0 else -1
            if sign != beta[v]:
                beta[v] = sign
                changed = True
        if not changed:
            break

    return PolarityVector(_canonical(beta, to_networkx(W)))


def greedy_balance(g: SignedGraph, seed: Seed = None) -> BalancedLaplacian:
    """
    Greedy polarization followed by deletion of every inconsistent edge.
    """
    polarity = greedy_polarize(g, seed)
    W = np.array(g.W)
    removed = inconsistent_edges(-W, polarity.beta)
    for i, j in removed:
        W[i, j] = W[j, i] = 0.0
    logger.debug("Greedy balancing removed %d of %d edges", len(removed), len(g.edges()))
    return BalancedLaplacian(laplacian_from_adjacency(SignedGraph(W)), polarity)


def prune_inconsistent(L: GeneralizedLaplacian, beta: PolarityVector) -> BalancedLaplacian:
    """
    Zero the off-diagonal Laplacian entries that are inconsistent with `beta`,
    keeping the diagonal as estimated.
    """
    if L.n != beta.n:
        raise DimensionMismatch(L.n, beta.n, "polarity vector")
    pruned = np.array(L.L)
    removed = inconsistent_edges(pruned, beta.beta)
    for i, j in removed:
        pruned[i, j] = pruned[j, i] = 0.0
    logger.debug("Pruned %d inconsistent edges", len(removed))
    return BalancedLaplacian(GeneralizedLaplacian(pruned), beta)


class GraphSummary(typing.NamedTuple):
    nodes: int
    edges: int
    positive_edges: int
    negative_edges: int
    positive_nodes: int
    negative_nodes: int


def graph_summary(b: BalancedLaplacian) -> GraphSummary:
    upper = np.triu(b.L, k=1)
    edges = np.abs(upper) > EDGE_TOL
    # A positive edge weight is a negative Laplacian entry.
    positive = int(np.count_nonzero(edges & (upper < 0)))
    negative = int(np.count_nonzero(edges & (upper > 0)))
    plus = int(np.count_nonzero(b.beta > 0))
    return GraphSummary(
        nodes=b.n,
        edges=positive + negative,
        positive_edges=positive,
        negative_edges=negative,
        positive_nodes=plus,
        negative_nodes=b.n - plus,
    )
