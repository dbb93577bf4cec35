import dataclasses
import functools
import logging
import typing

import numpy as np

from balancedgl.concurrency import gather
from balancedgl.datastructures import (
    EDGE_TOL,
    BalancedLaplacian,
    GeneralizedLaplacian,
    LearnConfig,
    PolarityVector,
    SampleCovariance,
    SignedGraph,
)
from balancedgl.exceptions import (
    BothInfeasible,
    DegenerateCovariance,
    DimensionMismatch,
    InfeasibleProblem,
)
from balancedgl.filters import PSD_TOL
from balancedgl.graphs import (
    graph_summary,
    greedy_polarize,
    prune_inconsistent,
    spectral_polarize,
)
from balancedgl.lp import solve_clime_column
from balancedgl.pocs import screen_patterns
from balancedgl.types import Array, ArrayLike, Seed

logger = logging.getLogger(__name__)

# Objectives closer than this are a tie, and the node keeps its polarity.
TIE_TOL = 1e-9


def sample_covariance(X: ArrayLike) -> SampleCovariance:
    """
    Covariance of an n x K data matrix whose rows are variables and whose
    columns are observations. Rows are centred first and the estimate is
    normalised by K - 1.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("(n, K)", X.shape, "data matrix")
    n, K = X.shape
    if K <= n:
        raise DegenerateCovariance(
            f"Need more observations than variables, got K={K} for n={n}."
        )
    centred = X - X.mean(axis=1, keepdims=True)
    flat = np.flatnonzero(~centred.any(axis=1))
    if flat.size:
        raise DegenerateCovariance(f"Rows {flat.tolist()} have zero variance.")
    C = centred @ centred.T / (K - 1)
    return SampleCovariance((C + C.T) / 2.0)


def init_polarities(
    C: SampleCovariance, mode: str = "covariance-spectral", seed: Seed = None
) -> PolarityVector:
    """
    Starting polarities for the sweeps. The covariance of a balanced model
    has `sign(C_ij) = beta_i * beta_j`, so both covariance modes read the
    polarities off the off-diagonal of `C`: "covariance-greedy" by counting
    signs, "covariance-spectral" from the correlation matrix's leading
    eigenvector and weighted votes.
    """
    if mode == "all-ones":
        return PolarityVector.ones(C.n)
    W = np.array(C.C)
    np.fill_diagonal(W, 0.0)
    if mode == "covariance-greedy":
        return greedy_polarize(SignedGraph(W), seed)
    if mode == "covariance-spectral":
        scale = np.sqrt(np.diag(C.C))
        return spectral_polarize(SignedGraph(W / np.outer(scale, scale)))
    raise ValueError(f"Unknown polarity initialisation {mode!r}.")


class ColumnChoice(typing.NamedTuple):
    beta_i: int
    column: Array
    objective: float
    rho: float


def sign_pattern(beta: ArrayLike, i: int, beta_i: int) -> Array:
    """
    `S_jj = beta_i * beta_j` for j != i and `S_ii = -1`.
    """
    S = beta_i * np.asarray(beta, dtype=float)
    S[i] = -1.0
    return S


def _clean(column: Array, S_diag: Array) -> Array:
    column = np.array(column)
    column[np.abs(column) <= EDGE_TOL] = 0.0
    # Within-tolerance sign violations left by the solver.
    column[S_diag * column > 0] = 0.0
    return column


def _hypothesis(
    C: Array, i: int, rho: float, beta_i: int, S_diag: Array
) -> typing.Optional[ColumnChoice]:
    try:
        column = solve_clime_column(C, i, rho, S_diag)
    except InfeasibleProblem:
        # POCS accepted a point within its tolerance of an empty set.
        logger.debug("Node %d, polarity %+d: LP infeasible at rho=%g", i, beta_i, rho)
        return None
    column = _clean(column, S_diag)
    return ColumnChoice(beta_i, column, float(np.abs(column).sum()), rho)


def optimize_column(
    C: SampleCovariance,
    L_current: ArrayLike,
    beta: PolarityVector,
    i: int,
    cfg: LearnConfig = None,
) -> ColumnChoice:
    """
    Solve the sign-constrained column LP of node `i` under both polarities at
    one shared rho and keep the smaller objective.

    The rho is the first of the schedule at which POCS finds either sign
    pattern feasible and the LP agrees. A hypothesis that is infeasible there
    loses outright; equal objectives keep the node's current polarity.
    Every search starts from `e_i`, so `L_current` only fixes the shape.
    """
    cfg = cfg or LearnConfig()
    if np.shape(L_current) != (C.n, C.n):
        raise DimensionMismatch((C.n, C.n), np.shape(L_current), "Laplacian estimate")
    polarities = (1, -1)
    patterns = [sign_pattern(beta.beta, i, beta_i) for beta_i in polarities]

    screened = screen_patterns(
        C.C, i, patterns, cfg.rho_schedule, cfg.pocs, concurrent=cfg.concurrent
    )
    for rho, feasible in screened:
        solves = [
            functools.partial(_hypothesis, C.C, i, rho, beta_i, S)
            for beta_i, S, ok in zip(polarities, patterns, feasible)
            if ok
        ]
        if cfg.concurrent and len(solves) > 1:
            choices = gather(*solves)
        else:
            choices = [solve() for solve in solves]
        survivors = [choice for choice in choices if choice is not None]
        if not survivors:
            continue
        if len(survivors) == 1:
            return survivors[0]
        plus, minus = survivors
        if abs(plus.objective - minus.objective) <= TIE_TOL:
            return plus if beta.beta[i] == 1 else minus
        return plus if plus.objective < minus.objective else minus

    logger.debug("Node %d: rho schedule exhausted for both polarities", i)
    raise BothInfeasible(node=i)


@dataclasses.dataclass(frozen=True, eq=False)
class LearnResult:
    balanced: BalancedLaplacian
    # The last solved vector of each node, before later rows overwrote parts of it.
    columns: Array
    rhos: Array
    objectives: Array
    sweeps: int
    converged: bool
    lambda_min: float
    warnings: typing.Tuple[str, ...] = ()


class BalancedGraphLearner:
    """
    Learns a balanced signed graph Laplacian from a sample covariance by
    sweeping over the nodes. Each visit tests both polarities of one node and
    writes the winning column into both row and column of the estimate.
    """

    def __init__(self, config: LearnConfig = None) -> None:
        self.config = config or LearnConfig()

    def fit(self, C: SampleCovariance) -> LearnResult:
        cfg = self.config
        n = C.n
        polarity = init_polarities(C, cfg.init_mode, cfg.seed)
        beta = np.array(polarity.beta)
        L = np.zeros((n, n))
        columns = np.zeros((n, n))
        rhos = np.zeros(n)
        objectives = np.zeros(n)
        warnings = []  # type: typing.List[str]

        converged = False
        sweeps = 0
        for sweeps in range(1, cfg.max_sweeps + 1):
            previous = L.copy()
            flips = 0
            for i in range(n):
                try:
                    choice = optimize_column(C, L, PolarityVector(beta), i, cfg)
                except BothInfeasible:
                    logger.error("Node %d: no feasible polarity in sweep %d", i, sweeps)
                    raise
                flips += int(choice.beta_i != beta[i])
                beta[i] = choice.beta_i
                L[:, i] = choice.column
                L[i, :] = choice.column
                columns[:, i] = choice.column
                rhos[i] = choice.rho
                objectives[i] = choice.objective
            change = float(np.max(np.abs(L - previous))) if n else 0.0
            logger.info(
                "Sweep %d: max |dL| = %.3g, %d polarity flip(s)", sweeps, change, flips
            )
            if change < cfg.conv_tol:
                converged = True
                break

        if not converged:
            message = f"Did not converge within {cfg.max_sweeps} sweeps."
            logger.warning(message)
            warnings.append(message)

        lambda_min = float(np.linalg.eigvalsh(L)[0]) if n else 0.0
        if lambda_min < -PSD_TOL:
            message = (
                f"Learned Laplacian is not PSD (lambda_min = {lambda_min!r}); "
                "filtering applies diagonal loading."
            )
            logger.warning(message)
            warnings.append(message)

        balanced = BalancedLaplacian(GeneralizedLaplacian(L), PolarityVector(beta))
        logger.info("Learned graph: %s", graph_summary(balanced))
        return LearnResult(
            balanced=balanced,
            columns=columns,
            rhos=rhos,
            objectives=objectives,
            sweeps=sweeps,
            converged=converged,
            lambda_min=lambda_min,
            warnings=tuple(warnings),
        )


def learn_balanced_laplacian(C: SampleCovariance, cfg: LearnConfig = None) -> BalancedLaplacian:
    return BalancedGraphLearner(cfg).fit(C).balanced


def clime_unconstrained(C: SampleCovariance, rho: float) -> GeneralizedLaplacian:
    """
    Column-by-column CLIME followed by the symmetric average `(L + L') / 2`.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho!r}.")
    n = C.n
    L = np.zeros((n, n))
    for i in range(n):
        L[:, i] = solve_clime_column(C.C, i, rho, constrained=False)
    L[np.abs(L) <= EDGE_TOL] = 0.0
    return GeneralizedLaplacian((L + L.T) / 2.0)


def clime_greedy(C: SampleCovariance, rho: float, seed: Seed = None) -> BalancedLaplacian:
    """
    The two-step baseline: plain CLIME, then greedy polarization of the
    estimated graph and removal of the edges it leaves inconsistent.
    """
    estimate = clime_unconstrained(C, rho)
    W = -np.array(estimate.L)
    np.fill_diagonal(W, 0.0)
    polarity = greedy_polarize(SignedGraph(W), seed)
    return prune_inconsistent(estimate, polarity)
