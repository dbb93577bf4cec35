import dataclasses
import typing

import numpy as np

from balancedgl.exceptions import (
    DegenerateCovariance,
    DimensionMismatch,
    InconsistentLaplacian,
    InvalidGraph,
)
from balancedgl.types import Array, ArrayLike, Seed

# Entries with |value| at or below this count as non-edges. LP solutions carry
# numerical dust well above machine epsilon.
EDGE_TOL = 1e-9

INIT_MODES = ("all-ones", "covariance-greedy", "covariance-spectral")


def readonly(value: ArrayLike, dtype: typing.Any = float) -> Array:
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def square(value: ArrayLike, what: str) -> Array:
    array = readonly(value)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionMismatch("(n, n)", array.shape, what)
    return array


def inconsistent_edges(L: Array, beta: Array) -> typing.List[typing.Tuple[int, int]]:
    """
    Off-diagonal pairs (i < j) where `beta_i * beta_j * L_ij > 0` on an edge.
    """
    product = np.outer(beta, beta) * L
    mask = np.triu((product > 0) & (np.abs(L) > EDGE_TOL), k=1)
    rows, cols = np.nonzero(mask)
    return list(zip(rows.tolist(), cols.tolist()))


@dataclasses.dataclass(frozen=True)
class SignedGraph:
    """
    Symmetric weighted adjacency with non-negative self-loops on the diagonal.
    """

    W: Array

    def __post_init__(self) -> None:
        W = square(self.W, "adjacency")
        if not np.array_equal(W, W.T):
            raise InvalidGraph("Adjacency matrix is not symmetric.")
        if np.any(np.diag(W) < 0):
            raise InvalidGraph("Self-loop weights must be non-negative.")
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return int(self.W.shape[0])

    def edges(self) -> typing.List[typing.Tuple[int, int, float]]:
        rows, cols = np.nonzero(np.triu(np.abs(self.W) > EDGE_TOL, k=1))
        return [(i, j, float(self.W[i, j])) for i, j in zip(rows.tolist(), cols.tolist())]

    @classmethod
    def from_laplacian(cls, laplacian: "GeneralizedLaplacian") -> "SignedGraph":
        return cls(adjacency_from_laplacian(laplacian.L))

    def __eq__(self, other: typing.Any) -> bool:
        return isinstance(other, SignedGraph) and np.array_equal(self.W, other.W)


def adjacency_from_laplacian(L: Array) -> Array:
    """
    Invert `L = D - W + diag(W)`: off-diagonals flip sign and the self-loop is
    whatever is left of the diagonal after the edge weights.
    """
    L = np.asarray(L, dtype=float)
    W = -L.copy()
    off_diagonal = W.sum(axis=1) - np.diag(W)
    selfloops = np.diag(L) - off_diagonal
    # Rounding in the row sums can leave a zero self-loop slightly negative.
    selfloops[np.abs(selfloops) <= EDGE_TOL] = 0.0
    np.fill_diagonal(W, selfloops)
    return W


@dataclasses.dataclass(frozen=True)
class GeneralizedLaplacian:
    L: Array

    def __post_init__(self) -> None:
        L = square(self.L, "laplacian")
        if not np.array_equal(L, L.T):
            raise InvalidGraph("Laplacian matrix is not symmetric.")
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return int(self.L.shape[0])

    def __eq__(self, other: typing.Any) -> bool:
        return isinstance(other, GeneralizedLaplacian) and np.array_equal(self.L, other.L)


@dataclasses.dataclass(frozen=True)
class PolarityVector:
    beta: Array

    def __post_init__(self) -> None:
        beta = readonly(self.beta, dtype=np.int64)
        if beta.ndim != 1:
            raise DimensionMismatch("(n,)", beta.shape, "polarity vector")
        if not np.all(np.isin(beta, (-1, 1))):
            raise InvalidGraph("Polarities must be exactly -1 or +1.")
        if not np.array_equal(beta, np.asarray(self.beta)):
            raise InvalidGraph("Polarities must be integers.")
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return int(self.beta.shape[0])

    @classmethod
    def ones(cls, n: int) -> "PolarityVector":
        return cls(np.ones(n, dtype=np.int64))

    def __neg__(self) -> "PolarityVector":
        return PolarityVector(-self.beta)

    def __eq__(self, other: typing.Any) -> bool:
        return isinstance(other, PolarityVector) and np.array_equal(self.beta, other.beta)


@dataclasses.dataclass(frozen=True)
class BalancedLaplacian:
    """
    A generalized Laplacian paired with the polarities that make every one of
    its edges consistent.
    """

    laplacian: GeneralizedLaplacian
    polarity: PolarityVector

    def __post_init__(self) -> None:
        if self.laplacian.n != self.polarity.n:
            raise DimensionMismatch(self.laplacian.n, self.polarity.n, "polarity vector")
        edges = inconsistent_edges(self.laplacian.L, self.polarity.beta)
        if edges:
            raise InconsistentLaplacian(edges)
        if np.any(np.diag(self.laplacian.L) < -EDGE_TOL):
            raise InvalidGraph("Balanced Laplacian has a negative diagonal entry.")

    @property
    def n(self) -> int:
        return self.laplacian.n

    @property
    def L(self) -> Array:
        return self.laplacian.L

    @property
    def beta(self) -> Array:
        return self.polarity.beta


@dataclasses.dataclass(frozen=True)
class SimilarityTransform:
    """
    The diagonal of `T = diag(beta)`. `T` is its own inverse and transpose.
    """

    signs: Array

    def __post_init__(self) -> None:
        signs = PolarityVector(self.signs).beta
        object.__setattr__(self, "signs", signs)

    @property
    def n(self) -> int:
        return int(self.signs.shape[0])

    def matrix(self) -> Array:
        return np.diag(self.signs.astype(float))

    def __eq__(self, other: typing.Any) -> bool:
        return isinstance(other, SimilarityTransform) and np.array_equal(self.signs, other.signs)


@dataclasses.dataclass(frozen=True, eq=False)
class HalfSpace:
    """
    The set of points `x` with `c . x <= c0`.
    """

    c: Array
    c0: float

    def __post_init__(self) -> None:
        c = readonly(self.c)
        if c.ndim != 1:
            raise DimensionMismatch("(n,)", c.shape, "half-space normal")
        if not np.any(c):
            raise ValueError("Half-space normal must not be the zero vector.")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c0", float(self.c0))

    def violation(self, x: Array) -> float:
        return float(self.c @ x - self.c0)


@dataclasses.dataclass(frozen=True, eq=False)
class ColumnLP:
    """
    The 3n half-spaces of one Laplacian column, stored as stacked normals and
    bounds: n upper rows `C_j l <= rho + e_ij`, n lower rows
    `-C_j l <= rho - e_ij`, then n sign rows `S_j l_j <= 0`.
    """

    normals: Array
    bounds: Array
    rho: float
    node: int

    def __post_init__(self) -> None:
        normals = readonly(self.normals)
        bounds = readonly(self.bounds)
        n = normals.shape[1]
        if normals.shape != (3 * n, n) or bounds.shape != (3 * n,):
            raise DimensionMismatch((3 * n, n), normals.shape, "column constraints")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho!r}.")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return int(self.normals.shape[1])

    @property
    def halfspaces(self) -> typing.List[HalfSpace]:
        return [HalfSpace(c, c0) for c, c0 in zip(self.normals, self.bounds)]

    def residual_constraints(self) -> typing.Tuple[Array, Array]:
        """
        Only the `||C l - e_i||_inf <= rho` rows, without the sign rows.
        """
        return self.normals[: 2 * self.n], self.bounds[: 2 * self.n]

    def max_violation(self, x: Array) -> float:
        return float(np.max(self.normals @ x - self.bounds))


@dataclasses.dataclass(frozen=True)
class RhoSchedule:
    rho_init: float = 0.05
    growth: float = 1.5
    rho_max: float = 10.0

    def __post_init__(self) -> None:
        if not self.rho_init > 0:
            raise ValueError(f"rho_init must be positive, got {self.rho_init!r}.")
        if not self.growth > 1:
            raise ValueError(f"growth must exceed 1, got {self.growth!r}.")
        if not self.rho_init < self.rho_max:
            raise ValueError("rho_init must be smaller than rho_max.")

    def __iter__(self) -> typing.Iterator[float]:
        rho = self.rho_init
        while rho <= self.rho_max:
            yield rho
            rho *= self.growth


@dataclasses.dataclass(frozen=True)
class PocsConfig:
    max_cycles: int = 1000
    stagnation_tol: float = 1e-9
    violation_tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.max_cycles < 1:
            raise ValueError(f"max_cycles must be positive, got {self.max_cycles!r}.")
        if not (self.stagnation_tol > 0 and self.violation_tol > 0):
            raise ValueError("POCS tolerances must be positive.")


@dataclasses.dataclass(frozen=True)
class LearnConfig:
    rho_schedule: RhoSchedule = dataclasses.field(default_factory=RhoSchedule)
    pocs: PocsConfig = dataclasses.field(default_factory=PocsConfig)
    max_sweeps: int = 20
    conv_tol: float = 1e-4
    seed: Seed = 0
    init_mode: str = "covariance-spectral"
    concurrent: bool = True

    def __post_init__(self) -> None:
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be at least 1, got {self.max_sweeps!r}.")
        if not self.conv_tol > 0:
            raise ValueError(f"conv_tol must be positive, got {self.conv_tol!r}.")
        if self.init_mode not in INIT_MODES:
            raise ValueError(
                f"Unknown init_mode {self.init_mode!r}. Expected one of {INIT_MODES}."
            )


@dataclasses.dataclass(frozen=True, eq=False)
class SampleCovariance:
    C: Array

    def __post_init__(self) -> None:
        C = square(self.C, "covariance")
        if not np.array_equal(C, C.T):
            raise DegenerateCovariance("Covariance matrix is not symmetric.")
        if np.any(np.diag(C) <= 0):
            raise DegenerateCovariance("Covariance diagonal must be strictly positive.")
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return int(self.C.shape[0])


@dataclasses.dataclass(frozen=True)
class SynthSpec:
    n: int
    p: float = 0.2
    weight_range: typing.Tuple[float, float] = (0.01, 1.0)
    selfloop_factor: float = 2.5
    seed: Seed = 0
    # Added to every self-loop on top of the factor rule.
    selfloop_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n!r}.")
        if not 0 < self.p < 1:
            raise ValueError(f"Edge probability must lie in (0, 1), got {self.p!r}.")
        lo, hi = self.weight_range
        if not 0 < lo < hi:
            raise ValueError(f"Weight range must satisfy 0 < lo < hi, got {self.weight_range!r}.")
        if not self.selfloop_factor > 0:
            raise ValueError("selfloop_factor must be positive.")
        if self.selfloop_offset < 0:
            raise ValueError("selfloop_offset must be non-negative.")


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralBasis:
    eigenvalues: Array
    eigenvectors: Array

    def __post_init__(self) -> None:
        eigenvalues = readonly(self.eigenvalues)
        eigenvectors = readonly(self.eigenvectors)
        n = eigenvalues.shape[0]
        if eigenvectors.shape != (n, n):
            raise DimensionMismatch((n, n), eigenvectors.shape, "eigenvectors")
        if np.any(np.diff(eigenvalues) < 0):
            raise ValueError("Eigenvalues must be in ascending order.")
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "eigenvectors", eigenvectors)

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1]) if self.n else 0.0

    def reconstruct(self) -> Array:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T
