import logging
import typing

import numpy as np
from scipy.optimize import linprog

from balancedgl.datastructures import ColumnLP, HalfSpace
from balancedgl.exceptions import (
    BalancedGLError,
    DegenerateCovariance,
    DimensionMismatch,
    InfeasibleProblem,
    UnboundedProblem,
)
from balancedgl.types import Array, ArrayLike

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": FEASIBILITY_TOL,
    "dual_feasibility_tolerance": FEASIBILITY_TOL,
}


def build_column_constraints(
    C: ArrayLike, i: int, rho: float, S_diag: ArrayLike
) -> ColumnLP:
    """
    Expand `||C l - e_i||_inf <= rho` and `S l <= 0` into 3n half-spaces:

        C_j l <= rho + [j == i]
       -C_j l <= rho - [j == i]
        S_j l_j <= 0
    """
    C = np.asarray(C, dtype=float)
    S_diag = np.asarray(S_diag, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatch("(n, n)", C.shape, "covariance")
    n = C.shape[0]
    if S_diag.shape != (n,):
        raise DimensionMismatch((n,), S_diag.shape, "sign pattern")
    if not 0 <= i < n:
        raise IndexError(f"Node index {i} out of range for {n} nodes.")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho!r}.")
    if not np.all(np.isin(S_diag, (-1.0, 1.0))):
        raise ValueError("Sign pattern entries must be -1 or +1.")
    if S_diag[i] != -1:
        raise ValueError("The sign pattern must hold -1 at the node itself.")
    zero_rows = np.flatnonzero(~C.any(axis=1))
    if zero_rows.size:
        raise DegenerateCovariance(f"Covariance rows {zero_rows.tolist()} are all zero.")

    e = np.zeros(n)
    e[i] = 1.0
    normals = np.vstack([C, -C, np.diag(S_diag)])
    bounds = np.concatenate([rho + e, rho - e, np.zeros(n)])
    return ColumnLP(normals=normals, bounds=bounds, rho=rho, node=i)


def solve_l1_lp(constraints: typing.Sequence[HalfSpace], n: int) -> Array:
    """
    Minimize `||x||_1` over the intersection of the half-spaces.
    """
    if not constraints:
        return np.zeros(n)
    A = np.vstack([h.c for h in constraints])
    b = np.array([h.c0 for h in constraints])
    if A.shape[1] != n:
        raise DimensionMismatch(n, A.shape[1], "half-space normal")
    return _solve_split(A, b)


def _solve_split(A: Array, b: Array) -> Array:
    # x = x_pos - x_neg with both parts non-negative turns |x| into a linear cost.
    n = A.shape[1]
    result = linprog(
        np.ones(2 * n),
        A_ub=np.hstack([A, -A]),
        b_ub=b,
        bounds=(0, None),
        method="highs",
        options=HIGHS_OPTIONS,
    )
    if result.status == 2:
        raise InfeasibleProblem(result.message)
    if result.status == 3:
        raise UnboundedProblem(result.message)
    if result.status != 0:
        raise BalancedGLError(f"LP solver failed: {result.message}")
    return result.x[:n] - result.x[n:]


def solve_clime_column(
    C: ArrayLike,
    i: int,
    rho: float,
    S_diag: typing.Optional[ArrayLike] = None,
    constrained: bool = True,
) -> Array:
    """
    One column of the CLIME estimate. With `constrained=False` the sign rows
    are dropped, which is plain CLIME and feasible for every rho > 0.
    """
    n = np.shape(C)[0]
    if S_diag is None:
        if constrained:
            raise ValueError("A sign pattern is required in constrained mode.")
        S_diag = -np.ones(n)
    lp = build_column_constraints(C, i, rho, S_diag)
    A, b = (lp.normals, lp.bounds) if constrained else lp.residual_constraints()
    column = _solve_split(A, b)
    logger.debug(
        "Column %d solved at rho=%g (constrained=%s): |l|_1=%g",
        i,
        rho,
        constrained,
        float(np.abs(column).sum()),
    )
    return column
