"""
Feasibility screening by projections onto convex sets.

Before a column LP is handed to the solver, cyclic projections onto its
half-spaces decide whether the constraint set is non-empty at the current
rho. The verdict is a heuristic: a run that stagnates or exhausts its cycle
budget is reported infeasible.
"""
import functools
import logging
import typing

import numba
import numpy as np

from balancedgl.concurrency import gather
from balancedgl.datastructures import HalfSpace, PocsConfig, RhoSchedule
from balancedgl.exceptions import DimensionMismatch, RhoExhausted
from balancedgl.lp import build_column_constraints
from balancedgl.types import Array, ArrayLike

logger = logging.getLogger(__name__)


class Feasible(typing.NamedTuple):
    point: Array
    cycles: int


class Infeasible(typing.NamedTuple):
    point: Array
    cycles: int


Verdict = typing.Union[Feasible, Infeasible]


def project_halfspace(x: ArrayLike, h: HalfSpace) -> Array:
    x = np.asarray(x, dtype=float)
    if x.shape != h.c.shape:
        raise DimensionMismatch(h.c.shape, x.shape, "point")
    excess = float(h.c @ x) - h.c0
    if excess <= 0.0:
        return x.copy()
    # (I - cc'/c'c) x + (c0/c'c) c, written as a step back along the normal.
    return x - (excess / float(h.c @ h.c)) * h.c


@numba.njit(cache=True, nogil=True)
def _cycle_projections(A, b, x, max_cycles, stagnation_tol, violation_tol):  # pragma: no cover
    m, n = A.shape
    norms = np.empty(m)
    for k in range(m):
        norms[k] = A[k] @ A[k]
    start = np.empty(n)
    for cycle in range(max_cycles):
        start[:] = x
        for k in range(m):
            excess = A[k] @ x - b[k]
            if excess > 0.0:
                x -= (excess / norms[k]) * A[k]
        worst = np.max(A @ x - b)
        if worst <= violation_tol:
            return True, cycle + 1
        if np.sqrt(np.sum((x - start) ** 2)) < stagnation_tol:
            return False, cycle + 1
    return False, max_cycles


def _run_pocs(A: Array, b: Array, x0: Array, cfg: PocsConfig) -> Verdict:
    x = np.array(x0, dtype=np.float64)
    if A.shape[0] == 0:
        return Feasible(x, 0)
    feasible, cycles = _cycle_projections(
        np.ascontiguousarray(A, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        x,
        cfg.max_cycles,
        cfg.stagnation_tol,
        cfg.violation_tol,
    )
    if feasible:
        return Feasible(x, cycles)
    return Infeasible(x, cycles)


def pocs_feasible(
    halfspaces: typing.Sequence[HalfSpace], x0: ArrayLike, cfg: PocsConfig = None
) -> Verdict:
    """
    Project cyclically onto the half-spaces in the order given, starting at `x0`.

    A cycle ends in `Feasible` once every constraint is violated by at most
    `violation_tol`. It ends in `Infeasible` when the iterate at the end of a
    cycle moved less than `stagnation_tol` from where the cycle began while
    still violating something, or after `max_cycles`.
    """
    cfg = cfg or PocsConfig()
    x0 = np.asarray(x0, dtype=float)
    if not halfspaces:
        return Feasible(x0.copy(), 0)
    A = np.vstack([h.c for h in halfspaces])
    b = np.array([h.c0 for h in halfspaces])
    if A.shape[1] != x0.shape[0]:
        raise DimensionMismatch(A.shape[1], x0.shape, "starting point")
    return _run_pocs(A, b, x0, cfg)


def clip_to_signs(x: ArrayLike, S_diag: ArrayLike) -> Array:
    """
    Zero the entries of `x` that break `S_j x_j <= 0`.
    """
    x = np.array(x, dtype=float)
    x[np.asarray(S_diag) * x > 0] = 0.0
    return x


def find_min_rho(
    C: ArrayLike,
    i: int,
    S_diag: ArrayLike,
    sched: RhoSchedule = None,
    cfg: PocsConfig = None,
    x0: ArrayLike = None,
) -> float:
    """
    The first rho of the schedule at which POCS finds the column constraints
    feasible. Each attempt warm-starts from the previous attempt's last
    iterate; the first starts from `x0`, or `e_i`, clipped to the sign pattern.
    """
    sched = sched or RhoSchedule()
    for rho, feasible in screen_patterns(C, i, [S_diag], sched, cfg, x0):
        if feasible[0]:
            return rho
    raise RhoExhausted(node=i, rho_max=sched.rho_max)


def screen_patterns(
    C: ArrayLike,
    i: int,
    patterns: typing.Sequence[ArrayLike],
    sched: RhoSchedule = None,
    cfg: PocsConfig = None,
    x0: ArrayLike = None,
    concurrent: bool = False,
) -> typing.Iterator[typing.Tuple[float, typing.Tuple[bool, ...]]]:
    """
    Walk one rho schedule for several sign patterns of column `i` together.

    Yields `(rho, verdicts)` for every rho at which POCS finds at least one
    pattern feasible, in schedule order. Each pattern keeps its own iterate
    from one rho to the next.
    """
    sched = sched or RhoSchedule()
    cfg = cfg or PocsConfig()
    if x0 is None:
        x0 = np.zeros(np.shape(C)[0])
        x0[i] = 1.0
    points = [clip_to_signs(x0, S) for S in patterns]

    for rho in sched:
        runs = [
            functools.partial(_screen_one, C, i, rho, S, x, cfg)
            for S, x in zip(patterns, points)
        ]
        if concurrent and len(runs) > 1:
            verdicts = gather(*runs)
        else:
            verdicts = [run() for run in runs]
        points = [verdict.point for verdict in verdicts]
        feasible = tuple(isinstance(verdict, Feasible) for verdict in verdicts)
        logger.debug(
            "Node %d rho=%g: %s",
            i,
            rho,
            ", ".join(f"{type(v).__name__} after {v.cycles} cycles" for v in verdicts),
        )
        if any(feasible):
            yield rho, feasible


def _screen_one(
    C: ArrayLike, i: int, rho: float, S_diag: ArrayLike, x: Array, cfg: PocsConfig
) -> Verdict:
    lp = build_column_constraints(C, i, rho, S_diag)
    return _run_pocs(lp.normals, lp.bounds, x, cfg)
