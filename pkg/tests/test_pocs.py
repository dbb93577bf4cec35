import numpy as np
import pytest

from balancedgl.datastructures import HalfSpace, PocsConfig, RhoSchedule
from balancedgl.exceptions import DimensionMismatch, RhoExhausted
from balancedgl.pocs import (
    Feasible,
    Infeasible,
    clip_to_signs,
    find_min_rho,
    pocs_feasible,
    project_halfspace,
    screen_patterns,
)

# Smallest rho at which node 0 of [[1, 0.9], [0.9, 1]] admits a non-negative column.
MIN_FEASIBLE_RHO = 0.9 / 1.9


def correlated_pair():
    return np.array([[1.0, 0.9], [0.9, 1.0]])


def test_project_halfspace():
    h = HalfSpace([1.0, 0.0], 0.0)
    assert np.array_equal(project_halfspace([1.0, 1.0], h), [0.0, 1.0])
    assert np.array_equal(project_halfspace([-1.0, 2.0], h), [-1.0, 2.0])

    h = HalfSpace([1.0, 1.0], 1.0)
    projected = project_halfspace([2.0, 0.0], h)
    assert projected == pytest.approx(np.array([1.5, -0.5]))
    assert h.c @ projected == pytest.approx(1.0)


def test_project_halfspace_idempotent():
    rng = np.random.default_rng(0)
    for _ in range(50):
        h = HalfSpace(rng.standard_normal(4), float(rng.standard_normal()))
        once = project_halfspace(rng.standard_normal(4), h)
        assert h.violation(once) <= 1e-12
        assert project_halfspace(once, h) == pytest.approx(once, abs=1e-12)


def test_project_halfspace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        project_halfspace([1.0, 2.0, 3.0], HalfSpace([1.0, 0.0], 0.0))


def test_halfspace_rejects_zero_normal():
    with pytest.raises(ValueError):
        HalfSpace([0.0, 0.0], 1.0)


def test_pocs_feasible_hyperplane():
    halfspaces = [HalfSpace([1.0, 0.0], 0.0), HalfSpace([-1.0, 0.0], 0.0)]
    verdict = pocs_feasible(halfspaces, [5.0, 3.0])
    assert isinstance(verdict, Feasible)
    assert verdict.point[0] == pytest.approx(0.0, abs=1e-7)
    assert verdict.point[1] == 3.0


def test_pocs_feasible_empty_list():
    verdict = pocs_feasible([], [1.0, 2.0])
    assert isinstance(verdict, Feasible)
    assert np.array_equal(verdict.point, [1.0, 2.0])
    assert verdict.cycles == 0


def test_pocs_infeasible_interval():
    halfspaces = [HalfSpace([1.0], -1.0), HalfSpace([-1.0], -1.0)]
    verdict = pocs_feasible(halfspaces, [0.0])
    assert isinstance(verdict, Infeasible)
    assert verdict.cycles < PocsConfig().max_cycles


def test_pocs_feasible_random_systems():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(n, 3 * n))
        A = rng.standard_normal((m, n))
        center = rng.standard_normal(n)
        b = A @ center + rng.uniform(0.1, 1.0, size=m)
        halfspaces = [HalfSpace(c, c0) for c, c0 in zip(A, b)]
        verdict = pocs_feasible(halfspaces, 5.0 * rng.standard_normal(n))
        assert isinstance(verdict, Feasible)
        assert np.max(A @ verdict.point - b) <= 1e-7


def test_pocs_infeasible_random_systems():
    rng = np.random.default_rng(8)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        c = rng.standard_normal(n)
        halfspaces = [HalfSpace(c, -1.0), HalfSpace(-c, -1.0)]
        for _ in range(int(rng.integers(0, 3))):
            halfspaces.append(HalfSpace(rng.standard_normal(n), 10.0))
        verdict = pocs_feasible(halfspaces, rng.standard_normal(n))
        assert isinstance(verdict, Infeasible)


def test_pocs_respects_cycle_budget():
    halfspaces = [HalfSpace([1.0], -1.0), HalfSpace([-1.0], -1.0)]
    cfg = PocsConfig(max_cycles=1)
    verdict = pocs_feasible(halfspaces, [0.0], cfg)
    assert isinstance(verdict, Infeasible)
    assert verdict.cycles == 1


def test_clip_to_signs():
    assert np.array_equal(clip_to_signs([1.0, 2.0, -3.0], [-1.0, 1.0, 1.0]), [1.0, 0.0, -3.0])


def test_find_min_rho_identity():
    for S in ([-1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]):
        assert find_min_rho(np.eye(3), 0, S) == RhoSchedule().rho_init


def test_find_min_rho_within_one_growth_step():
    sched = RhoSchedule()
    rho = find_min_rho(correlated_pair(), 0, [-1.0, -1.0], sched)
    assert MIN_FEASIBLE_RHO <= rho <= MIN_FEASIBLE_RHO * sched.growth
    assert rho in list(sched)


def test_find_min_rho_exhausted():
    with pytest.raises(RhoExhausted) as info:
        find_min_rho(correlated_pair(), 0, [-1.0, -1.0], RhoSchedule(rho_max=0.4))
    assert info.value.node == 0
    assert info.value.rho_max == 0.4


def test_find_min_rho_is_monotone_in_rho_max():
    rho = find_min_rho(correlated_pair(), 0, [-1.0, -1.0], RhoSchedule(rho_max=1.0))
    assert find_min_rho(correlated_pair(), 0, [-1.0, -1.0], RhoSchedule(rho_max=50.0)) == rho


def test_screen_patterns_stops_at_first_confirmed_pattern():
    sched = RhoSchedule()
    screened = screen_patterns(correlated_pair(), 0, [[-1.0, -1.0], [-1.0, 1.0]], sched)
    rho, feasible = next(screened)
    assert rho < MIN_FEASIBLE_RHO
    assert feasible == (False, True)

    later = [rho for rho, feasible in screened if feasible[0]]
    assert later[0] == find_min_rho(correlated_pair(), 0, [-1.0, -1.0], sched)


def test_screen_patterns_concurrent_matches_sequential():
    patterns = [[-1.0, -1.0], [-1.0, 1.0]]
    sched = RhoSchedule(rho_max=1.0)
    sequential = list(screen_patterns(correlated_pair(), 0, patterns, sched))
    concurrent = list(screen_patterns(correlated_pair(), 0, patterns, sched, concurrent=True))
    assert sequential == concurrent


def test_rho_schedule():
    sched = RhoSchedule(rho_init=0.1, growth=2.0, rho_max=1.0)
    assert list(sched) == [0.1, 0.2, 0.4, 0.8]
    with pytest.raises(ValueError):
        RhoSchedule(growth=1.0)
    with pytest.raises(ValueError):
        RhoSchedule(rho_init=2.0, rho_max=1.0)
