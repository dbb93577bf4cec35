import numpy as np
import pytest

from balancedgl.datastructures import (
    GeneralizedLaplacian,
    LearnConfig,
    PolarityVector,
    RhoSchedule,
    SampleCovariance,
    SignedGraph,
    SynthSpec,
)
from balancedgl.exceptions import BothInfeasible, DegenerateCovariance, DimensionMismatch
from balancedgl.graphs import check_consistency, two_coloring_balance_check
from balancedgl.learning import (
    BalancedGraphLearner,
    clime_greedy,
    clime_unconstrained,
    init_polarities,
    learn_balanced_laplacian,
    optimize_column,
    sample_covariance,
    sign_pattern,
)
from balancedgl.synth import gen_balanced_er_graph, sample_gmrf


def synthetic_covariance(n, seed, K=None):
    truth = gen_balanced_er_graph(SynthSpec(n=n, p=0.3, seed=seed, selfloop_offset=0.5))
    X = sample_gmrf(truth.laplacian, K or 20 * n, seed=seed + 1)
    return truth, sample_covariance(X)


def off_diagonal_graph(L):
    W = -np.array(L)
    np.fill_diagonal(W, 0.0)
    return SignedGraph(W)


def exact_covariance(b):
    C = np.linalg.inv(b.L)
    return SampleCovariance((C + C.T) / 2)


def mixed_sign_covariance():
    # Column 0 of the precision matrix has entries of both signs off the
    # diagonal, which no polarity of node 0 can accommodate at small rho
    # while nodes 1 and 2 share a polarity.
    P = np.array([[1.0, 0.4, -0.4], [0.4, 1.0, 0.0], [-0.4, 0.0, 1.0]])
    C = np.linalg.inv(P)
    return SampleCovariance((C + C.T) / 2)


def test_sample_covariance():
    C = sample_covariance([[1.0, -1.0, 1.0, -1.0]])
    assert C.C[0, 0] == pytest.approx(4.0 / 3.0)

    X = np.random.default_rng(0).standard_normal((3, 50))
    expected = np.cov(X)
    assert sample_covariance(X).C == pytest.approx(expected)


def test_sample_covariance_errors():
    with pytest.raises(DegenerateCovariance):
        sample_covariance(np.ones((2, 5)))
    with pytest.raises(DegenerateCovariance):
        sample_covariance(np.random.default_rng(0).standard_normal((4, 4)))
    with pytest.raises(DimensionMismatch):
        sample_covariance(np.ones(5))


def test_init_polarities():
    C = SampleCovariance(np.eye(4))
    assert init_polarities(C, "all-ones") == PolarityVector.ones(4)
    assert init_polarities(C, "covariance-greedy", seed=1) == PolarityVector.ones(4)
    assert init_polarities(C, "covariance-spectral") == PolarityVector.ones(4)

    C = SampleCovariance(np.array([[1.0, -0.5], [-0.5, 1.0]]))
    assert init_polarities(C, "covariance-greedy", seed=1) == PolarityVector([1, -1])
    assert init_polarities(C) == PolarityVector([1, -1])

    with pytest.raises(ValueError):
        init_polarities(C, "random")


def test_sign_pattern():
    assert np.array_equal(sign_pattern([1, -1, 1], 0, 1), [-1.0, -1.0, 1.0])
    assert np.array_equal(sign_pattern([1, -1, 1], 0, -1), [-1.0, 1.0, -1.0])


def test_optimize_column_tie_keeps_polarity():
    C = SampleCovariance(np.eye(3))
    for beta in ([1, -1, 1], [1, 1, 1]):
        choice = optimize_column(C, np.zeros((3, 3)), PolarityVector(beta), 1)
        assert choice.beta_i == beta[1]
        assert choice.column == pytest.approx(np.array([0.0, 0.95, 0.0]), abs=1e-9)
        assert choice.rho == 0.05


def test_optimize_column_single_feasible_hypothesis():
    C = SampleCovariance(np.array([[1.0, 0.9], [0.9, 1.0]]))
    cfg = LearnConfig(rho_schedule=RhoSchedule(rho_max=0.4))
    # Only beta_0 = -1 lets the off-diagonal entry go negative.
    choice = optimize_column(C, np.zeros((2, 2)), PolarityVector([1, -1]), 0, cfg)
    assert choice.beta_i == -1
    assert choice.column[1] < 0
    assert choice.column[0] > 0


def test_optimize_column_negative_covariance_opposes_polarities():
    C = SampleCovariance(np.array([[1.0, -0.8], [-0.8, 1.0]]))
    for current in (1, -1):
        choice = optimize_column(C, np.zeros((2, 2)), PolarityVector([1, current]), 1)
        assert choice.beta_i == -1
        # A positive Laplacian entry is a negative edge.
        assert choice.column[0] > 0
        assert choice.column[1] > 0
        # Below the rho at which beta_i = +1 first becomes feasible.
        assert choice.rho < 0.3


def test_optimize_column_keeps_true_polarity():
    spec = SynthSpec(n=20, p=0.3, weight_range=(0.3, 1.0), seed=3, selfloop_offset=0.5)
    truth = gen_balanced_er_graph(spec)
    C = exact_covariance(truth)
    cfg = LearnConfig(rho_schedule=RhoSchedule(rho_init=0.01))
    degree = np.count_nonzero(off_diagonal_graph(truth.L).W, axis=1)
    for i in np.flatnonzero(degree):
        choice = optimize_column(C, truth.L, truth.polarity, int(i), cfg)
        assert choice.beta_i == truth.polarity.beta[i]


def test_learner_recovers_polarity_from_exact_covariance():
    spec = SynthSpec(n=20, p=0.3, weight_range=(0.3, 1.0), seed=4, selfloop_offset=0.5)
    truth = gen_balanced_er_graph(spec)
    cfg = LearnConfig(rho_schedule=RhoSchedule(rho_init=0.01))
    result = BalancedGraphLearner(cfg).fit(exact_covariance(truth))
    beta = result.balanced.polarity.beta
    expected = truth.polarity.beta
    for i, j in zip(*np.nonzero(np.triu(off_diagonal_graph(truth.L).W))):
        assert beta[i] * beta[j] == expected[i] * expected[j]
    assert result.converged


def test_optimize_column_rejects_mismatched_estimate():
    C = SampleCovariance(np.eye(3))
    with pytest.raises(DimensionMismatch):
        optimize_column(C, np.zeros((2, 2)), PolarityVector.ones(3), 0)


def test_optimize_column_both_infeasible():
    cfg = LearnConfig(rho_schedule=RhoSchedule(rho_max=0.1))
    with pytest.raises(BothInfeasible) as info:
        optimize_column(mixed_sign_covariance(), np.zeros((3, 3)), PolarityVector.ones(3), 0, cfg)
    assert info.value.node == 0


def test_learner_raises_both_infeasible():
    cfg = LearnConfig(rho_schedule=RhoSchedule(rho_max=0.1), init_mode="all-ones")
    learner = BalancedGraphLearner(cfg)
    with pytest.raises(BothInfeasible):
        learner.fit(mixed_sign_covariance())


def test_learn_diagonal_covariance():
    C = SampleCovariance(np.diag([2.0, 3.0, 5.0]))
    result = BalancedGraphLearner().fit(C)
    L = result.balanced.L
    assert np.diag(L) == pytest.approx(0.95 / np.array([2.0, 3.0, 5.0]), abs=1e-8)
    assert np.count_nonzero(L - np.diag(np.diag(L))) == 0
    assert result.converged
    assert result.sweeps <= 2
    assert result.balanced.polarity == PolarityVector.ones(3)
    assert result.warnings == ()


def test_learned_graphs_are_balanced():
    for n, seed in [(6, 0), (8, 1), (8, 2), (10, 3)]:
        _, C = synthetic_covariance(n, seed)
        result = BalancedGraphLearner(LearnConfig(seed=seed)).fit(C)
        b = result.balanced
        assert check_consistency(b.laplacian, b.polarity)
        assert two_coloring_balance_check(off_diagonal_graph(b.L)) is not None
        assert np.all(np.diag(b.L) >= 0)


@pytest.mark.slow
def test_learned_graphs_are_balanced_across_sizes():
    for trial in range(102):
        n = (10, 20, 50)[trial % 3]
        truth = gen_balanced_er_graph(SynthSpec(n=n, p=0.2, seed=trial, selfloop_offset=0.5))
        X = sample_gmrf(truth.laplacian, 10 * n, seed=1000 + trial)
        b = learn_balanced_laplacian(sample_covariance(X), LearnConfig(seed=trial))
        assert check_consistency(b.laplacian, b.polarity)
        assert two_coloring_balance_check(off_diagonal_graph(b.L)) is not None


def test_learned_columns_meet_their_residual_bound():
    _, C = synthetic_covariance(8, 4)
    result = BalancedGraphLearner().fit(C)
    for i in range(C.n):
        e = np.zeros(C.n)
        e[i] = 1.0
        residual = np.max(np.abs(C.C @ result.columns[:, i] - e))
        assert residual <= result.rhos[i] + 1e-7
        assert result.objectives[i] == pytest.approx(np.abs(result.columns[:, i]).sum())


def test_concurrent_and_sequential_agree():
    _, C = synthetic_covariance(8, 5)
    concurrent = BalancedGraphLearner(LearnConfig(concurrent=True)).fit(C)
    sequential = BalancedGraphLearner(LearnConfig(concurrent=False)).fit(C)
    assert np.array_equal(concurrent.balanced.L, sequential.balanced.L)
    assert concurrent.balanced.polarity == sequential.balanced.polarity


def test_covariance_greedy_initialisation():
    _, C = synthetic_covariance(8, 6)
    b = learn_balanced_laplacian(C, LearnConfig(init_mode="covariance-greedy", seed=6))
    assert check_consistency(b.laplacian, b.polarity)


def test_learn_config_validation():
    with pytest.raises(ValueError):
        LearnConfig(max_sweeps=0)
    with pytest.raises(ValueError):
        LearnConfig(conv_tol=0.0)
    with pytest.raises(ValueError):
        LearnConfig(init_mode="random")


def test_clime_unconstrained_identity():
    L = clime_unconstrained(SampleCovariance(np.eye(3)), 0.2)
    assert L.L == pytest.approx(0.8 * np.eye(3), abs=1e-9)


def test_clime_unconstrained_approaches_inverse():
    P = np.array(
        [
            [2.0, -0.5, 0.0, 0.3],
            [-0.5, 2.0, 0.4, 0.0],
            [0.0, 0.4, 2.0, -0.6],
            [0.3, 0.0, -0.6, 2.0],
        ]
    )
    C = np.linalg.inv(P)
    C = SampleCovariance((C + C.T) / 2)
    coarse = np.max(np.abs(clime_unconstrained(C, 0.1).L - P))
    fine = np.max(np.abs(clime_unconstrained(C, 0.001).L - P))
    assert fine < coarse
    assert fine < 0.05


def test_clime_unconstrained_rejects_bad_rho():
    with pytest.raises(ValueError):
        clime_unconstrained(SampleCovariance(np.eye(2)), 0.0)


def test_clime_greedy_is_balanced():
    for seed in range(3):
        _, C = synthetic_covariance(8, 10 + seed)
        b = clime_greedy(C, 0.1, seed=seed)
        assert check_consistency(b.laplacian, b.polarity)
        assert isinstance(b.laplacian, GeneralizedLaplacian)
