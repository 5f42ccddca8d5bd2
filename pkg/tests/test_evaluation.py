import numpy as np
import pytest

import mvglearn as mv
from mvglearn.errors import DimensionMismatch, EmptyGraph, InvalidConfig
from mvglearn.evaluation import (
    TuneResult,
    binarize,
    compute_metrics,
    density_to_k,
    f1,
    grid_search_alpha,
    grid_search_gamma,
    learn_graphs,
    mean_ci95,
    normalize_method,
    pairwise_correlation,
    tune_beta,
)
from mvglearn.graph_core import EdgeIndexMap, edge_count
from mvglearn.mvgl import Hyperparameters, PenaltyModel, precompute_statistics


class TestBinarize:
    def test_relative_threshold_drops_dust(self):
        mask = binarize(np.array([-1.0, 0.0, -1e-9]))
        assert mask.tolist() == [True, False, False]

    def test_topk_complete(self):
        ell = -np.arange(1.0, 7.0)
        assert binarize(ell, rule="topk", k=6).all()

    def test_uniform_all_present(self):
        mask = binarize(np.full(6, -0.5))
        assert mask.all()

    def test_all_zero_relative_is_empty(self):
        assert not binarize(np.zeros(5)).any()

    def test_all_zero_topk_raises(self):
        with pytest.raises(EmptyGraph):
            binarize(np.zeros(5), rule="topk", k=2)

    def test_topk_selects_largest(self):
        ell = np.array([-0.1, -5.0, -3.0, 0.0])
        mask = binarize(ell, rule="topk", k=2)
        assert mask.tolist() == [False, True, True, False]

    def test_unknown_rule(self):
        with pytest.raises(InvalidConfig):
            binarize(np.zeros(3), rule="magic")

    def test_density_to_k(self):
        assert density_to_k(0.15, 1225) == 183


class TestF1:
    def test_identical_nonempty(self):
        mask = np.array([True, False, True])
        assert f1(mask, mask) == 1.0

    def test_disjoint(self):
        a = np.array([True, False, False])
        b = np.array([False, True, False])
        assert f1(a, b) == 0.0

    def test_half_overlap(self):
        # pred {(0,1),(0,2)}, truth {(0,1),(1,2)} on n=3
        index = EdgeIndexMap(3)
        pred = np.zeros(3, dtype=bool)
        truth = np.zeros(3, dtype=bool)
        pred[[index.index(0, 1), index.index(0, 2)]] = True
        truth[[index.index(0, 1), index.index(1, 2)]] = True
        assert f1(pred, truth) == 0.5

    def test_both_empty(self):
        empty = np.zeros(4, dtype=bool)
        assert f1(empty, empty) == 0.0

    def test_size_mismatch(self):
        with pytest.raises(DimensionMismatch):
            f1(np.zeros(3, dtype=bool), np.zeros(6, dtype=bool))

    def test_invariant_under_node_relabeling(self):
        rng = np.random.default_rng(0)
        n = 8
        index = EdgeIndexMap(n)
        pred = rng.random(edge_count(n)) < 0.3
        truth = rng.random(edge_count(n)) < 0.3
        perm = rng.permutation(n)
        remap = np.empty(edge_count(n), dtype=int)
        for e in range(edge_count(n)):
            i, j = index.pair(e)
            remap[index.index(perm[i], perm[j])] = e
        assert f1(pred[remap], truth[remap]) == pytest.approx(f1(pred, truth))


class TestPairwiseCorrelation:
    def test_identical_views(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(10)
        E = np.stack([v, v, v], axis=1)
        assert pairwise_correlation(E) == pytest.approx(1.0)

    def test_anticorrelated_pair(self):
        v = np.array([1.0, -1.0, 2.0, -2.0])
        E = np.stack([v, -v], axis=1)
        assert pairwise_correlation(E) == pytest.approx(-1.0)

    def test_matches_direct_pearson(self):
        rng = np.random.default_rng(2)
        E = rng.standard_normal((15, 3))
        expected = np.mean(
            [np.corrcoef(E[:, i], E[:, j])[0, 1] for i, j in [(0, 1), (0, 2), (1, 2)]]
        )
        assert pairwise_correlation(E) == pytest.approx(expected, abs=1e-12)

    def test_zero_variance_warns_and_contributes_zero(self):
        E = np.zeros((6, 2))
        E[:, 1] = np.arange(6.0)
        with pytest.warns(UserWarning):
            assert pairwise_correlation(E) == 0.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(3)
        E = rng.standard_normal((12, 4))
        assert pairwise_correlation(3.7 * E) == pytest.approx(pairwise_correlation(E))

    def test_needs_two_views(self):
        with pytest.raises(DimensionMismatch):
            pairwise_correlation(np.zeros((5, 1)))


def small_instance(seed=0, n=12, n_views=3, p=60):
    cfg = mv.SimulationConfig(n=n, n_views=n_views, p=p, eta=0.1, seed=seed,
                              graph_model=mv.ErdosRenyi(0.25))
    sim = mv.simulate(cfg)
    return sim, [precompute_statistics(X) for X in sim.signals]


class TestTuneBeta:
    def test_reaches_target_on_small_instance(self):
        sim, datasets = small_instance()
        hyper = Hyperparameters(alpha=2.0, rho=4.0 * 2.0 * 12)
        result = tune_beta(datasets, PenaltyModel.FUSED_L1, hyper,
                           target_corr=0.8, tol=0.02)
        assert result.attained
        assert abs(result.achieved - 0.8) <= 0.02
        assert len(result.trace) <= 20

    def test_huge_coupling_drives_correlation_to_one(self):
        sim, datasets = small_instance()
        hyper = Hyperparameters(alpha=2.0, beta=1e5, rho=4.0 * 2.0 * 12)
        ve, _, _ = learn_graphs(datasets, "mvgl_l1", hyper)
        assert pairwise_correlation(ve) >= 0.999

    def test_low_endpoint_matches_singleview_correlation(self):
        sim, datasets = small_instance()
        rho = 4.0 * 2.0 * 12
        hyper = Hyperparameters(alpha=2.0, beta=1e-4, rho=rho)
        ve, _, _ = learn_graphs(datasets, "mvgl_l1", hyper)
        sv, _, _ = learn_graphs(datasets, "svgl", Hyperparameters(alpha=2.0, rho=rho))
        assert pairwise_correlation(ve) == pytest.approx(
            pairwise_correlation(sv), abs=0.02
        )

    def test_unattainable_target_flagged(self):
        sim, datasets = small_instance()
        hyper = Hyperparameters(alpha=2.0, rho=4.0 * 2.0 * 12)
        result = tune_beta(datasets, PenaltyModel.FUSED_L1, hyper,
                           target_corr=0.2, tol=0.01)  # below the beta->0 floor
        assert not result.attained


class TestGridSearchAlpha:
    def test_single_point_grid(self):
        sim, datasets = small_instance()
        result = grid_search_alpha(datasets, "svgl", [1.5],
                                   truth_views=sim.truth.views)
        assert result.value == 1.5
        assert len(result.trace) == 1

    def test_argmax_contract(self):
        sim, datasets = small_instance()
        result = grid_search_alpha(datasets, "svgl", [0.1, 1.0, 10.0],
                                   truth_views=sim.truth.views)
        best = max(result.trace, key=lambda t: t[1])
        assert result.value == best[0]
        assert result.achieved == best[1]

    def test_density_mode(self):
        sim, datasets = small_instance()
        m = edge_count(12)
        result = grid_search_alpha(datasets, "svgl",
                                   np.logspace(-1, 2, 7), target_density=0.15)
        assert abs(result.achieved - density_to_k(0.15, m) / m) <= 1.0 / m

    def test_empty_grid(self):
        sim, datasets = small_instance()
        with pytest.raises(InvalidConfig):
            grid_search_alpha(datasets, "svgl", [], truth_views=sim.truth.views)

    def test_needs_a_score(self):
        sim, datasets = small_instance()
        with pytest.raises(InvalidConfig):
            grid_search_alpha(datasets, "svgl", [1.0])


class TestHelpers:
    def test_normalize_method(self):
        assert normalize_method("single") == "svgl"
        assert normalize_method("L1") == "mvgl_l1"
        with pytest.raises(InvalidConfig):
            normalize_method("jgl")

    def test_mean_ci95(self):
        mean, half = mean_ci95([0.5])
        assert (mean, half) == (0.5, 0.0)
        mean, half = mean_ci95([0.0, 1.0])
        assert mean == 0.5 and half == pytest.approx(1.96 * np.std([0, 1], ddof=1) / np.sqrt(2))

    def test_compute_metrics_shapes(self):
        sim, datasets = small_instance()
        ve, ce, _ = learn_graphs(datasets, "mvgl_l1",
                                 Hyperparameters(alpha=2.0, beta=1.0, rho=96.0))
        met = compute_metrics(ve, sim.truth.views, ce, sim.truth.consensus)
        assert 0.0 <= met.f1_view <= 1.0
        assert 0.0 <= met.f1_consensus <= 1.0
        assert len(met.per_view_f1) == 3
        payload = met.to_dict()
        assert set(payload) == {"f1_view", "f1_consensus", "per_view_f1", "mean_pairwise_corr"}

    def test_grid_search_gamma_contract(self):
        sim, datasets = small_instance()
        hyper = Hyperparameters(alpha=2.0, beta=1.0, rho=96.0)
        result = grid_search_gamma(datasets, [0.01, 0.1], sim.truth.views, hyper)
        assert isinstance(result, TuneResult)
        assert result.value in (0.01, 0.1)


class TestJointBeatsBaselineTrend:
    def test_multiview_f1_exceeds_single_view(self, desk_results):
        # statistical trend at n=50, N=6, p=500, eta=0.1 over 10 seeds
        point = desk_results[("N", 6)]["methods"]
        assert np.mean(point["mvgl_l1"]["f1v"]) > np.mean(point["svgl"]["f1v"])
