"""Shared fixtures: the desk-scale benchmark sweep used by the trend tests.

The sweep is expensive (a few minutes), deterministic, and consumed by
several tests, so it is computed once per session.  Protocol, pinned here:

* data: n=50 nodes, Erdos-Renyi consensus with edge probability 0.1, 10%
  view rewiring, 10 fixed seeds (0..9); sweep points N in {3, 6, 9} at
  p=500/eta=0.1, p in {100, 250} at N=6, eta in {0.05, 0.2} at N=6.
* density weight: grid-searched with the single-view baseline on seed 0
  (best mean view F1), shared by all methods; ADMM penalty set to 4*alpha*n
  (matches the largest curvature of the quadratic term).
* coupling weight: bisected per point and per model toward mean pairwise
  correlation 0.8 on seed 0.
* consensus sparsity weight (row-l2 model): selected per point on seed 0 by
  best consensus F1 over the default grid.
"""

import numpy as np
import pytest

import mvglearn as mv
from mvglearn.evaluation import (
    DEFAULT_GAMMA_GRID,
    grid_search_alpha,
    tune_beta,
)

DESK_SEEDS = tuple(range(10))
DESK_N = 50
DESK_ALPHA_GRID = tuple(float(a) for a in np.logspace(-1, 3, 9))
DESK_POINTS = (
    ("N", 3, dict(n_views=3, p=500, eta=0.1)),
    ("N", 6, dict(n_views=6, p=500, eta=0.1)),
    ("N", 9, dict(n_views=9, p=500, eta=0.1)),
    ("p", 100, dict(n_views=6, p=100, eta=0.1)),
    ("p", 250, dict(n_views=6, p=250, eta=0.1)),
    ("eta", 0.05, dict(n_views=6, p=500, eta=0.05)),
    ("eta", 0.2, dict(n_views=6, p=500, eta=0.2)),
)


def desk_instance(n_views, p, eta, seed):
    cfg = mv.SimulationConfig(
        n=DESK_N, n_views=n_views, p=p, eta=eta, seed=seed,
        graph_model=mv.ErdosRenyi(0.1), shuffle_fraction=0.10,
    )
    sim = mv.simulate(cfg)
    return sim, [mv.precompute_statistics(X) for X in sim.signals]


def tune_desk_point(n_views, p, eta, with_gamma_ablation):
    """Seed-0 hyperparameter selection for one sweep point."""
    sim, datasets = desk_instance(n_views, p, eta, DESK_SEEDS[0])
    alpha = grid_search_alpha(
        datasets, "svgl", DESK_ALPHA_GRID, truth_views=sim.truth.views,
        hyper=mv.Hyperparameters(alpha=1.0, rho=1.0),
    ).value
    rho = 4.0 * alpha * DESK_N
    beta_l1 = tune_beta(
        datasets, mv.PenaltyModel.FUSED_L1, mv.Hyperparameters(alpha=alpha, rho=rho)
    )
    beta_l2 = tune_beta(
        datasets,
        mv.PenaltyModel.GROUP_L21,
        mv.Hyperparameters(alpha=alpha, gamma=0.1, rho=rho),
    )
    gamma = 0.0
    gamma_trace = []
    if with_gamma_ablation:
        # scored by consensus recovery on the tuning seed: the regularizer
        # exists to clean the consensus, and view F1 is nearly flat in it
        for g in DEFAULT_GAMMA_GRID:
            hyper = mv.Hyperparameters(alpha=alpha, beta=beta_l2.value, gamma=g, rho=rho)
            ve, ce, _ = mv.learn_graphs(datasets, "mvgl_l2", hyper)
            met = mv.compute_metrics(ve, sim.truth.views, ce, sim.truth.consensus)
            gamma_trace.append((g, met.f1_consensus))
        gamma = max(gamma_trace, key=lambda t: t[1])[0]
    return {
        "alpha": alpha,
        "rho": rho,
        "beta_l1": beta_l1,
        "beta_l2": beta_l2,
        "gamma": gamma,
        "gamma_trace": gamma_trace,
    }


def run_desk_point(n_views, p, eta, tuned, with_gamma_ablation):
    methods = {
        "svgl": {"f1v": [], "f1c": []},
        "mvgl_l1": {"f1v": [], "f1c": []},
        "mvgl_l2": {"f1v": [], "f1c": []},
    }
    if with_gamma_ablation:
        methods["mvgl_l2_g0"] = {"f1v": [], "f1c": []}
    alpha, rho = tuned["alpha"], tuned["rho"]
    for seed in DESK_SEEDS:
        sim, datasets = desk_instance(n_views, p, eta, seed)
        runs = [("svgl", "svgl", mv.Hyperparameters(alpha=alpha, rho=rho))]
        runs.append(
            ("mvgl_l1", "mvgl_l1",
             mv.Hyperparameters(alpha=alpha, beta=tuned["beta_l1"].value, rho=rho))
        )
        runs.append(
            ("mvgl_l2", "mvgl_l2",
             mv.Hyperparameters(alpha=alpha, beta=tuned["beta_l2"].value,
                                gamma=tuned["gamma"], rho=rho))
        )
        if with_gamma_ablation:
            runs.append(
                ("mvgl_l2_g0", "mvgl_l2",
                 mv.Hyperparameters(alpha=alpha, beta=tuned["beta_l2"].value,
                                    gamma=0.0, rho=rho))
            )
        for label, method, hyper in runs:
            ve, ce, _ = mv.learn_graphs(datasets, method, hyper)
            met = mv.compute_metrics(
                ve, sim.truth.views, ce,
                sim.truth.consensus if ce is not None else None,
            )
            methods[label]["f1v"].append(met.f1_view)
            if met.f1_consensus is not None:
                methods[label]["f1c"].append(met.f1_consensus)
    return methods


@pytest.fixture(scope="session")
def desk_results():
    """Tuned runs of all methods over the desk-scale sweep (computed once)."""
    results = {}
    for var, value, params in DESK_POINTS:
        ablate = var == "N"  # the consensus comparisons use the N sweep
        tuned = tune_desk_point(**params, with_gamma_ablation=ablate)
        methods = run_desk_point(**params, tuned=tuned, with_gamma_ablation=ablate)
        results[(var, value)] = {"tuned": tuned, "methods": methods, "params": params}
    return results


def curve_inversions(values, direction="increasing", tol=1e-9):
    """Count adjacent violations of the expected monotone direction."""
    pairs = zip(values, values[1:])
    if direction == "increasing":
        return sum(1 for a, b in pairs if b < a - tol)
    return sum(1 for a, b in pairs if b > a + tol)
