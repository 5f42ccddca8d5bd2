"""Command-line interface: simulate, learn, eval and bench.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.  All commands are deterministic given their config and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import datagen, evaluation
from .errors import (
    DimensionMismatch,
    EmptyGraph,
    InvalidConfig,
    InvalidData,
    InvalidHyperparameter,
    InvalidMatrix,
)
from .evaluation import (
    DEFAULT_GAMMA_GRID,
    compute_metrics,
    density_to_k,
    grid_search_alpha,
    grid_search_gamma,
    learn_graphs,
    mean_ci95,
    normalize_method,
    tune_beta,
)
from .graph_core import edge_count, read_edge_list_tsv, write_edge_list_tsv
from .mvgl import Hyperparameters, PenaltyModel, SolverOptions, precompute_statistics
from .svgl import solve_single

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

DEFAULT_ALPHA_GRID = tuple(float(a) for a in np.logspace(-3, 5, 17))


def _load_config(path, overrides):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: invalid JSON: {exc}") from exc
    for item in overrides or []:
        if "=" not in item:
            raise InvalidConfig(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        cfg[key.strip()] = value
    return cfg


def _solver_options(args):
    return SolverOptions(
        max_admm_iter=args.max_iter,
        max_bcd_iter=args.bcd_max_iter,
        eps_abs=args.eps_abs,
        eps_rel=args.eps_rel,
    )


def _thread_count(args):
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("MVGL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InvalidConfig(f"MVGL_THREADS must be an integer, got {env!r}") from exc
    return 1


def cmd_simulate(args):
    cfg = _load_config(args.config, args.set)
    outdir = args.out or cfg.get("out")
    if not outdir:
        raise InvalidConfig("no output directory: pass --out or set 'out' in the config")
    config = datagen.SimulationConfig.from_dict(cfg)
    dataset = datagen.simulate(config)
    datagen.write_dataset(dataset, outdir)
    print(f"wrote dataset ({config.n_views} views, n={config.n}, p={config.p}) to {outdir}")
    return EXIT_OK


def _report_dict(reports):
    if len(reports) == 1:
        rep = reports[0]
        return {
            "iterations": rep.iterations,
            "converged": rep.converged,
            "primal_residuals": [float(r) for r in rep.primal_residuals],
            "dual_residuals": [float(r) for r in rep.dual_residuals],
            "objective": [float(o) for o in rep.objective_history],
        }
    return {
        "iterations": max(rep.iterations for rep in reports),
        "converged": all(rep.converged for rep in reports),
        "views": [
            {
                "iterations": rep.iterations,
                "converged": rep.converged,
                "primal_residuals": [float(r) for r in rep.primal_residuals],
                "dual_residuals": [float(r) for r in rep.dual_residuals],
                "objective": [float(o) for o in rep.objective_history],
            }
            for rep in reports
        ],
    }


def cmd_learn(args):
    method = normalize_method(args.model)
    config, signals, truth = datagen.load_dataset(args.data)
    datasets = [precompute_statistics(X) for X in signals]
    options = _solver_options(args)
    outdir = Path(args.out or args.data)
    outdir.mkdir(parents=True, exist_ok=True)

    alpha = args.alpha
    tuned = {}
    if alpha is None and args.target_density is not None:
        result = grid_search_alpha(
            datasets,
            method,
            DEFAULT_ALPHA_GRID,
            target_density=args.target_density,
            hyper=Hyperparameters(alpha=1.0, rho=args.rho),
            options=options,
        )
        alpha = result.value
        tuned["alpha"] = {
            "mode": "target_density",
            "target": args.target_density,
            "value": alpha,
            "achieved_density": result.achieved,
            "trace": result.trace,
        }
    if alpha is None:
        raise InvalidConfig("--alpha (or --target-density) is required")

    hyper = Hyperparameters(
        alpha=alpha, beta=args.beta, gamma=args.gamma, rho=args.rho
    )
    if args.tune_beta is not None and method != "svgl":
        model = PenaltyModel.from_name(method)
        result = tune_beta(
            datasets, model, hyper, target_corr=args.tune_beta, options=options
        )
        hyper = Hyperparameters(
            alpha=alpha, beta=result.value, gamma=args.gamma, rho=args.rho
        )
        tuned["beta"] = {
            "target_correlation": args.tune_beta,
            "value": result.value,
            "achieved_correlation": result.achieved,
            "attained": result.attained,
            "trace": result.trace,
        }

    workers = _thread_count(args)
    start = time.perf_counter()
    if method == "svgl" and workers > 1:
        # independent per-view solves; results keep view order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(
                pool.map(
                    lambda ds: solve_single(
                        ds, hyper.alpha, options=options, rho=hyper.rho, full_output=True
                    ),
                    datasets,
                )
            )
        view_edges = np.stack([ell for ell, _ in pairs], axis=1)
        consensus_edges = None
        reports = [rep for _, rep in pairs]
    else:
        view_edges, consensus_edges, reports = learn_graphs(datasets, method, hyper, options)
    wall = time.perf_counter() - start

    for i in range(view_edges.shape[1]):
        write_edge_list_tsv(outdir / f"learned_view_{i}.tsv", view_edges[:, i], config.n)
    if consensus_edges is not None:
        write_edge_list_tsv(outdir / "learned_consensus.tsv", consensus_edges, config.n)

    report = _report_dict(reports)
    report.update(
        {
            "method": method,
            "n": config.n,
            "n_views": config.n_views,
            "wall_time_sec": wall,
            "hyperparameters": {
                "alpha": hyper.alpha,
                "beta": hyper.beta,
                "gamma": hyper.gamma,
                "rho": hyper.rho,
            },
        }
    )
    if tuned:
        report["tuned"] = tuned
    with open(outdir / "report.json", "w", encoding="ascii") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(
        f"{method}: {report['iterations']} iterations, converged={report['converged']}, "
        f"wall={wall:.2f}s -> {outdir}"
    )
    return EXIT_OK


def _read_learned(directory, n, n_views):
    directory = Path(directory)
    views = []
    for i in range(n_views):
        path = directory / f"learned_view_{i}.tsv"
        if not path.is_file():
            raise InvalidData(f"missing learned view file {path}")
        views.append(read_edge_list_tsv(path, n))
    consensus = None
    consensus_path = directory / "learned_consensus.tsv"
    if consensus_path.is_file():
        consensus = read_edge_list_tsv(consensus_path, n)
    return np.stack(views, axis=1), consensus


def cmd_eval(args):
    config, _, truth = datagen.load_dataset(args.truth)
    if truth is None:
        raise InvalidData(f"no ground-truth edge lists in {args.truth}")
    view_edges, consensus_edges = _read_learned(args.learned, config.n, config.n_views)
    kwargs = {}
    if args.target_density is not None:
        kwargs = {
            "rule": "topk",
            "k": density_to_k(args.target_density, edge_count(config.n)),
        }
    metrics = compute_metrics(
        view_edges,
        truth.views,
        consensus_edges,
        truth.consensus if consensus_edges is not None else None,
        **kwargs,
    )
    payload = json.dumps(metrics.to_dict(), indent=2)
    print(payload)
    out = Path(args.out or (Path(args.learned) / "metrics.json"))
    out.write_text(payload + "\n", encoding="ascii")
    return EXIT_OK


# -- bench --------------------------------------------------------------------


def _bench_point_config(cfg, sweep, value):
    fixed = dict(cfg.get("fixed", {}))
    fixed[sweep] = value
    sim = {
        "n": fixed.get("n", 50),
        "n_views": fixed.get("N", fixed.get("n_views", 3)),
        "p": fixed.get("p", 500),
        "eta": fixed.get("eta", 0.1),
        "graph_model": fixed.get("graph_model", "erdos_renyi"),
        "edge_prob": fixed.get("edge_prob", 0.1),
        "growth": fixed.get("growth", 5),
        "shuffle_fraction": fixed.get("shuffle_fraction", 0.1),
    }
    return sim


def _bench_method_hyper(cfg, method, datasets, truth, options):
    """Resolve (possibly tuned) hyperparameters for one method on one dataset."""
    rho = float(cfg.get("rho", 1.0))
    if "alpha" in cfg:
        alpha = float(cfg["alpha"])
    else:
        grid = cfg.get("alpha_grid", DEFAULT_ALPHA_GRID)
        alpha = grid_search_alpha(
            datasets,
            "svgl",
            grid,
            truth_views=truth.views,
            hyper=Hyperparameters(alpha=1.0, rho=rho),
            options=options,
        ).value
    hyper = Hyperparameters(alpha=alpha, rho=rho)
    if method == "svgl":
        return hyper
    if method == "mvgl_l2":
        if "gamma" in cfg:
            hyper = Hyperparameters(alpha=alpha, gamma=float(cfg["gamma"]), rho=rho)
        else:
            # Tuned after beta below; start mid-grid so the coupling search
            # sees a plausible consensus scale.
            hyper = Hyperparameters(alpha=alpha, gamma=0.1, rho=rho)
    if "beta" in cfg:
        hyper = Hyperparameters(
            alpha=alpha, beta=float(cfg["beta"]), gamma=hyper.gamma, rho=rho
        )
    else:
        target = float(cfg.get("tune_beta", 0.8))
        model = PenaltyModel.from_name(method)
        result = tune_beta(datasets, model, hyper, target_corr=target, options=options)
        hyper = Hyperparameters(
            alpha=alpha, beta=result.value, gamma=hyper.gamma, rho=rho
        )
    if method == "mvgl_l2" and "gamma" not in cfg:
        grid = cfg.get("gamma_grid", DEFAULT_GAMMA_GRID)
        result = grid_search_gamma(datasets, grid, truth.views, hyper, options)
        hyper = Hyperparameters(
            alpha=alpha, beta=hyper.beta, gamma=result.value, rho=rho
        )
    return hyper


def _bench_task(cfg, sweep, value, seed, methods, options):
    """One (sweep point, seed) pipeline; returns {method: (f1v, f1c, wall)}."""
    sim_cfg = _bench_point_config(cfg, sweep, value)
    sim_cfg["seed"] = seed
    config = datagen.SimulationConfig.from_dict(sim_cfg)
    dataset = datagen.simulate(config)
    datasets = [precompute_statistics(X) for X in dataset.signals]
    out = {}
    for method in methods:
        hyper = _bench_method_hyper(cfg, method, datasets, dataset.truth, options)
        start = time.perf_counter()
        view_edges, consensus_edges, _ = learn_graphs(datasets, method, hyper, options)
        wall = time.perf_counter() - start
        metrics = compute_metrics(
            view_edges,
            dataset.truth.views,
            consensus_edges,
            dataset.truth.consensus if consensus_edges is not None else None,
        )
        out[method] = (metrics.f1_view, metrics.f1_consensus, wall)
    return out


def cmd_bench(args):
    cfg = _load_config(args.config, args.set)
    sweep = cfg.get("sweep")
    if sweep not in {"N", "p", "eta", "n"}:
        raise InvalidConfig(f"sweep must be one of N, p, eta, n; got {sweep!r}")
    values = cfg.get("values")
    if not values:
        raise InvalidConfig("sweep 'values' must be a nonempty list")
    methods = [normalize_method(mth) for mth in cfg.get("methods", ["svgl", "mvgl_l1", "mvgl_l2"])]
    n_seeds = int(cfg.get("seeds", 10))
    if n_seeds < 1:
        raise InvalidConfig(f"seeds must be at least 1, got {n_seeds}")
    base_seed = int(cfg.get("base_seed", 0))
    out_path = args.out or cfg.get("out")
    if not out_path:
        raise InvalidConfig("no output path: pass --out or set 'out' in the config")
    options = SolverOptions(
        max_admm_iter=int(cfg.get("max_admm_iter", 2000)),
        eps_abs=float(cfg.get("eps_abs", 1e-5)),
        eps_rel=float(cfg.get("eps_rel", 1e-4)),
    )

    tasks = [(value, seed_idx) for value in values for seed_idx in range(n_seeds)]

    def run_task(task):
        value, seed_idx = task
        try:
            return task, _bench_task(
                cfg, sweep, value, base_seed + seed_idx, methods, options
            ), None
        except Exception as exc:  # collected per point; the sweep continues
            return task, None, f"{type(exc).__name__}: {exc}"

    workers = _thread_count(args)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(run_task, tasks))
    else:
        raw = [run_task(t) for t in tasks]
    results = {task: (res, err) for task, res, err in raw}

    rows = []
    for value in values:
        per_method = {mth: {"f1v": [], "f1c": [], "wall": []} for mth in methods}
        errors = []
        for seed_idx in range(n_seeds):
            res, err = results[(value, seed_idx)]
            if err is not None:
                errors.append(f"seed {base_seed + seed_idx}: {err}")
                continue
            for mth in methods:
                f1v, f1c, wall = res[mth]
                per_method[mth]["f1v"].append(f1v)
                if f1c is not None:
                    per_method[mth]["f1c"].append(f1c)
                per_method[mth]["wall"].append(wall)
        for mth in methods:
            got = per_method[mth]
            if not got["f1v"]:
                rows.append(
                    [sweep, value, mth, 0, "", "", "", "", "", "; ".join(errors) or "failed"]
                )
                continue
            f1v_mean, f1v_ci = mean_ci95(got["f1v"])
            if got["f1c"]:
                f1c_mean, f1c_ci = mean_ci95(got["f1c"])
                f1c_mean, f1c_ci = f"{f1c_mean:.6f}", f"{f1c_ci:.6f}"
            else:
                f1c_mean = f1c_ci = ""
            status = "ok" if not errors else "partial: " + "; ".join(errors)
            rows.append(
                [
                    sweep,
                    value,
                    mth,
                    len(got["f1v"]),
                    f"{f1v_mean:.6f}",
                    f"{f1v_ci:.6f}",
                    f1c_mean,
                    f1c_ci,
                    f"{float(np.mean(got['wall'])):.6g}",
                    status,
                ]
            )

    with open(out_path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "sweep_variable",
                "sweep_value",
                "method",
                "n_seeds",
                "f1_view_mean",
                "f1_view_ci95",
                "f1_consensus_mean",
                "f1_consensus_ci95",
                "wall_time_mean_sec",
                "status",
            ]
        )
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out_path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvglearn",
        description="Multiview graph learning: simulation, solvers, evaluation, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic multiview dataset")
    p_sim.add_argument("--config", required=True, help="JSON simulation config")
    p_sim.add_argument("--out", help="output dataset directory")
    p_sim.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")
    p_sim.set_defaults(func=cmd_simulate)

    p_learn = sub.add_parser("learn", help="learn graphs from a dataset directory")
    p_learn.add_argument("--data", required=True, help="dataset directory")
    p_learn.add_argument("--out", help="output directory (defaults to the dataset dir)")
    p_learn.add_argument("--model", required=True, choices=["l1", "l2", "single"])
    p_learn.add_argument("--alpha", type=float)
    p_learn.add_argument("--beta", type=float, default=0.0)
    p_learn.add_argument("--gamma", type=float, default=0.0)
    p_learn.add_argument("--rho", type=float, default=1.0)
    p_learn.add_argument("--max-iter", type=int, default=2000)
    p_learn.add_argument("--bcd-max-iter", type=int, default=50)
    p_learn.add_argument("--eps-abs", type=float, default=1e-5)
    p_learn.add_argument("--eps-rel", type=float, default=1e-4)
    p_learn.add_argument("--tune-beta", type=float, metavar="TARGET_CORR")
    p_learn.add_argument("--target-density", type=float)
    p_learn.add_argument("--seed", type=int, default=0)
    p_learn.add_argument("--threads", type=int)
    p_learn.set_defaults(func=cmd_learn)

    p_eval = sub.add_parser("eval", help="score learned graphs against ground truth")
    p_eval.add_argument("--learned", required=True, help="directory with learned_*.tsv")
    p_eval.add_argument("--truth", required=True, help="dataset directory with truth files")
    p_eval.add_argument("--out", help="metrics JSON path (default: learned/metrics.json)")
    p_eval.add_argument("--target-density", type=float, help="use top-K binarization")
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("bench", help="run a sweep and emit plot-ready CSV")
    p_bench.add_argument("--config", required=True, help="JSON bench config")
    p_bench.add_argument("--out", help="output CSV path")
    p_bench.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")
    p_bench.add_argument("--threads", type=int)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfig, InvalidHyperparameter) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidData, DimensionMismatch, InvalidMatrix, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FloatingPointError, np.linalg.LinAlgError, EmptyGraph) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
