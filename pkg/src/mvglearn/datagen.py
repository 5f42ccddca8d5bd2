"""Synthetic multiview dataset generation.

A random consensus graph is drawn (Erdos-Renyi or Barabasi-Albert), each view
perturbs it by rewiring a fixed fraction of edges, and each view's signals
are produced by filtering white noise with the pseudoinverse of the view
Laplacian, plus additive Gaussian noise of controlled relative energy.

Randomness comes from NumPy's seedable, portable PCG64 generator.  The root
seed is expanded with ``numpy.random.SeedSequence.spawn``: child 0 drives the
consensus graph, child i+1 drives view i (perturbation, signals and noise),
so views are independent given the root seed and can be generated in any
order or in parallel with identical results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, InvalidData
from .graph_core import (
    EdgeIndexMap,
    edge_count,
    laplacian_from_edges,
    read_edge_list_tsv,
    write_edge_list_tsv,
)


@dataclass(frozen=True)
class ErdosRenyi:
    """Each node pair is an edge independently with probability ``edge_prob``."""

    edge_prob: float = 0.1

    def to_dict(self):
        return {"graph_model": "erdos_renyi", "edge_prob": self.edge_prob}


@dataclass(frozen=True)
class BarabasiAlbert:
    """Seed clique of ``growth + 1`` nodes; each new node attaches ``growth``
    edges by degree-proportional preferential attachment."""

    growth: int = 5

    def to_dict(self):
        return {"graph_model": "barabasi_albert", "growth": self.growth}


def graph_model_from_dict(cfg):
    kind = cfg.get("graph_model", "erdos_renyi")
    if kind == "erdos_renyi":
        return ErdosRenyi(edge_prob=float(cfg.get("edge_prob", 0.1)))
    if kind == "barabasi_albert":
        return BarabasiAlbert(growth=int(cfg.get("growth", 5)))
    raise InvalidConfig(f"unknown graph_model {kind!r}")


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one synthetic multiview dataset."""

    n: int
    n_views: int
    p: int
    eta: float = 0.1
    graph_model: ErdosRenyi | BarabasiAlbert = field(default_factory=ErdosRenyi)
    shuffle_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise InvalidConfig(f"n must be at least 3, got {self.n}")
        if self.n_views < 1:
            raise InvalidConfig(f"n_views must be at least 1, got {self.n_views}")
        if self.p < 1:
            raise InvalidConfig(f"p must be at least 1, got {self.p}")
        if self.eta < 0:
            raise InvalidConfig(f"eta must be nonnegative, got {self.eta}")
        if not 0.0 <= self.shuffle_fraction <= 1.0:
            raise InvalidConfig(
                f"shuffle_fraction must be in [0, 1], got {self.shuffle_fraction}"
            )
        if isinstance(self.graph_model, ErdosRenyi):
            if not 0.0 <= self.graph_model.edge_prob <= 1.0:
                raise InvalidConfig(
                    f"edge_prob must be in [0, 1], got {self.graph_model.edge_prob}"
                )
        elif isinstance(self.graph_model, BarabasiAlbert):
            if self.graph_model.growth < 1:
                raise InvalidConfig(
                    f"growth must be at least 1, got {self.graph_model.growth}"
                )

    def to_dict(self):
        out = {
            "n": self.n,
            "n_views": self.n_views,
            "p": self.p,
            "eta": self.eta,
            "shuffle_fraction": self.shuffle_fraction,
            "seed": self.seed,
        }
        out.update(self.graph_model.to_dict())
        return out

    @classmethod
    def from_dict(cls, cfg):
        try:
            return cls(
                n=int(cfg["n"]),
                n_views=int(cfg["n_views"]),
                p=int(cfg["p"]),
                eta=float(cfg.get("eta", 0.1)),
                graph_model=graph_model_from_dict(cfg),
                shuffle_fraction=float(cfg.get("shuffle_fraction", 0.10)),
                seed=int(cfg.get("seed", 0)),
            )
        except KeyError as exc:
            raise InvalidConfig(f"missing config field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"bad config value: {exc}") from exc


@dataclass
class GroundTruth:
    """True consensus and view edge sets (boolean masks over node pairs)."""

    n: int
    consensus: np.ndarray  # (m,) bool
    views: np.ndarray  # (m, N) bool

    def view_laplacian(self, i):
        """Unit-weight Laplacian of view i."""
        return laplacian_from_edges(-self.views[:, i].astype(float), self.n)


def gen_consensus(config, rng=None):
    """Random consensus edge mask under the configured graph model."""
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    n = config.n
    m = edge_count(n)
    model = config.graph_model
    if isinstance(model, ErdosRenyi):
        return rng.random(m) < model.edge_prob
    # Preferential attachment; the repeated-endpoints list makes draws
    # degree-proportional.
    m0 = model.growth + 1
    if n < m0:
        raise InvalidConfig(
            f"Barabasi-Albert needs n >= growth + 1 = {m0} seed nodes, got n={n}"
        )
    index = EdgeIndexMap(n)
    mask = np.zeros(m, dtype=bool)
    repeated = []
    for i in range(m0):
        for j in range(i + 1, m0):
            mask[index.index(i, j)] = True
        repeated.extend([i] * (m0 - 1))
    for v in range(m0, n):
        targets = set()
        while len(targets) < model.growth:
            targets.add(repeated[rng.integers(len(repeated))])
        for t in targets:
            mask[index.index(t, v)] = True
            repeated.append(t)
        repeated.extend([v] * model.growth)
    return mask


def perturb_view(consensus, shuffle_fraction, rng):
    """Rewire a fraction of edges: remove k present, insert k absent pairs.

    k is floor(shuffle_fraction * edge_count); the edge count is preserved
    exactly and both draws are uniform without replacement.
    """
    consensus = np.asarray(consensus, dtype=bool)
    n_edges = int(consensus.sum())
    k = int(np.floor(shuffle_fraction * n_edges))
    out = consensus.copy()
    if k == 0:
        return out
    present = np.flatnonzero(consensus)
    absent = np.flatnonzero(~consensus)
    if len(absent) < k:
        raise InvalidConfig(
            f"cannot rewire {k} edges: only {len(absent)} absent pairs available"
        )
    out[rng.choice(present, size=k, replace=False)] = False
    out[rng.choice(absent, size=k, replace=False)] = True
    return out


def smooth_signals(L, p, rng):
    """Draw p signals that are smooth on the graph with Laplacian L.

    Each column is the Laplacian pseudoinverse applied to a standard normal
    vector.  The pseudoinverse comes from an eigendecomposition: eigenvalues
    above 1e-9 times the largest are inverted, the rest (the nullspace,
    one per connected component) are zeroed.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    eigvals, eigvecs = np.linalg.eigh(L)
    lam_max = float(eigvals[-1])
    inv = np.zeros_like(eigvals)
    if lam_max > 0:
        keep = eigvals > 1e-9 * lam_max
        inv[keep] = 1.0 / eigvals[keep]
    pinv = (eigvecs * inv) @ eigvecs.T
    return pinv @ rng.standard_normal((n, p))


def add_noise(X, eta, rng):
    """Add Gaussian noise with Frobenius norm exactly eta times that of X.

    A zero X is returned unchanged (there is no scale to be relative to).
    """
    if eta < 0:
        raise InvalidConfig(f"eta must be nonnegative, got {eta}")
    X = np.asarray(X, dtype=float)
    norm_x = float(np.linalg.norm(X))
    if eta == 0.0 or norm_x == 0.0:
        return X.copy()
    E = rng.standard_normal(X.shape)
    return X + eta * (norm_x / float(np.linalg.norm(E))) * E


@dataclass
class SimulatedDataset:
    """In-memory result of :func:`simulate`."""

    config: SimulationConfig
    truth: GroundTruth
    signals: list  # N arrays of shape (n, p)


def simulate(config):
    """Generate ground truth and signals for one configuration."""
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.n_views + 1)
    consensus_rng = np.random.default_rng(children[0])
    consensus = gen_consensus(config, consensus_rng)
    views = np.zeros((edge_count(config.n), config.n_views), dtype=bool)
    signals = []
    for i in range(config.n_views):
        view_rng = np.random.default_rng(children[i + 1])
        views[:, i] = perturb_view(consensus, config.shuffle_fraction, view_rng)
        L = laplacian_from_edges(-views[:, i].astype(float), config.n)
        X = smooth_signals(L, config.p, view_rng)
        signals.append(add_noise(X, config.eta, view_rng))
    truth = GroundTruth(n=config.n, consensus=consensus, views=views)
    return SimulatedDataset(config=config, truth=truth, signals=signals)


# -- dataset directory layout -------------------------------------------------
#
#   manifest.json        config echo, file list, seed derivation
#   view_<i>.csv         headerless, n rows of p comma-separated floats
#   truth_consensus.tsv  unit-weight edge list (i, j, weight) of the consensus
#   truth_view_<i>.tsv   unit-weight edge list of view i


def write_dataset(dataset, outdir):
    """Write a simulated dataset directory; returns the manifest dict."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = dataset.config
    files = {
        "views": [f"view_{i}.csv" for i in range(cfg.n_views)],
        "truth_consensus": "truth_consensus.tsv",
        "truth_views": [f"truth_view_{i}.tsv" for i in range(cfg.n_views)],
    }
    for i, X in enumerate(dataset.signals):
        np.savetxt(outdir / files["views"][i], X, delimiter=",", fmt="%.17g")
    write_edge_list_tsv(
        outdir / files["truth_consensus"],
        -dataset.truth.consensus.astype(float),
        cfg.n,
    )
    for i in range(cfg.n_views):
        write_edge_list_tsv(
            outdir / files["truth_views"][i],
            -dataset.truth.views[:, i].astype(float),
            cfg.n,
        )
    manifest = {
        "config": cfg.to_dict(),
        "files": files,
        "seeds": {
            "root": cfg.seed,
            "spawn_consensus": 0,
            "spawn_views": list(range(1, cfg.n_views + 1)),
            "generator": "numpy PCG64 via SeedSequence.spawn",
        },
    }
    with open(outdir / "manifest.json", "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_manifest(directory):
    path = Path(directory) / "manifest.json"
    if not path.is_file():
        raise InvalidData(f"no manifest.json in {directory}")
    with open(path, "r", encoding="ascii") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidData(f"{path}: {exc}") from exc


def load_dataset(directory):
    """Read a dataset directory back into memory.

    Returns (config, signals, truth); truth is None when the truth files are
    absent (e.g. a directory holding only observations).
    """
    directory = Path(directory)
    manifest = load_manifest(directory)
    config = SimulationConfig.from_dict(manifest["config"])
    signals = []
    for name in manifest["files"]["views"]:
        path = directory / name
        if not path.is_file():
            raise InvalidData(f"missing view file {path}")
        X = np.loadtxt(path, delimiter=",", ndmin=2)
        if X.shape != (config.n, config.p):
            raise InvalidData(
                f"{path}: expected shape {(config.n, config.p)}, got {X.shape}"
            )
        signals.append(X)
    truth = None
    consensus_path = directory / manifest["files"]["truth_consensus"]
    if consensus_path.is_file():
        consensus = read_edge_list_tsv(consensus_path, config.n) < 0
        views = np.zeros((edge_count(config.n), config.n_views), dtype=bool)
        for i, name in enumerate(manifest["files"]["truth_views"]):
            views[:, i] = read_edge_list_tsv(directory / name, config.n) < 0
        truth = GroundTruth(n=config.n, consensus=consensus, views=views)
    return config, signals, truth
