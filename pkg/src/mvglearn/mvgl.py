"""ADMM engine for joint multiview graph learning with a consensus graph.

Learns N graph Laplacians (one per view of the data) together with a
consensus graph capturing their shared structure.  Each view contributes a
smoothness term plus a Frobenius density term in edge-vector form; views are
coupled to the consensus through a pluggable penalty (see
:mod:`mvglearn.prox_penalties`).  The constraint set fixes each view's trace
(sum of edge entries equal to -n) and keeps all edge vectors nonpositive.

The solver alternates:

1. per-view closed-form quadratic steps on a trace hyperplane,
2. proximal steps for the coupling penalty and the consensus regularizer,
3. a block-coordinate-descent pass for the coupled slack variables
   (projections onto the nonpositive orthant),
4. dual ascent, with scale-aware primal/dual residual stopping.

All per-view computations are vectorized over views: the state stores edge
vectors as the columns of (m, N) arrays.  Everything is deterministic; runs
with identical inputs produce identical iterates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, InvalidData, InvalidHyperparameter
from .graph_core import (
    apply_S_transpose,
    apply_StS_shifted,
    edge_count,
    project_feasible,
    project_hyperplane,
    solve_M,
    uniform_feasible,
    upper,
)
from .prox_penalties import PenaltyModel, penalty_value, prox_cv, prox_rv


@dataclass
class ViewDataset:
    """Per-view observations with their precomputed second-moment statistics.

    Attributes
    ----------
    k : np.ndarray, shape (m,)
        Strict upper triangle of X X^T.
    d : np.ndarray, shape (n,)
        Diagonal of X X^T.
    n : int
        Number of nodes.
    p : int
        Number of observed signals (columns of X).
    X : np.ndarray or None
        The raw n x p signal matrix, kept for smoothness evaluation; the
        solver itself only reads k and d.
    """

    k: np.ndarray
    d: np.ndarray
    n: int
    p: int
    X: np.ndarray | None = None


def precompute_statistics(X):
    """Build a :class:`ViewDataset` from an n x p signal matrix.

    Raises
    ------
    InvalidData
        If X contains NaN or infinite entries or is not 2-D.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidData(f"expected an n x p signal matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidData("signal matrix contains NaN or infinite entries")
    G = X @ X.T
    return ViewDataset(k=upper(G), d=np.diag(G).copy(), n=X.shape[0], p=X.shape[1], X=X)


@dataclass(frozen=True)
class Hyperparameters:
    """Objective weights: density (alpha), coupling (beta), consensus
    sparsity (gamma, GROUP_L21 only) and the ADMM penalty rho."""

    alpha: float
    beta: float = 0.0
    gamma: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidHyperparameter(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0:
            raise InvalidHyperparameter(f"beta must be nonnegative, got {self.beta}")
        if self.gamma < 0:
            raise InvalidHyperparameter(f"gamma must be nonnegative, got {self.gamma}")
        if self.rho <= 0:
            raise InvalidHyperparameter(f"rho must be positive, got {self.rho}")


@dataclass(frozen=True)
class SolverOptions:
    """Iteration and tolerance controls.

    ``deterministic`` asserts schedule-independent execution (fixed-order
    reductions); it is informational since the solver has no random or
    schedule-dependent path.  ``adaptive_rho`` enables residual balancing
    (doubling/halving rho when one residual exceeds 10x the other); it is
    off by default to keep runs exactly reproducible across option sets.
    """

    max_admm_iter: int = 2000
    max_bcd_iter: int = 50
    eps_abs: float = 1e-5
    eps_rel: float = 1e-4
    bcd_tol: float = 1e-8
    deterministic: bool = True
    adaptive_rho: bool = False

    def __post_init__(self):
        for name in ("max_admm_iter", "max_bcd_iter", "eps_abs", "eps_rel", "bcd_tol"):
            if getattr(self, name) <= 0:
                raise InvalidConfig(f"{name} must be positive, got {getattr(self, name)}")


@dataclass
class SolverState:
    """All ADMM primal, slack and dual variables.

    Per-view vectors are columns of (m, N) arrays; consensus-side vectors
    are (m,).  ``ell_views``/``ell`` are the quadratic/prox primal blocks,
    ``z_views``/``z`` the projected slack blocks, ``v_views`` the coupling
    slacks, and ``y_views``/``w_views``/``y`` the multipliers of the three
    constraint groups.
    """

    n: int
    ell_views: np.ndarray
    z_views: np.ndarray
    v_views: np.ndarray
    y_views: np.ndarray
    w_views: np.ndarray
    ell: np.ndarray
    z: np.ndarray
    y: np.ndarray
    rho: float
    iteration: int = 0

    @property
    def m(self):
        return self.z_views.shape[0]

    @property
    def n_views(self):
        return self.z_views.shape[1]


def init_state(n, n_views, rho):
    """Deterministic feasible start: uniform edge vectors, zero slacks/duals."""
    m = edge_count(n)
    uniform = uniform_feasible(n)
    return SolverState(
        n=n,
        ell_views=np.tile(uniform[:, None], (1, n_views)),
        z_views=np.tile(uniform[:, None], (1, n_views)),
        v_views=np.zeros((m, n_views)),
        y_views=np.zeros((m, n_views)),
        w_views=np.zeros((m, n_views)),
        ell=uniform.copy(),
        z=uniform.copy(),
        y=np.zeros(m),
        rho=float(rho),
    )


def step_ell(view, state, dataset, hyper):
    """Closed-form per-view primal step.

    Solves the trace-constrained quadratic subproblem for one view exactly:
    a structured linear solve followed by the hyperplane projection.  The
    projection commutes with the solve because the all-ones vector is an
    eigenvector of the system matrix, so the result satisfies the
    subproblem's KKT conditions.
    """
    rhs = (
        apply_S_transpose(dataset.d)
        - 2.0 * dataset.k
        + state.y_views[:, view]
        + state.rho * state.z_views[:, view]
    )
    return project_hyperplane(solve_M(rhs, hyper.alpha, state.rho, state.n), state.n)


def step_v(state, hyper, model):
    """Proximal step for the coupling slacks, all views at once.

    Applies the penalty prox with parameter beta/rho at the matrix whose
    column i is z_i - z - w_i/rho.
    """
    A = state.z_views - state.z[:, None] - state.w_views / state.rho
    return prox_cv(A, hyper.beta / state.rho, model)


def step_consensus_ell(state, hyper, model):
    """Proximal step for the consensus edge vector (gamma/rho threshold)."""
    return prox_rv(state.z + state.y / state.rho, hyper.gamma / state.rho, model)


def _bcd_z(state, options, track_objective=False):
    """Block coordinate descent for the coupled slack subproblem.

    Alternates exact per-block minimizers (averages clipped to the
    nonpositive orthant): all per-view blocks, then the shared block.  Stops
    when the largest coordinate change drops below ``bcd_tol`` or after
    ``max_bcd_iter`` sweeps.

    Returns (z_views, z, sweeps) and, when ``track_objective``, the
    subproblem objective after each sweep.
    """
    rho = state.rho
    n_views = state.n_views
    a = state.ell_views - state.y_views / rho
    b = state.v_views + state.w_views / rho
    c0 = state.ell - state.y / rho
    base = 0.5 * (a + b)
    z_views = state.z_views
    z = state.z
    trace = []
    sweeps = 0
    for _ in range(options.max_bcd_iter):
        z_views_new = np.minimum(0.0, base + 0.5 * z[:, None])
        z_new = np.minimum(0.0, ((z_views_new - b).sum(axis=1) + c0) / (n_views + 1))
        delta = max(
            np.max(np.abs(z_views_new - z_views)), np.max(np.abs(z_new - z))
        )
        z_views, z = z_views_new, z_new
        sweeps += 1
        if track_objective:
            gap_v = b - z_views + z[:, None]
            trace.append(
                0.5
                * rho
                * (
                    float(((z_views - a) ** 2).sum())
                    + float((gap_v**2).sum())
                    + float(((z - c0) ** 2).sum())
                )
            )
        if delta < options.bcd_tol:
            break
    if track_objective:
        return z_views, z, sweeps, trace
    return z_views, z, sweeps


def step_z_bcd(state, hyper, options):
    """Coupled slack update; returns (z_views, z).

    ``hyper`` is accepted for interface symmetry with the other steps; the
    subproblem depends on it only through rho, which lives in the state.
    """
    del hyper
    z_views, z, _ = _bcd_z(state, options)
    return z_views, z


def dual_updates(state, hyper):
    """Dual ascent on all three constraint groups; mutates and returns state."""
    del hyper
    rho = state.rho
    state.y_views += rho * (state.z_views - state.ell_views)
    state.w_views += rho * (state.v_views - state.z_views + state.z[:, None])
    state.y += rho * (state.z - state.ell)
    return state


def objective(view_edges, consensus_edges, datasets, hyper, model):
    """Joint objective at the given view and consensus edge vectors.

    Sum over views of the smoothness linear term plus alpha times the
    Frobenius quadratic form, plus beta times the coupling penalty and gamma
    times the consensus regularizer.
    """
    view_edges = np.asarray(view_edges, dtype=float)
    if view_edges.ndim == 1:
        view_edges = view_edges[:, None]
    consensus_edges = np.asarray(consensus_edges, dtype=float)
    total = 0.0
    for i, ds in enumerate(datasets):
        li = view_edges[:, i]
        lin = 2.0 * ds.k - apply_S_transpose(ds.d)
        total += float(lin @ li) + hyper.alpha * float(
            li @ apply_StS_shifted(li, ds.n, 1.0, 2.0)
        )
    c_val, r_val = penalty_value(view_edges - consensus_edges[:, None], consensus_edges, model)
    return total + hyper.beta * c_val + hyper.gamma * r_val


@dataclass
class ConvergenceReport:
    """Iteration diagnostics of one solver run."""

    iterations: int = 0
    converged: bool = False
    primal_residuals: list = field(default_factory=list)
    dual_residuals: list = field(default_factory=list)
    objective_history: list = field(default_factory=list)
    bcd_sweeps: list = field(default_factory=list)
    final_rho: float = float("nan")


@dataclass
class MultiviewSolution:
    """Learned edge vectors plus the convergence report.

    ``view_edges`` has one column per view; both it and ``consensus_edges``
    are exactly feasible (views projected onto the trace hyperplane
    intersected with the nonpositive orthant, consensus clipped to the
    nonpositive orthant).
    """

    view_edges: np.ndarray
    consensus_edges: np.ndarray
    report: ConvergenceReport


def _stack_norm(*blocks):
    return math.sqrt(sum(float((b * b).sum()) for b in blocks))


def admm_solve(datasets, hyper, model=PenaltyModel.FUSED_L1, options=None):
    """Jointly learn view graphs and their consensus graph.

    Parameters
    ----------
    datasets : sequence of ViewDataset
        One per view; all must share the node count n.
    hyper : Hyperparameters
    model : PenaltyModel
    options : SolverOptions, optional

    Returns
    -------
    MultiviewSolution
        Feasible view/consensus edge vectors and the convergence report.
        Non-convergence within the iteration cap is not an error: the best
        (last) iterate is returned with ``report.converged`` False.
    """
    if len(datasets) < 1:
        raise DimensionMismatch("need at least one view dataset")
    n = datasets[0].n
    for i, ds in enumerate(datasets):
        if ds.n != n:
            raise DimensionMismatch(
                f"view {i} has n={ds.n}, expected {n} shared across views"
            )
    options = options or SolverOptions()
    n_views = len(datasets)
    m = edge_count(n)
    state = init_state(n, n_views, hyper.rho)

    # Constant linear parts: rhs base of the per-view quadratic step and the
    # smoothness coefficients reused by the objective.
    D = np.stack([ds.d for ds in datasets], axis=1)
    K = np.stack([ds.k for ds in datasets], axis=1)
    rhs_base = apply_S_transpose(D) - 2.0 * K
    lin = -rhs_base  # 2k - S^T d, per view

    report = ConvergenceReport()
    dim_all = m * (2 * n_views + 1)
    converged = False

    for it in range(options.max_admm_iter):
        rho = state.rho
        state.ell_views = project_hyperplane(
            solve_M(rhs_base + state.y_views + rho * state.z_views, hyper.alpha, rho, n), n
        )
        state.v_views = step_v(state, hyper, model)
        state.ell = step_consensus_ell(state, hyper, model)

        z_views_prev = state.z_views
        z_prev = state.z
        state.z_views, state.z, sweeps = _bcd_z(state, options)

        dual_updates(state, hyper)
        state.iteration = it + 1

        dz = state.z_views - z_views_prev
        dzc = state.z - z_prev
        gap_views = state.z_views - state.ell_views
        gap_coupling = state.v_views - state.z_views + state.z[:, None]
        gap_consensus = state.z - state.ell
        r_pri = _stack_norm(gap_views, gap_coupling, gap_consensus)
        s_dual = rho * _stack_norm(dz, dz - dzc[:, None], dzc)

        ax_norm = _stack_norm(state.ell_views, state.v_views, state.ell)
        bz_norm = _stack_norm(state.z_views, state.z_views - state.z[:, None], state.z)
        eps_pri = math.sqrt(dim_all) * options.eps_abs + options.eps_rel * max(ax_norm, bz_norm)
        eps_dual = math.sqrt(dim_all) * options.eps_abs + options.eps_rel * _stack_norm(
            state.y_views, state.w_views, state.y
        )

        quad = apply_StS_shifted(state.ell_views, n, 1.0, 2.0)
        c_val, r_val = penalty_value(
            state.ell_views - state.ell[:, None], state.ell, model
        )
        obj = (
            float((lin * state.ell_views).sum())
            + hyper.alpha * float((state.ell_views * quad).sum())
            + hyper.beta * c_val
            + hyper.gamma * r_val
        )
        if not math.isfinite(obj):
            raise FloatingPointError(f"objective diverged at iteration {it + 1}")

        report.primal_residuals.append(r_pri)
        report.dual_residuals.append(s_dual)
        report.objective_history.append(obj)
        report.bcd_sweeps.append(sweeps)

        if r_pri <= eps_pri and s_dual <= eps_dual:
            converged = True
            break

        if options.adaptive_rho:
            # Residual balancing; unscaled multipliers need no rescaling.
            if r_pri > 10.0 * s_dual:
                state.rho = rho * 2.0
            elif s_dual > 10.0 * r_pri:
                state.rho = rho / 2.0

    report.iterations = state.iteration
    report.converged = converged
    report.final_rho = state.rho
    return MultiviewSolution(
        view_edges=project_feasible(state.ell_views, n),
        consensus_edges=np.minimum(state.ell, 0.0),
        report=report,
    )
