"""Single-view baseline: learn one graph from smooth signals.

Minimizes the smoothness linear term plus alpha times the Frobenius
quadratic form over edge vectors with fixed trace and nonpositive entries.
This is the consensus-free reduction of the multiview problem and reuses the
same building blocks: the closed-form trace-constrained quadratic step and
the nonpositive-orthant projection, glued by a two-block ADMM loop.
"""

from __future__ import annotations

import math

import numpy as np

from .graph_core import (
    apply_S_transpose,
    apply_StS_shifted,
    edge_count,
    project_feasible,
    project_hyperplane,
    solve_M,
    uniform_feasible,
)
from .mvgl import ConvergenceReport, SolverOptions


def solve_single(dataset, alpha, options=None, rho=1.0, full_output=False):
    """Learn a single graph from one view's statistics.

    Parameters
    ----------
    dataset : ViewDataset
    alpha : float
        Density weight; larger values yield denser graphs.
    options : SolverOptions, optional
    rho : float
        ADMM penalty parameter.
    full_output : bool
        When True, also return the :class:`ConvergenceReport`.

    Returns
    -------
    np.ndarray, shape (m,)
        Feasible edge vector (nonpositive, entries summing to -n), or the
        tuple ``(edge_vector, report)`` with ``full_output=True``.
    """
    options = options or SolverOptions()
    n = dataset.n
    m = edge_count(n)
    rhs_base = apply_S_transpose(dataset.d) - 2.0 * dataset.k
    lin = -rhs_base

    ell = uniform_feasible(n)
    z = ell.copy()
    y = np.zeros(m)
    report = ConvergenceReport(final_rho=rho)
    converged = False

    for it in range(options.max_admm_iter):
        ell = project_hyperplane(solve_M(rhs_base + y + rho * z, alpha, rho, n), n)
        z_prev = z
        z = np.minimum(0.0, ell - y / rho)
        y = y + rho * (z - ell)

        r_pri = float(np.linalg.norm(z - ell))
        s_dual = rho * float(np.linalg.norm(z - z_prev))
        eps_pri = math.sqrt(m) * options.eps_abs + options.eps_rel * max(
            float(np.linalg.norm(ell)), float(np.linalg.norm(z))
        )
        eps_dual = math.sqrt(m) * options.eps_abs + options.eps_rel * float(
            np.linalg.norm(y)
        )

        obj = float(lin @ ell) + alpha * float(ell @ apply_StS_shifted(ell, n, 1.0, 2.0))
        report.primal_residuals.append(r_pri)
        report.dual_residuals.append(s_dual)
        report.objective_history.append(obj)
        report.iterations = it + 1

        if r_pri <= eps_pri and s_dual <= eps_dual:
            converged = True
            break

    report.converged = converged
    result = project_feasible(ell, n)
    if full_output:
        return result, report
    return result
