"""Edge-vector algebra for combinatorial graph Laplacians.

A symmetric n x n matrix with zero row sums is fully described by its strict
upper triangle, flattened row-major into an "edge vector" of length
m = n(n-1)/2.  Entries of an edge vector are Laplacian off-diagonals, so a
valid graph has nonpositive entries and edge weights equal to their negation.

All operators in this module are matrix-free: the node-edge incidence
structure is used directly, so each application costs O(m) time and memory.
The dense row-sum operator (n x m, entry 1 iff the edge is incident to the
node) is never materialized.

Functions accept either a single edge vector of shape (m,) or a stack of
them as the columns of an (m, N) array; node-indexed vectors are (n,) or
(n, N) accordingly.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import InvalidData, InvalidHyperparameter, InvalidMatrix

# Absolute tolerance for accepting an input matrix as symmetric.  Rejects
# corrupt data without false positives from text-format round-trips.
SYMMETRY_TOL = 1e-9


def edge_count(n):
    """Number of node pairs (strict upper triangle entries) for n nodes."""
    return n * (n - 1) // 2


def node_count(m):
    """Inverse of :func:`edge_count`; raises if m is not a triangular number."""
    n = int(round((1.0 + np.sqrt(1.0 + 8.0 * m)) / 2.0))
    if edge_count(n) != m:
        raise InvalidMatrix(f"edge vector length {m} is not n(n-1)/2 for any integer n")
    return n


@functools.lru_cache(maxsize=128)
def _edge_endpoints(n):
    """Per-edge endpoint indices (i, j) with i < j, row-major order; cached."""
    rows, cols = np.triu_indices(n, k=1)
    rows = np.ascontiguousarray(rows)
    cols = np.ascontiguousarray(cols)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def _infer_n(ell, n):
    if n is None:
        return node_count(ell.shape[0])
    if ell.shape[0] != edge_count(n):
        raise InvalidMatrix(
            f"edge vector has length {ell.shape[0]}, expected {edge_count(n)} for n={n}"
        )
    return n


class EdgeIndexMap:
    """Bijection between node pairs (i, j), 0 <= i < j < n, and flat edge indices.

    Flat index of (i, j) is i*n - i(i+1)/2 + (j - i - 1), i.e. row-major
    order over the strict upper triangle.
    """

    def __init__(self, n):
        if n < 1:
            raise InvalidMatrix(f"need at least one node, got n={n}")
        self.n = int(n)
        self.m = edge_count(self.n)
        self.rows, self.cols = _edge_endpoints(self.n)

    def index(self, i, j):
        """Flat edge index of the pair (i, j); order of i, j does not matter."""
        if i == j:
            raise ValueError(f"self-loop ({i}, {j}) has no edge index")
        if i > j:
            i, j = j, i
        if i < 0 or j >= self.n:
            raise ValueError(f"pair ({i}, {j}) out of range for n={self.n}")
        return i * self.n - i * (i + 1) // 2 + (j - i - 1)

    def pair(self, e):
        """Node pair (i, j), i < j, of flat edge index e."""
        if e < 0 or e >= self.m:
            raise ValueError(f"edge index {e} out of range for m={self.m}")
        return int(self.rows[e]), int(self.cols[e])


def upper(M, tol=SYMMETRY_TOL):
    """Strict upper triangle of a symmetric matrix as a row-major vector.

    Parameters
    ----------
    M : array_like, shape (n, n)
        Symmetric matrix.
    tol : float
        Absolute tolerance for the symmetry check.

    Returns
    -------
    np.ndarray, shape (n(n-1)/2,)
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] > 0 and np.max(np.abs(M - M.T)) > tol:
        raise InvalidMatrix(f"matrix is not symmetric within {tol:g}")
    rows, cols = _edge_endpoints(M.shape[0])
    return M[rows, cols].copy()


def laplacian_from_edges(ell, n=None):
    """Symmetric Laplacian with the given off-diagonal entries.

    The diagonal is set to minus the row sums of the off-diagonal part, so
    the result has exactly zero row sums.  Feasibility (nonpositive entries)
    is not required; this is also used on infeasible mid-iteration vectors.

    Parameters
    ----------
    ell : array_like, shape (m,)
        Off-diagonal entries (row-major strict upper triangle).
    n : int, optional
        Node count; inferred from len(ell) when omitted.

    Returns
    -------
    np.ndarray, shape (n, n)
    """
    ell = np.asarray(ell, dtype=float)
    n = _infer_n(ell, n)
    rows, cols = _edge_endpoints(n)
    L = np.zeros((n, n))
    L[rows, cols] = ell
    L += L.T
    np.fill_diagonal(L, -L.sum(axis=1))
    return L


def apply_S(ell, n=None):
    """Row sums of the symmetric zero-diagonal matrix described by an edge vector.

    Entry a of the result sums the edge-vector entries of all pairs incident
    to node a.  For a Laplacian edge vector this is minus the degree vector.

    Parameters
    ----------
    ell : array_like, shape (m,) or (m, N)
    n : int, optional

    Returns
    -------
    np.ndarray, shape (n,) or (n, N)
    """
    ell = np.asarray(ell, dtype=float)
    n = _infer_n(ell, n)
    rows, cols = _edge_endpoints(n)
    if ell.ndim == 1:
        return np.bincount(rows, weights=ell, minlength=n) + np.bincount(
            cols, weights=ell, minlength=n
        )
    out = np.empty((n, ell.shape[1]))
    for c in range(ell.shape[1]):
        col = np.ascontiguousarray(ell[:, c])
        out[:, c] = np.bincount(rows, weights=col, minlength=n) + np.bincount(
            cols, weights=col, minlength=n
        )
    return out


def apply_S_transpose(x):
    """Adjoint of :func:`apply_S`: edge entry (i, j) equals x_i + x_j.

    Parameters
    ----------
    x : array_like, shape (n,) or (n, N)

    Returns
    -------
    np.ndarray, shape (m,) or (m, N)
    """
    x = np.asarray(x, dtype=float)
    rows, cols = _edge_endpoints(x.shape[0])
    return x[rows] + x[cols]


def apply_StS_shifted(ell, n=None, a=1.0, c=0.0):
    """Apply the shifted quadratic-form operator a*(S^T S) + c*I to an edge vector.

    S is the incidence row-sum operator realized by :func:`apply_S`.  The
    all-ones edge vector is an eigenvector of S^T S with eigenvalue 2(n-1).
    """
    ell = np.asarray(ell, dtype=float)
    n = _infer_n(ell, n)
    return a * apply_S_transpose(apply_S(ell, n)) + c * ell


def solve_M(rhs, alpha, rho, n=None):
    """Solve (2*alpha*S^T S + (4*alpha + rho)*I) x = rhs in O(m).

    Uses the identity S S^T = (n-2)*I + ones*ones^T together with the
    Woodbury/Sherman-Morrison formulas, so only incidence applications are
    needed:

        x = (rhs - 2*alpha*S^T u) / c,
        u = (S rhs - (2*alpha/(g0 + 2*alpha*n)) * sum(S rhs)) / g0,

    with c = 4*alpha + rho and g0 = c + 2*alpha*(n-2).

    Parameters
    ----------
    rhs : array_like, shape (m,) or (m, N)
    alpha, rho : float
        Must be positive.
    n : int, optional

    Returns
    -------
    np.ndarray, same shape as rhs.
    """
    if alpha <= 0:
        raise InvalidHyperparameter(f"alpha must be positive, got {alpha}")
    if rho <= 0:
        raise InvalidHyperparameter(f"rho must be positive, got {rho}")
    rhs = np.asarray(rhs, dtype=float)
    n = _infer_n(rhs, n)
    c = 4.0 * alpha + rho
    g0 = c + 2.0 * alpha * (n - 2)
    sv = apply_S(rhs, n)
    u = (sv - (2.0 * alpha / (g0 + 2.0 * alpha * n)) * sv.sum(axis=0)) / g0
    return (rhs - 2.0 * alpha * apply_S_transpose(u)) / c


def project_hyperplane(ell, n=None):
    """Euclidean projection onto the hyperplane {x : sum(x) = -n}.

    Shifts every entry by the same amount: x - (sum(x) + n)/m.
    """
    ell = np.asarray(ell, dtype=float)
    n = _infer_n(ell, n)
    m = ell.shape[0]
    return ell - (ell.sum(axis=0) + n) / m


def _project_scaled_simplex(u, total):
    """Projection of u onto {y : y >= 0, sum(y) = total} (water-filling)."""
    srt = np.sort(u)[::-1]
    css = np.cumsum(srt) - total
    idx = np.arange(1, u.shape[0] + 1)
    k = idx[srt - css / idx > 0][-1]
    tau = css[k - 1] / k
    return np.maximum(u - tau, 0.0)


def project_feasible(ell, n=None):
    """Euclidean projection onto {x : x <= 0, sum(x) = -n}.

    Used to extract exactly feasible edge vectors from converged iterates;
    equivalent to a scaled-simplex projection of -x with radius n.
    """
    ell = np.asarray(ell, dtype=float)
    n = _infer_n(ell, n)
    if ell.ndim == 1:
        return -_project_scaled_simplex(-ell, float(n))
    out = np.empty_like(ell)
    for c in range(ell.shape[1]):
        out[:, c] = -_project_scaled_simplex(-ell[:, c], float(n))
    return out


def uniform_feasible(n):
    """The uniform point of {x <= 0, sum(x) = -n}: every entry -n/m."""
    m = edge_count(n)
    return np.full(m, -float(n) / m)


def is_valid_laplacian(L, tol=1e-9):
    """True when L is symmetric with nonpositive off-diagonals and zero row sums."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        return False
    if np.max(np.abs(L - L.T)) > tol:
        return False
    off = L - np.diag(np.diag(L))
    if off.max() > tol:
        return False
    return np.max(np.abs(L.sum(axis=1))) <= tol


def write_edge_list_tsv(path, ell, n=None):
    """Write an edge vector as a headerless TSV edge list.

    One line per nonzero edge: ``i<TAB>j<TAB>weight`` with 0-indexed i < j
    and weight equal to minus the edge-vector entry (nonnegative adjacency
    weight for feasible vectors).
    """
    ell = np.asarray(ell, dtype=float)
    n = _infer_n(ell, n)
    rows, cols = _edge_endpoints(n)
    with open(path, "w", encoding="ascii") as fh:
        for e in np.flatnonzero(ell):
            fh.write(f"{rows[e]}\t{cols[e]}\t{-ell[e]:.17g}\n")


def read_edge_list_tsv(path, n):
    """Read a TSV edge list written by :func:`write_edge_list_tsv`.

    Returns the edge vector (entries are minus the listed weights); absent
    pairs are zero.
    """
    index = EdgeIndexMap(n)
    ell = np.zeros(index.m)
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InvalidData(f"{path}:{lineno}: expected 'i<TAB>j<TAB>weight'")
            try:
                i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise InvalidData(f"{path}:{lineno}: {exc}") from exc
            if not 0 <= i < j < n:
                raise InvalidData(f"{path}:{lineno}: pair ({i}, {j}) invalid for n={n}")
            ell[index.index(i, j)] = -w
    return ell
