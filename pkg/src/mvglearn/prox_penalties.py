"""Proximal operators for the consensus penalties.

Two penalty models are supported for the m x N matrix of view-minus-consensus
differences:

* ``FUSED_L1``: entrywise l1 penalty (sum of absolute entries).  The
  consensus regularizer is zero, so its prox is the identity.
* ``GROUP_L21``: sum of per-edge row l2 norms across views, plus an l1
  regularizer on the consensus edge vector itself (prox: soft-thresholding).
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import InvalidConfig, InvalidHyperparameter


class PenaltyModel(enum.Enum):
    """Choice of consensus penalty and consensus regularizer."""

    FUSED_L1 = "l1"
    GROUP_L21 = "l2"

    @classmethod
    def from_name(cls, name):
        """Accept 'l1'/'l2' as well as the enum value names."""
        key = str(name).strip().lower()
        aliases = {
            "l1": cls.FUSED_L1,
            "fused_l1": cls.FUSED_L1,
            "mvgl_l1": cls.FUSED_L1,
            "l2": cls.GROUP_L21,
            "group_l21": cls.GROUP_L21,
            "mvgl_l2": cls.GROUP_L21,
        }
        if key not in aliases:
            raise InvalidConfig(f"unknown penalty model {name!r} (use 'l1' or 'l2')")
        return aliases[key]

    @property
    def uses_consensus_sparsity(self):
        """Whether the gamma-weighted consensus regularizer is active."""
        return self is PenaltyModel.GROUP_L21


def soft_threshold(x, tau):
    """Elementwise soft-thresholding: sign(x) * max(|x| - tau, 0)."""
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def _check_tau(tau):
    if tau < 0:
        raise InvalidHyperparameter(f"prox threshold must be nonnegative, got {tau}")


def prox_cv(A, tau, model):
    """Proximal operator of tau * (consensus penalty) at the matrix A.

    Parameters
    ----------
    A : array_like, shape (m, N)
        Columns are per-view difference vectors.
    tau : float
        Nonnegative prox parameter (penalty weight over ADMM penalty).
    model : PenaltyModel

    Returns
    -------
    np.ndarray, shape (m, N)
        FUSED_L1: elementwise soft-thresholding.  GROUP_L21: each row scaled
        by max(1 - tau/||row||_2, 0), with zero rows mapped to zero.
    """
    _check_tau(tau)
    A = np.asarray(A, dtype=float)
    if model is PenaltyModel.FUSED_L1:
        return soft_threshold(A, tau)
    norms = np.linalg.norm(A, axis=1)
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = np.maximum(1.0 - tau / norms[nz], 0.0)
    return A * scale[:, None]


def prox_rv(v, tau, model):
    """Proximal operator of tau * (consensus regularizer) at the edge vector v.

    FUSED_L1 has no consensus regularizer, so v is returned unchanged;
    GROUP_L21 soft-thresholds elementwise.
    """
    _check_tau(tau)
    v = np.asarray(v, dtype=float)
    if model is PenaltyModel.FUSED_L1:
        return v.copy()
    return soft_threshold(v, tau)


def penalty_value(delta, ell, model):
    """Values of the consensus penalty and consensus regularizer.

    Parameters
    ----------
    delta : array_like, shape (m, N)
        View-minus-consensus difference matrix.
    ell : array_like, shape (m,)
        Consensus edge vector.
    model : PenaltyModel

    Returns
    -------
    (float, float)
        (penalty on delta, regularizer on ell).  FUSED_L1: (sum |delta|, 0).
        GROUP_L21: (sum of row l2 norms, sum |ell|).
    """
    delta = np.asarray(delta, dtype=float)
    ell = np.asarray(ell, dtype=float)
    if model is PenaltyModel.FUSED_L1:
        return float(np.abs(delta).sum()), 0.0
    return float(np.linalg.norm(delta, axis=1).sum()), float(np.abs(ell).sum())
