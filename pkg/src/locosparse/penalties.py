"""Sparsity penalties and their analytic gradients.

Three penalties are supported: plain l1, a weighted-l1 locality charge
that prices activation by the squared stimulus-to-atom distance, and a
graph Laplacian smoothness term coupling the codes of a batch.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError
from .simplex import atom_distances, pairwise_sq_distances

KINDS = ("l1", "wl", "lap")


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty selection: kind in {l1, wl, lap} with weight lam.

    For the lap kind the graph is supplied at application time (training
    rebuilds it per batch), so `laplacian` may stay None here; users of
    the penalty validate its presence and size.
    """

    kind: str
    lam: float
    laplacian: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown penalty kind {self.kind!r}; expected one of {KINDS}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be non-negative, got {self.lam}")
        if self.laplacian is not None:
            G = np.asarray(self.laplacian)
            if G.ndim != 2 or G.shape[0] != G.shape[1]:
                raise ConfigError("laplacian must be a square matrix")


def l1_penalty(X, lam):
    """lam * sum |x_ij|."""
    return float(lam * np.abs(np.asarray(X, dtype=np.float64)).sum())


def wl_penalty(Y, A, X, lam):
    """Locality charge lam * mean_i sum_j x_ji ||y_i - a_j||^2."""
    Y = np.asarray(Y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if (Y.ndim != 2 or A.ndim != 2 or X.ndim != 2 or A.shape[0] != Y.shape[0]
            or X.shape[0] != A.shape[1] or X.shape[1] != Y.shape[1]):
        raise ContractError(f"shape mismatch: Y {Y.shape}, A {A.shape}, X {X.shape}")
    D = pairwise_sq_distances(A, Y)
    return float(lam * (D * X).sum() / Y.shape[1])


def wl_code_gradient(y, A, x, lam):
    """Gradient in x of 1/2 ||y - Ax||^2 + lam * sum_j x_j ||y - a_j||^2.

    Accepts a single column (1-D y and x) or a whole batch (2-D), where
    the batch form stacks the per-column gradients.
    """
    y = np.asarray(y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if y.ndim == 1 and x.ndim == 1:
        if A.ndim != 2 or A.shape[0] != y.size or A.shape[1] != x.size:
            raise ContractError(f"shape mismatch: y {y.shape}, A {A.shape}, x {x.shape}")
        return A.T @ (A @ x - y) + lam * atom_distances(y, A)
    if y.ndim == 2 and x.ndim == 2:
        if (A.ndim != 2 or A.shape[0] != y.shape[0] or A.shape[1] != x.shape[0]
                or x.shape[1] != y.shape[1]):
            raise ContractError(f"shape mismatch: Y {y.shape}, A {A.shape}, X {x.shape}")
        return A.T @ (A @ x - y) + lam * pairwise_sq_distances(A, y)
    raise ContractError("y and x must both be vectors or both be matrices")


def lap_penalty(X, G, lam):
    """lam * tr(X G X^T)."""
    X = np.asarray(X, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if X.ndim != 2 or G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] != X.shape[1]:
        raise ContractError(f"shape mismatch: X {X.shape} vs G {G.shape}")
    return float(lam * ((X @ G) * X).sum())


def lap_code_gradient(A, Y, X, G, lam):
    """Batch gradient A^T (AX - Y) + lam * X (G + G^T)."""
    A = np.asarray(A, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if (A.ndim != 2 or Y.ndim != 2 or X.ndim != 2 or G.ndim != 2
            or A.shape[0] != Y.shape[0] or X.shape[0] != A.shape[1]
            or X.shape[1] != Y.shape[1] or G.shape != (X.shape[1], X.shape[1])):
        raise ContractError(
            f"shape mismatch: A {A.shape}, Y {Y.shape}, X {X.shape}, G {G.shape}")
    return A.T @ (A @ X - Y) + lam * (X @ (G + G.T))


def wl_atom_gradient(Y, A, X, lam):
    """Gradient in A of 1/2 ||Y - AX||_F^2 plus the locality charge.

    Column j of the locality part is sum_i 2 lam x_ji (a_j - y_i), which
    collapses to 2 lam (A diag(X 1) - Y X^T).
    """
    Y = np.asarray(Y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if (Y.ndim != 2 or A.ndim != 2 or X.ndim != 2 or A.shape[0] != Y.shape[0]
            or X.shape[0] != A.shape[1] or X.shape[1] != Y.shape[1]):
        raise ContractError(f"shape mismatch: Y {Y.shape}, A {A.shape}, X {X.shape}")
    fit = (A @ X - Y) @ X.T
    totals = X.sum(axis=1)
    return fit + 2.0 * lam * (A * totals[None, :] - Y @ X.T)
