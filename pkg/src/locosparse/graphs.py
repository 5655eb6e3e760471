"""Graph construction and Laplacian assembly."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class GraphLaplacian:
    """Symmetric Laplacian D - W: zero row sums, non-positive off-diagonal."""

    matrix: np.ndarray

    def __post_init__(self):
        G = self.matrix
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ContractError("laplacian must be square")
        if np.abs(G - G.T).max() > 1e-12:
            raise ContractError("laplacian must be symmetric")
        if np.abs(G.sum(axis=1)).max() > 1e-10:
            raise ContractError("laplacian rows must sum to zero")
        off = G - np.diag(np.diag(G))
        if off.max() > 1e-12:
            raise ContractError("laplacian off-diagonal entries must be non-positive")

    @property
    def num_vertices(self):
        return self.matrix.shape[0]


def knn_adjacency(Y, k):
    """Binary union-symmetrized k-nearest-neighbor adjacency over columns.

    Edge (i, j) is set when j is among i's k nearest columns in
    Euclidean distance or i is among j's. Ties resolve toward the lower
    index and the diagonal stays zero.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise ContractError("stimuli must be a d x b matrix")
    b = Y.shape[1]
    if k < 1 or k >= b:
        raise ConfigError(f"k must satisfy 1 <= k < b, got k={k} with b={b}")
    diff = Y[:, :, None] - Y[:, None, :]
    d2 = np.einsum("dij,dij->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    W = np.zeros((b, b))
    rows = np.repeat(np.arange(b), k)
    W[rows, order[:, :k].reshape(-1)] = 1.0
    return np.maximum(W, W.T)


def laplacian_from_adjacency(W):
    """D - W for a symmetric non-negative adjacency with zero diagonal."""
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ContractError("adjacency must be square")
    if np.abs(W - W.T).max() > 1e-12:
        raise ContractError("adjacency must be symmetric")
    if np.any(np.diag(W) != 0.0):
        raise ContractError("adjacency diagonal must be zero")
    if W.min() < 0.0:
        raise ContractError("adjacency weights must be non-negative")
    G = np.diag(W.sum(axis=1)) - W
    return GraphLaplacian(G)


def bipartite_laplacian(X):
    """Laplacian on m + n vertices with atom-to-stimulus weights x_ji.

    Vertices 0 .. m-1 are atoms, m .. m+n-1 are stimuli; there are no
    within-side edges. Simplex codes satisfy the non-negativity
    requirement by construction.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ContractError("codes must be an m x n matrix")
    if X.min() < 0.0:
        raise ContractError("bipartite weights require non-negative codes")
    m, n = X.shape
    W = np.zeros((m + n, m + n))
    W[:m, m:] = X
    W[m:, :m] = X.T
    return laplacian_from_adjacency(W)
