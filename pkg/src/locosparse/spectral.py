"""Jacobi eigendecomposition and spectral clustering."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError, NumericalError, ValidationError
from .graphs import GraphLaplacian
from .rng import CounterRng, derive_seed

_DEFAULT_CAP = 2048
_MAX_SWEEPS = 100
_RESTARTS = 20
_MAX_LLOYD_ITERS = 100


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValidationError("cluster labels out of range")
        sizes = np.bincount(labels, minlength=self.k)
        if np.any(sizes == 0):
            raise ValidationError("every cluster must be non-empty")


def symmetric_eigendecomposition(M, size_cap=_DEFAULT_CAP):
    """Full eigensystem of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (eigenvalues ascending, eigenvectors as matching columns).
    Sweeps stop once the off-diagonal Frobenius norm falls below
    1e-12 times the Frobenius norm of the input.
    """
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError("matrix must be square")
    p = A.shape[0]
    if p > size_cap:
        raise ContractError(f"matrix order {p} exceeds the cap {size_cap}")
    if np.abs(A - A.T).max() > 1e-10:
        raise ContractError("matrix must be symmetric")
    A = (A + A.T) / 2.0
    V = np.eye(p)
    total = float(np.linalg.norm(A))
    if p == 1 or total == 0.0:
        return np.diag(A).copy(), V
    target = 1e-12 * total

    def off_norm(A):
        # measured from the off-diagonal entries themselves; subtracting
        # the diagonal energy from the total cancels catastrophically
        # once the matrix is nearly diagonal
        off = A - np.diag(np.diag(A))
        return math.sqrt(float((off * off).sum()))

    converged = False
    for _ in range(_MAX_SWEEPS):
        if off_norm(A) < target:
            converged = True
            break
        for i in range(p - 1):
            for q in range(i + 1, p):
                apq = A[i, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[i, i]) / (2.0 * apq)
                if abs(theta) > 1.0e150:
                    # theta**2 would overflow; the rotation angle is
                    # 1/(2*theta) to first order
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_i, row_q = A[i, :].copy(), A[q, :].copy()
                A[i, :] = c * row_i - s * row_q
                A[q, :] = s * row_i + c * row_q
                col_i, col_q = A[:, i].copy(), A[:, q].copy()
                A[:, i] = c * col_i - s * col_q
                A[:, q] = s * col_i + c * col_q
                A[i, q] = A[q, i] = 0.0
                vi, vq = V[:, i].copy(), V[:, q].copy()
                V[:, i] = c * vi - s * vq
                V[:, q] = s * vi + c * vq
    if not converged and off_norm(A) >= target:
        raise NumericalError(
            f"Jacobi sweeps did not converge within {_MAX_SWEEPS} passes")
    values = np.diag(A).copy()
    order = np.argsort(values, kind="stable")
    return values[order], V[:, order]


def _kmeans(points, k, seed):
    """Best-of-20 seeded Lloyd runs with farthest-point initialization."""
    p = points.shape[0]
    best_inertia, best_labels = np.inf, None
    for restart in range(_RESTARTS):
        rng = CounterRng(derive_seed(seed, "kmeans", restart))
        centers = np.empty((k, points.shape[1]))
        centers[0] = points[int(rng.integers(1, p)[0])]
        d2 = ((points - centers[0]) ** 2).sum(axis=1)
        for c in range(1, k):
            centers[c] = points[int(np.argmax(d2))]
            d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
        labels = None
        for _ in range(_MAX_LLOYD_ITERS):
            dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            assigned = dist.argmin(axis=1)
            for c in range(k):
                members = assigned == c
                if members.any():
                    centers[c] = points[members].mean(axis=0)
                else:
                    # revive an empty cluster at the worst-served point
                    worst = int(np.argmax(dist[np.arange(p), assigned]))
                    centers[c] = points[worst]
                    assigned[worst] = c
            if labels is not None and np.array_equal(labels, assigned):
                break
            labels = assigned
        inertia = float(((points - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels
    return best_labels


def spectral_cluster(G, k, seed=0):
    """Cluster vertices by k-means on the bottom-k eigenvector embedding."""
    if not isinstance(G, GraphLaplacian):
        G = GraphLaplacian(np.asarray(G, dtype=np.float64))
    p = G.num_vertices
    if k < 1 or k > p:
        raise ConfigError(f"cluster count must satisfy 1 <= k <= {p}, got {k}")
    if k == 1:
        return ClusterAssignment(np.zeros(p, dtype=np.int64), 1)
    _, vectors = symmetric_eigendecomposition(G.matrix)
    labels = _kmeans(vectors[:, :k], k, seed)
    return ClusterAssignment(np.asarray(labels, dtype=np.int64), k)
