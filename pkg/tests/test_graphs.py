"""kNN graph construction and Laplacian invariants."""

import numpy as np
import pytest

from locosparse.errors import ConfigError, ContractError
from locosparse.graphs import (GraphLaplacian, bipartite_laplacian,
                               knn_adjacency, laplacian_from_adjacency)

from oracles import connected_components_bfs, jacobi_eigenvalues_classical


def test_knn_known_small_case():
    # four points on a line: 0 -- 1 ---- 2 -- 3, k = 1
    Y = np.array([[0.0, 1.0, 3.0, 4.0]])
    W = knn_adjacency(Y, 1)
    want = np.zeros((4, 4))
    want[0, 1] = want[1, 0] = 1.0  # mutual nearest
    want[2, 3] = want[3, 2] = 1.0
    assert np.array_equal(W, want)


def test_knn_union_symmetrization():
    # point 2 is nearest to 1, but 1's nearest is 0; the union keeps (1, 2)
    Y = np.array([[0.0, 1.0, 2.5]])
    W = knn_adjacency(Y, 1)
    assert W[1, 2] == 1.0 and W[2, 1] == 1.0
    assert W[0, 1] == 1.0 and W[1, 0] == 1.0
    assert W[0, 2] == 0.0


def test_knn_tie_resolves_to_lower_index():
    # points 1 and 2 are equidistant from 0
    Y = np.array([[0.0, 1.0, -1.0, 5.0]])
    W = knn_adjacency(Y, 1)
    assert W[0, 1] == 1.0
    # the tie loser is only connected if someone picked it
    assert W[0, 2] == 1.0  # 2's own nearest is 0


def test_knn_basic_properties():
    rng = np.random.default_rng(8)
    Y = rng.normal(size=(5, 12))
    W = knn_adjacency(Y, 3)
    assert np.array_equal(W, W.T)
    assert np.all(np.diag(W) == 0.0)
    assert set(np.unique(W)) <= {0.0, 1.0}
    assert np.all(W.sum(axis=1) >= 3)  # every vertex keeps its own k picks


def test_knn_rejects_bad_k():
    Y = np.zeros((3, 4))
    with pytest.raises(ConfigError):
        knn_adjacency(Y, 0)
    with pytest.raises(ConfigError):
        knn_adjacency(Y, 4)
    with pytest.raises(ContractError):
        knn_adjacency(np.zeros(4), 1)


def test_laplacian_row_sums_and_psd_on_random_graphs():
    rng = np.random.default_rng(19)
    for _ in range(25):
        b = int(rng.integers(5, 13))
        Y = rng.normal(size=(4, b))
        G = laplacian_from_adjacency(knn_adjacency(Y, min(4, b - 1))).matrix
        assert np.abs(G.sum(axis=1)).max() < 1e-10
        evals = jacobi_eigenvalues_classical(G)
        assert evals[0] > -1e-9


def test_zero_eigenvalue_multiplicity_counts_components():
    rng = np.random.default_rng(21)
    for _ in range(25):
        b = int(rng.integers(6, 13))
        Y = rng.normal(size=(3, b))
        W = knn_adjacency(Y, 2)
        G = laplacian_from_adjacency(W).matrix
        evals = jacobi_eigenvalues_classical(G)
        zero_mult = int((np.abs(evals) < 1e-8).sum())
        components = connected_components_bfs(W)
        assert zero_mult == len(set(components))


def test_laplacian_from_adjacency_validation():
    with pytest.raises(ContractError):
        laplacian_from_adjacency(np.zeros((2, 3)))
    asym = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ContractError):
        laplacian_from_adjacency(asym)
    loop = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ContractError):
        laplacian_from_adjacency(loop)
    negative = np.array([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(ContractError):
        laplacian_from_adjacency(negative)


def test_graph_laplacian_contract_checks():
    W = np.array([[0.0, 2.0], [2.0, 0.0]])
    G = laplacian_from_adjacency(W)
    assert isinstance(G, GraphLaplacian)
    assert G.num_vertices == 2
    assert np.array_equal(G.matrix, np.array([[2.0, -2.0], [-2.0, 2.0]]))
    with pytest.raises(ContractError):
        GraphLaplacian(np.array([[1.0, 0.5], [0.5, 1.0]]))  # rows not zero
    with pytest.raises(ContractError):
        GraphLaplacian(np.array([[1.0, -1.0], [0.0, 0.0]]))  # asymmetric


def test_bipartite_laplacian_structure():
    X = np.array([[0.5, 0.0], [0.5, 1.0]])  # 2 atoms, 2 stimuli
    G = bipartite_laplacian(X)
    M = G.matrix
    assert M.shape == (4, 4)
    # no within-side edges: atom-atom and stimulus-stimulus blocks are
    # diagonal (degrees only)
    assert M[0, 1] == 0.0 and M[2, 3] == 0.0
    assert M[0, 2] == -0.5 and M[1, 3] == -1.0
    assert np.abs(M.sum(axis=1)).max() < 1e-12


def test_bipartite_laplacian_rejects_negative_codes():
    with pytest.raises(ContractError):
        bipartite_laplacian(np.array([[0.5, -0.1], [0.5, 1.1]]))
    with pytest.raises(ContractError):
        bipartite_laplacian(np.zeros(3))
