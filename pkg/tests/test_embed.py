import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hypergraphs, random_hypergraph
from ercoarsen import (BipartiteGraph, build_hypergraph, build_krylov_basis, embed_nodes,
                       random_mean_free_vector, select_and_orthogonalize, star_expand,
                       truncate_to_nodes)
from ercoarsen.embed import DegenerateKrylovError, selection_indices


def k2_graph():
    A = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    return BipartiteGraph(1, 1, A, np.ones(2), A.copy())


def pre_truncation(H, rho, k, seed=0, strategy="evenly-spaced"):
    G = star_expand(H)
    x = random_mean_free_vector(G.num_vertices, seed)
    return select_and_orthogonalize(build_krylov_basis(G, x, rho), k, strategy=strategy)


# start vector

@pytest.mark.parametrize("seed", [0, 1, 99])
def test_start_vector_mean_free(seed):
    assert abs(random_mean_free_vector(4, seed).sum()) < 1e-13


def test_start_vector_deterministic():
    a = random_mean_free_vector(50, 7)
    assert np.array_equal(a, random_mean_free_vector(50, 7))
    assert not np.array_equal(a, random_mean_free_vector(50, 8))


def test_start_vector_two_entries():
    a, b = random_mean_free_vector(2, 3)
    assert a == -b and a != 0


def test_start_vector_too_short():
    with pytest.raises(ValueError):
        random_mean_free_vector(1, 0)


# Krylov powers

def test_k2_powers_alternate():
    x = np.array([1.0, -1.0]) / np.sqrt(2)
    out = build_krylov_basis(k2_graph(), x, 2)
    assert len(out) == 3
    np.testing.assert_allclose(out[1], -x)
    np.testing.assert_allclose(out[2], x)


def test_rho_one_gives_two_vectors():
    G = star_expand(build_hypergraph([[0, 1], [1, 2]], num_nodes=3))
    x = random_mean_free_vector(5, 0)
    out = build_krylov_basis(G, x, 1)
    assert len(out) == 2
    np.testing.assert_array_equal(out[0], x)


def test_zero_start_rejected():
    with pytest.raises(ValueError):
        build_krylov_basis(k2_graph(), np.zeros(2), 2)


def test_powers_match_dense_oracle():
    G = star_expand(build_hypergraph([[0, 1], [1, 2]], num_nodes=3))
    # dense D^{-1/2} A D^{-1/2} written out by hand for the 5-vertex expansion
    A = np.zeros((5, 5))
    for p, s in [(0, 3), (1, 3), (1, 4), (2, 4)]:
        A[p, s] = A[s, p] = 0.5
    d = A.sum(axis=1)
    N = A / np.sqrt(np.outer(d, d))
    x = np.array([0.3, -0.1, 0.2, -0.25, -0.15])
    out = build_krylov_basis(G, x, 6)
    for j, v in enumerate(out):
        np.testing.assert_allclose(v, np.linalg.matrix_power(N, j) @ x, atol=1e-14)


def test_kept_powers_equal_full_sequence():
    G = star_expand(random_hypergraph(np.random.default_rng(2)))
    x = random_mean_free_vector(G.num_vertices, 0)
    full = build_krylov_basis(G, x, 20)
    kept = build_krylov_basis(G, x, 20, keep=[0, 5, 20])
    assert sorted(kept) == [0, 5, 20]
    for j in kept:
        np.testing.assert_array_equal(kept[j], full[j])


# selection and orthogonalization

@pytest.mark.parametrize("strategy, expected", [
    ("evenly-spaced", [0, 4, 8, 12, 16]),
    ("first-k", [0, 1, 2, 3, 4]),
    ("last-k", [0, 13, 14, 15, 16]),
])
def test_selection_indices(strategy, expected):
    assert selection_indices(16, 4, strategy) == expected


def test_selection_default_parameters():
    assert selection_indices(200, 10) == [0, 20, 40, 60, 80, 100, 120, 140, 160, 180, 200]


def test_k2_span_is_rank_one():
    x = np.array([1.0, -1.0]) / np.sqrt(2)
    out = select_and_orthogonalize([x, -x, x], 2)
    assert len(out) == 1
    assert abs(abs(out[0] @ x) - 1) < 1e-14


def test_all_zero_is_degenerate():
    with pytest.raises(DegenerateKrylovError, match="degenerate"):
        select_and_orthogonalize([np.zeros(3)] * 3, 2)


def test_start_direction_discarded():
    e = np.eye(4)
    out = select_and_orthogonalize([e[0], e[1], e[2]], 2)
    assert len(out) == 2
    np.testing.assert_allclose(np.abs(np.array(out)), e[1:3], atol=1e-15)


def test_matches_qr_oracle():
    rng = np.random.default_rng(5)
    H = random_hypergraph(rng, n=12, m=8, max_size=4)
    G = star_expand(H)
    assert G.num_vertices == 20
    x = random_mean_free_vector(20, 0)
    powers = build_krylov_basis(G, x, 16)
    ours = np.array(select_and_orthogonalize(powers, 4)).T
    cols = np.column_stack([powers[j] for j in selection_indices(16, 4)])
    Q, _ = np.linalg.qr(cols)
    angles = sla.subspace_angles(ours, Q[:, 1:5])
    assert ours.shape == (20, 4)
    assert np.max(angles) < 1e-8


@given(hypergraphs(), st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_orthonormal_before_truncation(H, seed):
    vecs = np.array(pre_truncation(H, 200, 10, seed))
    gram = vecs @ vecs.T
    assert np.max(np.abs(gram - np.eye(len(vecs)))) < 1e-10


# truncation

def test_truncation_restricts():
    basis = truncate_to_nodes([np.array([1.0, 2, 3, 9, 9])], 3)
    np.testing.assert_array_equal(basis.vectors, [[1, 2, 3]])


def test_star_only_vector_dropped():
    basis = truncate_to_nodes([np.array([0.0, 0, 0, 1, 2]), np.array([1.0, 0, 2, 5, 5])], 3)
    assert basis.k == 1


def test_all_vanish_is_error():
    with pytest.raises(DegenerateKrylovError):
        truncate_to_nodes([np.array([0.0, 0, 0, 1])], 3)


def test_truncation_scale():
    basis = truncate_to_nodes([np.array([1.0, 2, 6, 7])], 3, scale=np.array([2.0, 1, 0.5]))
    np.testing.assert_array_equal(basis.vectors, [[2, 2, 3]])


def test_constant_after_scaling_dropped():
    with pytest.raises(DegenerateKrylovError):
        truncate_to_nodes([np.array([1.0, 2, 4, 7])], 3, scale=np.array([2.0, 1, 0.5]))


# full pipeline

def test_embedding_deterministic():
    H = random_hypergraph(np.random.default_rng(11), n=40, m=60)
    a = embed_nodes(H, seed=3)
    b = embed_nodes(H, seed=3)
    assert a.vectors.tobytes() == b.vectors.tobytes()
    assert (a.rho, a.seed) == (200, 3)


@given(hypergraphs())
@settings(max_examples=30, deadline=None)
def test_embedding_vectors_nonconstant(H):
    basis = embed_nodes(H, rho=50, k=5)
    assert 1 <= basis.k <= 5
    assert basis.vectors.shape[1] == H.num_nodes
    assert np.all(np.ptp(basis.vectors, axis=1) > 0)


def test_unknown_scaling():
    with pytest.raises(ValueError):
        embed_nodes(build_hypergraph([[0, 1]], num_nodes=2), node_scaling="bogus")
