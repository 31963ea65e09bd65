from itertools import permutations
from math import comb

import numpy as np
import pytest

from ellqg.tensorspace import (
    GradedOperator,
    antisym_basis,
    basis_weight,
    complement_basis,
    embed_operator,
    embed_shifted,
    multi_indices,
    numeric_rank,
    perm_sign,
    permutation_operator,
    projector_antisym,
    projector_sym,
    same_column_space,
    shift_lambda,
    sym_basis,
    transposition,
    vector_weights,
    weight_table,
)


def test_basis_weight_counts():
    assert list(basis_weight((0, 0), 2)) == [2, 0]
    assert list(basis_weight((1, 2, 0), 3)) == [1, 1, 1]
    assert list(basis_weight((), 2)) == [0, 0]
    with pytest.raises(ValueError):
        basis_weight((2,), 2)


def test_weight_table_matches_basis_weight():
    tab = multi_indices(3, 2)
    wt = weight_table(3, 2)
    for row, w in zip(tab, wt):
        assert list(basis_weight(row, 2)) == list(w)


def test_shift_lambda():
    lam = np.array([1.0 + 1j, 2.0])
    assert np.allclose(shift_lambda(lam, (0, 0), 0.5), lam)
    out = shift_lambda(lam, (1, 0), 0.25j)
    assert np.allclose(out, [1.0 + 0.75j, 2.0])
    # shifting twice equals shifting by the sum
    a = shift_lambda(shift_lambda(lam, (1, 0), 0.3), (0, 2), 0.3)
    b = shift_lambda(lam, (1, 2), 0.3)
    assert np.allclose(a, b)
    with pytest.raises(ValueError):
        shift_lambda(lam, (1, 0, 0), 1.0)


def test_permutation_identity_and_flip():
    assert np.allclose(permutation_operator((0, 1, 2), 2).mat, np.eye(8))
    flip = permutation_operator((1, 0), 2).mat
    e01 = np.zeros(4)
    e01[0 * 2 + 1] = 1.0
    assert np.allclose(flip @ e01, np.eye(4)[1 * 2 + 0])


def test_permutation_composition_all_s3():
    for sig in permutations(range(3)):
        for rho in permutations(range(3)):
            comp = tuple(sig[rho[k]] for k in range(3))
            lhs = permutation_operator(comp, 2).mat
            rhs = permutation_operator(sig, 2).mat @ permutation_operator(rho, 2).mat
            assert np.allclose(lhs, rhs)


def test_permutation_validation():
    with pytest.raises(ValueError):
        permutation_operator((0, 0, 1), 2)


def test_perm_sign():
    assert perm_sign((0, 1, 2)) == 1
    assert perm_sign((1, 0, 2)) == -1
    assert perm_sign((1, 2, 0)) == 1


@pytest.mark.parametrize("n,N", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_projector_ranks(n, N):
    ps = projector_sym(n, N)
    pa = projector_antisym(n, N)
    assert numeric_rank(ps) == comb(N + n - 1, n)
    assert numeric_rank(pa) == comb(N, n)
    # idempotent and mutually orthogonal
    assert np.linalg.norm(ps.mat @ ps.mat - ps.mat) < 1e-12 * ps.mat.shape[0]
    assert np.linalg.norm(pa.mat @ pa.mat - pa.mat) < 1e-12 * pa.mat.shape[0]
    assert np.abs(ps.mat @ pa.mat).max() < 1e-12


def test_projectors_commute_with_permutations():
    n, N = 3, 2
    ps, pa = projector_sym(n, N), projector_antisym(n, N)
    for images in permutations(range(n)):
        pop = permutation_operator(images, N).mat
        assert np.abs(pop @ ps.mat - ps.mat @ pop).max() < 1e-12
        assert np.abs(pop @ pa.mat - pa.mat @ pop).max() < 1e-12


def test_numeric_rank_basics():
    assert numeric_rank(np.eye(4)) == 4
    assert numeric_rank(np.zeros((3, 3))) == 0


def test_same_column_space_invariance():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 3)) @ rng.normal(size=(3, 6))
    g = rng.normal(size=(6, 6)) + np.eye(6) * 3
    assert same_column_space(a, a @ g)
    b = rng.normal(size=(6, 6))
    assert not same_column_space(a, b)


def test_sym_basis_orthonormal_and_spanning():
    for n, N in [(2, 2), (3, 2), (2, 3)]:
        b, wts = sym_basis(n, N)
        assert b.shape[1] == comb(N + n - 1, n)
        assert np.allclose(b.conj().T @ b, np.eye(b.shape[1]))
        assert same_column_space(projector_sym(n, N).mat, b)
        assert len(wts) == b.shape[1]


def test_antisym_basis_orthonormal_and_spanning():
    for n, N in [(2, 2), (2, 3), (3, 3)]:
        b, wts = antisym_basis(n, N)
        assert b.shape[1] == comb(N, n)
        assert np.allclose(b.conj().T @ b, np.eye(b.shape[1]))
        assert same_column_space(projector_antisym(n, N).mat, b)


def test_complement_basis():
    b, _ = antisym_basis(2, 2)
    comp = complement_basis(b, 4)
    assert comp.shape == (4, 3)
    assert np.abs(b.conj().T @ comp).max() < 1e-12


def test_embed_operator_matches_kron():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    dims = (2, 3, 2)
    m = embed_operator(a, (0,), dims)
    assert np.allclose(m, np.kron(a, np.eye(6)))
    m2 = embed_operator(a, (2,), dims)
    assert np.allclose(m2, np.kron(np.eye(6), a))


def test_embed_operator_order_matters():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    dims = (2, 2)
    flip = permutation_operator((1, 0), 2).mat
    direct = embed_operator(a, (0, 1), dims)
    swapped = embed_operator(a, (1, 0), dims)
    assert np.allclose(swapped, flip @ direct @ flip)


def test_embed_shifted_blocks():
    # with a factory that just scales by the shifted first entry, the embedded
    # operator must be diagonal in the spectator index with per-block values
    dims = (2, 2)
    wts = [vector_weights(2)] * 2
    lam = np.array([0.5, 0.25], dtype=complex)
    gamma = 0.125

    def factory(lm):
        return np.eye(2) * lm[0]

    out = embed_shifted(factory, (0,), (1,), dims, wts, lam, gamma)
    # spectator color 0 shifts lam by gamma*omega_0, color 1 leaves lam[0] alone
    expect = np.diag([lam[0] - gamma, lam[0], lam[0] - gamma, lam[0]])
    assert np.allclose(out, expect)
    with pytest.raises(ValueError):
        embed_shifted(factory, (0,), (0,), dims, wts, lam, gamma)


def test_graded_operator_weight_leakage():
    op = GradedOperator.identity(2, 2)
    assert op.weight_leakage() == 0.0
    bad = np.zeros((4, 4), dtype=complex)
    bad[0, 3] = 0.5  # couples weight (2,0) to (0,2)
    assert GradedOperator(2, 2, bad).weight_leakage() == 0.5


def test_transposition_helper():
    assert transposition(4, 1, 3) == (0, 3, 2, 1)
