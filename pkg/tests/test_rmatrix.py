from itertools import combinations
from math import comb

import numpy as np
import pytest

from ellqg.rmatrix import (
    PoleError,
    default_params,
    diag_amplitude,
    dybe_sides,
    exchange_amplitude,
    flip_operator,
    generic_lambda,
    generic_point,
    rmatrix,
    rmatrix_gamma_zero_limit,
    rmatrix_residue,
    unitarity_defect,
    weyl_equivariance_defect,
)
from ellqg.tensorspace import numeric_rank, projector_sym, same_column_space, transposition


@pytest.fixture(scope="module", params=[2, 3])
def params(request):
    return default_params(request.param)


def _rng(seed=0):
    return np.random.default_rng(seed)


def test_amplitudes_at_zero_spectral(params):
    rng = _rng(1)
    lam = generic_lambda(rng, params)
    d = lam[0] - lam[1]
    assert abs(diag_amplitude(0.0, d, params)) < 1e-12
    assert abs(exchange_amplitude(0.0, d, params) - 1.0) < 1e-12


def test_scalar_unitarity_identity(params):
    # scalar consequence of matrix unitarity on a 2x2 weight block:
    # alpha(z,d) alpha(-z,-d) + beta(z,d) beta(-z,d) = 1
    rng = _rng(2)
    for _ in range(10):
        lam = generic_lambda(rng, params)
        z = generic_point(rng, params, avoid=(params.gamma, -params.gamma))
        d = lam[0] - lam[1]
        val = (
            diag_amplitude(z, d, params) * diag_amplitude(-z, -d, params)
            + exchange_amplitude(z, d, params) * exchange_amplitude(-z, d, params)
        )
        assert abs(val - 1.0) < 1e-10


def test_rmatrix_diagonal_same_color_entries(params):
    rng = _rng(3)
    lam = generic_lambda(rng, params)
    z = generic_point(rng, params, avoid=(params.gamma,))
    mat = rmatrix(z, lam, params).mat
    n = params.n_colors
    for i in range(n):
        assert abs(mat[i * n + i, i * n + i] - 1.0) < 1e-14


def test_rmatrix_at_zero_is_flip(params):
    rng = _rng(4)
    lam = generic_lambda(rng, params)
    assert np.abs(rmatrix(0.0, lam, params).mat - flip_operator(params.n_colors).mat).max() < 1e-12


def test_unitarity(params):
    rng = _rng(5)
    for _ in range(50):
        lam = generic_lambda(rng, params)
        z = generic_point(rng, params, avoid=(params.gamma, -params.gamma))
        assert unitarity_defect(z, lam, params) < 1e-10


def test_dybe(params):
    rng = _rng(6)
    g = params.gamma
    for _ in range(20):
        lam = generic_lambda(rng, params)
        zs = [generic_point(rng, params) for _ in range(3)]
        z1, z2, z3 = zs
        if any(
            abs(a - b - s * g) < 1e-3
            for a, b in combinations(zs, 2)
            for s in (1, -1)
        ):
            continue
        lhs, rhs = dybe_sides(z1, z2, z3, lam, params)
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-9


def test_weyl_equivariance(params):
    rng = _rng(7)
    n = params.n_colors
    for _ in range(10):
        lam = generic_lambda(rng, params)
        z = generic_point(rng, params, avoid=(params.gamma,))
        for a in range(n):
            for b in range(a + 1, n):
                assert weyl_equivariance_defect(z, lam, transposition(n, a, b), params) < 1e-10


def test_h_invariance(params):
    rng = _rng(8)
    lam = generic_lambda(rng, params)
    z = generic_point(rng, params, avoid=(params.gamma,))
    assert rmatrix(z, lam, params).weight_leakage() < 1e-12


def test_image_at_minus_gamma_is_symmetric_subspace(params):
    rng = _rng(9)
    n = params.n_colors
    lam = generic_lambda(rng, params)
    r = rmatrix(-params.gamma, lam, params)
    ps = projector_sym(2, n)
    assert numeric_rank(r) == comb(n + 1, 2)
    assert same_column_space(r.mat, ps.mat)


def test_residue_against_numeric_limit(params):
    rng = _rng(10)
    lam = generic_lambda(rng, params)
    g = params.gamma
    eps = 1e-6
    approx = eps * rmatrix(g + eps, lam, params).mat
    exact = rmatrix_residue(lam, params).mat
    assert np.linalg.norm(approx - exact) / np.linalg.norm(exact) < 1e-4


def test_residue_kernel_is_symmetric_subspace(params):
    rng = _rng(11)
    n = params.n_colors
    lam = generic_lambda(rng, params)
    reg = rmatrix_residue(lam, params).mat
    ps = projector_sym(2, n).mat
    assert np.abs(reg @ ps).max() < 1e-9
    assert numeric_rank(reg) == n * n - comb(n + 1, 2)


def test_classical_limit_reference_matrices():
    eye = np.eye(4)
    p = flip_operator(2).mat
    assert np.allclose(rmatrix_gamma_zero_limit(-1, 2).mat, 0.5 * eye + 0.5 * p)
    assert np.allclose(rmatrix_gamma_zero_limit(2, 2).mat, 2.0 * eye - p)
    with pytest.raises(ValueError):
        rmatrix_gamma_zero_limit(0, 2)
    with pytest.raises(ValueError):
        rmatrix_gamma_zero_limit(1, 2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_small_gamma_limits(k):
    p = default_params(2, gamma=1e-4)
    rng = _rng(12)
    lam = generic_lambda(rng, p)
    approx = rmatrix(-k * p.gamma, lam, p).mat
    exact = rmatrix_gamma_zero_limit(-k, 2).mat
    assert np.abs(approx - exact).max() < 1e-3
    if k >= 2:
        approx_pos = rmatrix(k * p.gamma, lam, p).mat
        exact_pos = rmatrix_gamma_zero_limit(k, 2).mat
        assert np.abs(approx_pos - exact_pos).max() < 1e-3
    else:
        rescaled = rmatrix_residue(lam, p).mat / p.gamma
        eye = np.eye(4)
        flip = flip_operator(2).mat
        assert np.abs(rescaled - (eye - flip)).max() < 1e-3


def test_pole_signals(params):
    rng = _rng(13)
    lam = generic_lambda(rng, params)
    with pytest.raises(PoleError):
        rmatrix(params.gamma, lam, params)
    with pytest.raises(PoleError):
        bad = lam.copy()
        bad[1] = bad[0]
        rmatrix(0.3 + 0.1j, bad, params)
