import numpy as np
import pytest

from ellqg.diffop import commutator, max_coeff_difference, ruijsenaars_operator, shift_operator
from ellqg.emodule import (
    ext_power_module,
    module_rmatrix,
    sym_power_module,
    vector_module,
)
from ellqg.rmatrix import default_params, generic_lambda, generic_point
from ellqg.tensorspace import transposition
from ellqg.theta import jtheta
from ellqg.transfer import (
    exterior_aux_rmatrix,
    gauge_factor,
    gauge_ratio_residual,
    higher_transfer_matrix,
    minor_expansion_transfer,
    operator_algebra_generator,
    phi_product,
    quantum_determinant,
    quantum_determinant_op,
    ruijsenaars_spectral_factor,
    sym_fusion_gauge,
    trace_transfer,
    transfer_matrix,
    transfer_ruijsenaars_ratio,
)
from ellqg.diffop import sn_conjugate


def _rng(seed=0):
    return np.random.default_rng(seed)


def _draws(p, n, rng, count=1):
    avoid = [k * p.gamma for k in range(-p.n_colors, n + p.n_colors + 1)]
    out = []
    for _ in range(count):
        lam = generic_lambda(rng, p, depth=n + 2)
        z = generic_point(rng, p, avoid=avoid)
        out.append((z, lam))
    return out


GRID = [(2, 1), (2, 2), (3, 1)]


@pytest.mark.parametrize("N,ell", GRID)
def test_transfer_equals_scaled_ruijsenaars(N, ell):
    p = default_params(N)
    rng = _rng(10 * N + ell)
    n = N * ell
    mod = sym_power_module(n, 0.0, p)
    m1 = ruijsenaars_operator(1, ell, p)
    for z, lam in _draws(p, n, rng, count=10):
        t = transfer_matrix(mod, z)
        fac = ruijsenaars_spectral_factor(z, ell, p)
        for mu in t.shifts:
            got = t.coeff(mu, lam)[0, 0]
            want = fac * m1.coeff(mu, lam)[0, 0]
            assert abs(got - want) < 1e-8 * abs(want)


def test_first_shift_coefficient_formula():
    # coefficient of the first shift in T(z):
    # theta(z-g ell)/theta(z-g N ell) * prod_k theta(l_0-l_k+g ell)/theta(l_0-l_k)
    N, ell = 3, 1
    p = default_params(N)
    rng = _rng(3)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, lam), = _draws(p, N * ell, rng)
    t = transfer_matrix(mod, z)
    got = t.coeff((1, 0, 0), lam)[0, 0]
    want = ruijsenaars_spectral_factor(z, ell, p)
    for k in range(1, N):
        want *= jtheta(lam[0] - lam[k] + ell * p.gamma, p.theta) / jtheta(
            lam[0] - lam[k], p.theta
        )
    assert abs(got - want) < 1e-9 * abs(want)


def test_transfer_is_weyl_symmetric():
    N, ell = 2, 1
    p = default_params(N)
    rng = _rng(4)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, _), = _draws(p, N * ell, rng)
    t = transfer_matrix(mod, z)
    lams = [generic_lambda(rng, p, depth=3) for _ in range(5)]
    conj = sn_conjugate(t, transposition(N, 0, 1))
    assert max_coeff_difference(conj, t, lams) < 1e-9


def test_transfer_matrices_commute_at_different_spectral_points():
    N, ell = 2, 1
    p = default_params(N)
    rng = _rng(5)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, _), (w, _) = _draws(p, N * ell, rng, count=2)
    comm = commutator(transfer_matrix(mod, z), transfer_matrix(mod, w))
    lams = [generic_lambda(rng, p, depth=4) for _ in range(5)]
    worst = max(np.abs(comm.coeff(mu, lam)).max() for lam in lams for mu in comm.shifts)
    assert worst < 1e-8


def test_higher_transfer_m1_equals_transfer():
    N, ell = 3, 1
    p = default_params(N)
    rng = _rng(6)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, lam), = _draws(p, N * ell, rng)
    t1 = transfer_matrix(mod, z)
    h1 = higher_transfer_matrix(mod, z, 1)
    assert max_coeff_difference(t1, h1, [lam]) < 1e-12


def test_minor_expansion_matches_trace_form_where_it_should():
    N, ell = 2, 1
    p = default_params(N)
    rng = _rng(7)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, _), = _draws(p, N * ell, rng)
    lams = [generic_lambda(rng, p, depth=4) for _ in range(3)]
    # m = 1: exact agreement
    assert max_coeff_difference(
        minor_expansion_transfer(mod, z, 1), higher_transfer_matrix(mod, z, 1), lams
    ) < 1e-12
    # m = 2: proportional, with a lambda- and subset-independent factor
    me = minor_expansion_transfer(mod, z, 2)
    tf = higher_transfer_matrix(mod, z, 2)
    ratios = [
        me.coeff(mu, lam)[0, 0] / tf.coeff(mu, lam)[0, 0]
        for lam in lams
        for mu in tf.shifts
    ]
    ratios = np.array(ratios)
    assert np.abs(ratios / ratios.mean() - 1).max() < 1e-10


@pytest.mark.parametrize("N,ell", GRID)
def test_higher_transfer_proportional_to_ruijsenaars(N, ell):
    p = default_params(N)
    rng = _rng(20 + 10 * N + ell)
    n = N * ell
    mod = sym_power_module(n, 0.0, p)
    avoid = [k * p.gamma for k in range(-N, n + N + 1)]
    z = generic_point(rng, p, avoid=avoid)
    lams = [generic_lambda(rng, p, depth=n + 2) for _ in range(5)]
    for m in range(1, N + 1):
        ratios = transfer_ruijsenaars_ratio(mod, z, m, ell, lams)
        values = np.array([v for lst in ratios.values() for v in lst])
        assert np.abs(values / values.mean() - 1).max() < 1e-7


def test_gm_tends_to_one_for_small_gamma():
    # first order deviation is gamma * theta'(z)/theta(z); the test point
    # sits near the half-period where theta' vanishes, so the slope is tame
    rng = _rng(8)
    for N, ell in GRID:
        p = default_params(N, gamma=1e-4)
        mod = sym_power_module(N * ell, 0.0, p)
        z = 0.5 + 0.02 * (rng.random() - 0.5) + 0.01j * rng.random()
        lams = [generic_lambda(rng, p, depth=3) for _ in range(2)]
        for m in range(1, N + 1):
            ratios = transfer_ruijsenaars_ratio(mod, z, m, ell, lams)
            values = np.array([v for lst in ratios.values() for v in lst])
            assert np.abs(values - 1).max() < 1e-3


@pytest.mark.parametrize("N,ell", [(2, 1), (2, 2), (3, 1)])
def test_gauge_ratio(N, ell):
    p = default_params(N)
    rng = _rng(30 + 10 * N + ell)
    tol = 1e-8 if (N, ell) == (2, 2) else 1e-9
    lam_a = generic_lambda(rng, p, depth=N * ell + 1)
    lam_b = generic_lambda(rng, p, depth=N * ell + 1)
    residual, off = gauge_ratio_residual(ell, lam_a, lam_b, p)
    assert residual < tol
    assert off < 1e-9
    # identical arguments give an exactly vanishing residual
    same, _ = gauge_ratio_residual(ell, lam_a, lam_a, p)
    assert same == 0.0


def test_gauge_factor_shift_identity():
    # g(l)/g(l - g omega_0) telescopes to
    # prod_k theta(d+g ell) theta(d-g ell)/theta(d)^2
    for N, ell in [(2, 1), (2, 2), (3, 2)]:
        p = default_params(N)
        rng = _rng(40 + N + ell)
        for _ in range(20):
            lam = generic_lambda(rng, p, depth=2 * ell + 1)
            shifted = lam.copy()
            shifted[0] -= p.gamma
            ratio = gauge_factor(lam, ell, p) / gauge_factor(shifted, ell, p)
            want = 1.0
            for k in range(1, N):
                d = lam[0] - lam[k]
                want *= (
                    jtheta(d + p.gamma * ell, p.theta)
                    * jtheta(d - p.gamma * ell, p.theta)
                    / jtheta(d, p.theta) ** 2
                )
            assert abs(ratio - want) < 1e-10 * abs(want)


def test_sym_fusion_gauge_image_is_on_the_zero_weight_line():
    p = default_params(2)
    rng = _rng(9)
    lam = generic_lambda(rng, p, depth=3)
    scale, off = sym_fusion_gauge(1, lam, p)
    assert off < 1e-12
    assert abs(scale) > 1e-6


def test_quantum_determinant_scalar_on_zero_sector():
    # on the zero-weight sector the phi prefactor is trivially 1
    N, ell = 2, 1
    p = default_params(N)
    rng = _rng(11)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, lam), = _draws(p, N * ell, rng)
    top = higher_transfer_matrix(mod, z, N)
    det = quantum_determinant(mod, z, lam)
    idx = mod.sector_indices("zero")
    got = det[np.ix_(idx, idx)][0, 0]
    assert abs(got - top.coeff((1, 1), lam)[0, 0]) < 1e-12 * abs(got)
    assert abs(got) > 1e-8


def test_quantum_determinant_nonzero_and_lambda_constant_on_vector_module():
    p = default_params(2)
    rng = _rng(12)
    mod = vector_module(0.0, p)
    avoid = [k * p.gamma for k in range(-2, 4)]
    z = generic_point(rng, p, avoid=avoid)
    vals = []
    for _ in range(3):
        lam = generic_lambda(rng, p, depth=3)
        det = quantum_determinant(mod, z, lam)
        assert np.abs(det - det[0, 0] * np.eye(2)).max() < 1e-10
        vals.append(det[0, 0])
    vals = np.array(vals)
    assert np.abs(vals - vals.mean()).max() < 1e-10
    assert abs(vals.mean()) > 1e-8


@pytest.mark.parametrize("N", [2, 3])
def test_quantum_determinant_centrality(N):
    p = default_params(N)
    rng = _rng(13 + N)
    mod = vector_module(0.0, p)
    avoid = [k * p.gamma for k in range(-N, N + 2)]
    z = generic_point(rng, p, avoid=avoid)
    w = generic_point(rng, p, avoid=avoid)
    det_op = quantum_determinant_op(mod, z)
    lams = [generic_lambda(rng, p, depth=3) for _ in range(3)]
    for i in range(N):
        for j in range(N):
            comm = commutator(det_op, operator_algebra_generator(mod, w, i, j))
            worst = max(
                np.abs(comm.coeff(mu, lam)).max() for lam in lams for mu in comm.shifts
            )
            assert worst < 1e-8


def test_top_exterior_transfer_is_scalar_shift():
    # with the one dimensional top exterior power as quantum space, the top
    # fused transfer matrix is a single scalar coefficient times the full
    # shift, and the plain transfer matrix is diagonal on the unique sector
    N = 2
    p = default_params(N)
    rng = _rng(15)
    w = generic_point(rng, p)
    mod = ext_power_module(N, w, p)
    avoid = [w + k * p.gamma for k in range(-N, N + 2)]
    z = generic_point(rng, p, avoid=avoid)
    lam = generic_lambda(rng, p, depth=N + 1)
    top = higher_transfer_matrix(mod, z, N, sector=(1,) * N)
    assert top.shifts == ((1,) * N,)
    assert abs(top.coeff((1,) * N, lam)[0, 0]) > 1e-8
    t1 = transfer_matrix(mod, z, sector=(1,) * N)
    assert len(t1.shifts) == N


def test_transfer_empty_sector_raises():
    p = default_params(2)
    mod = vector_module(0.0, p)
    with pytest.raises(ValueError):
        transfer_matrix(mod, 0.3)


def test_trace_transfer_matches_transfer_matrix():
    N, ell = 2, 1
    p = default_params(N)
    rng = _rng(16)
    mod = sym_power_module(N * ell, 0.0, p)
    (z, lam), = _draws(p, N * ell, rng)
    direct = transfer_matrix(mod, z)
    traced = trace_transfer(module_rmatrix(mod, z))
    assert max_coeff_difference(direct, traced, [lam]) < 1e-12
