import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellqg.theta import ThetaConvergenceError, ThetaParams, jtheta, jtheta_dz

P = ThetaParams(tau=0.75j)

unit_cell = st.builds(
    complex,
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=-1.0, max_value=1.0),
)


def test_params_validation():
    with pytest.raises(ValueError):
        ThetaParams(tau=0.5)
    with pytest.raises(ValueError):
        ThetaParams(tau=0.75j, max_terms=0)
    with pytest.raises(ValueError):
        ThetaParams(tau=0.75j, term_tol=2.0)


def test_zero_at_origin():
    assert abs(jtheta(0.0, P)) < 1e-12


def test_zero_lattice():
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            assert abs(jtheta(m + n * P.tau, P)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(z=unit_cell)
def test_oddness(z):
    assert abs(jtheta(-z, P) + jtheta(z, P)) <= 1e-12 * (1.0 + abs(jtheta(z, P)))


def test_quasi_periodicity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        z = complex(rng.random(), rng.random())
        t = jtheta(z, P)
        assert abs(jtheta(z + 1, P) + t) <= 1e-10 * (1 + abs(t))
        factor = -np.exp(-1j * np.pi * P.tau - 2j * np.pi * z)
        assert abs(jtheta(z + P.tau, P) - factor * t) <= 1e-10 * (1 + abs(factor * t))


def test_quasi_periodicity_at_100_points():
    rng = np.random.default_rng(11)
    z = rng.random(100) + 1j * rng.random(100)
    t = jtheta(z, P)
    assert np.all(np.abs(jtheta(z + 1, P) + t) <= 1e-10 * (1 + np.abs(t)))
    factor = -np.exp(-1j * np.pi * P.tau - 2j * np.pi * z)
    assert np.all(np.abs(jtheta(z + P.tau, P) - factor * t) <= 1e-10 * (1 + np.abs(factor * t)))


def test_deriv_nonzero_at_origin():
    assert abs(jtheta_dz(0.0, P)) > 1e-3


def test_deriv_matches_central_difference():
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(20):
        z = complex(rng.random(), rng.random())
        fd = (jtheta(z + h, P) - jtheta(z - h, P)) / (2 * h)
        dz = jtheta_dz(z, P)
        assert abs(fd - dz) <= 1e-6 * abs(dz)


def test_deriv_is_even():
    rng = np.random.default_rng(5)
    for _ in range(10):
        z = complex(rng.random(), rng.random())
        assert abs(jtheta_dz(-z, P) - jtheta_dz(z, P)) <= 1e-10 * (1 + abs(jtheta_dz(z, P)))


def test_no_premature_truncation_at_sine_zero():
    # the k=1 pair vanishes at z=1/3; the sum must still pick up higher pairs
    z = 1.0 / 3.0
    val = jtheta(z, P)
    fine = jtheta(z + 0.0j, ThetaParams(tau=0.75j, max_terms=400, term_tol=1e-30))
    assert abs(val - fine) <= 1e-14 * abs(fine)


def test_array_and_scalar_agree():
    z = np.array([0.1 + 0.2j, 0.7 - 0.1j])
    arr = jtheta(z, P)
    assert arr.shape == (2,)
    assert arr[0] == jtheta(z[0], P)
    assert isinstance(jtheta(z[0], P), complex)


def test_convergence_error():
    bad = ThetaParams(tau=0.002j, max_terms=5)
    with pytest.raises(ThetaConvergenceError):
        jtheta(0.3 + 0.4j, bad)
