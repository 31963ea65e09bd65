"""The fundamental dynamical R-matrix R(z, lambda) of E_{tau,gamma/2}(gl_N).

R acts on C^N x C^N and depends on a spectral parameter z and a dynamical
parameter lambda in C^N:

    R(z,lambda) = sum_i E_ii x E_ii
                + sum_{i!=j} alpha(z, lambda_i - lambda_j) E_ii x E_jj
                + sum_{i!=j} beta(z, lambda_i - lambda_j)  E_ij x E_ji,

    alpha(z,d) = theta(z) theta(d+gamma) / (theta(z-gamma) theta(d)),
    beta(z,d)  = -theta(z+d) theta(gamma) / (theta(z-gamma) theta(d)).

It solves the dynamical Yang-Baxter equation, is unitary
(R(z,lambda) R(-z,lambda)^(21) = Id), and is equivariant under simultaneous
permutation of colors and lambda entries.  The residue at the pole z = gamma
and the gamma -> 0 limits at z = k*gamma are also provided, together with
the rejection sampler that keeps random parameters away from theta zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensorspace import (
    GradedOperator,
    embed_operator,
    embed_shifted,
    permutation_operator,
    vector_weights,
)
from .theta import ThetaParams, jtheta, jtheta_dz

__all__ = [
    "ModelParams",
    "PoleError",
    "default_params",
    "diag_amplitude",
    "exchange_amplitude",
    "rmatrix",
    "rmatrix_residue",
    "rmatrix_gamma_zero_limit",
    "flip_operator",
    "dybe_sides",
    "unitarity_defect",
    "weyl_equivariance_defect",
    "generic_lambda",
    "generic_point",
]

POLE_TOL = 1e-10

DEFAULT_TAU = 0.75j
DEFAULT_GAMMA = 0.171717 + 0.01j


class PoleError(ArithmeticError):
    """Raised when a theta denominator falls below the pole threshold."""


@dataclass(frozen=True)
class ModelParams:
    """Rank, coupling and theta setup shared by all operators."""

    n_colors: int
    gamma: complex
    theta: ThetaParams

    def __post_init__(self):
        if self.n_colors < 2:
            raise ValueError("n_colors must be at least 2")


def default_params(n_colors: int = 2, gamma: complex = DEFAULT_GAMMA,
                   tau: complex = DEFAULT_TAU) -> ModelParams:
    return ModelParams(n_colors=n_colors, gamma=gamma, theta=ThetaParams(tau=tau))


def _checked_theta(z, params: ModelParams, what: str):
    val = jtheta(z, params.theta)
    if np.min(np.abs(val)) < POLE_TOL:
        raise PoleError(f"theta({what}) vanishes to within {POLE_TOL}")
    return val


def diag_amplitude(z: complex, lam_diff: complex, p: ModelParams) -> complex:
    """Amplitude for two distinct colors passing through a crossing unchanged."""
    den = _checked_theta(z - p.gamma, p, "z-gamma") * _checked_theta(lam_diff, p, "lambda_i-lambda_j")
    return jtheta(z, p.theta) * jtheta(lam_diff + p.gamma, p.theta) / den


def exchange_amplitude(z: complex, lam_diff: complex, p: ModelParams) -> complex:
    """Amplitude for two distinct colors being exchanged at a crossing."""
    den = _checked_theta(z - p.gamma, p, "z-gamma") * _checked_theta(lam_diff, p, "lambda_i-lambda_j")
    return -jtheta(z + lam_diff, p.theta) * jtheta(p.gamma, p.theta) / den


def _pair_tables(z, lam, p: ModelParams, residue: bool):
    """alpha/beta (or their residues at z=gamma) for all color pairs at once."""
    lam = np.asarray(lam, dtype=np.complex128)
    if residue:
        alpha, beta = _pair_tables_many(None, lam[None, :], p, residue=True)
    else:
        alpha, beta = _pair_tables_many(z, lam[None, :], p, residue=False)
    return alpha[0], beta[0]


def _pair_tables_many(z, lam_stack, p: ModelParams, residue: bool = False):
    """Amplitude tables for a stack of dynamical parameters at once.

    ``lam_stack`` has shape (G, N); the returned alpha/beta have shape
    (G, N, N).  Batching keeps the number of theta-series evaluations flat
    in the number of weight-shift blocks.
    """
    lam_stack = np.asarray(lam_stack, dtype=np.complex128)
    n = lam_stack.shape[1]
    d = lam_stack[:, :, None] - lam_stack[:, None, :]
    th_d = jtheta(d, p.theta)
    eye = np.eye(n, dtype=bool)
    th_d[:, eye] = 1.0
    if np.min(np.abs(th_d)) < POLE_TOL:
        raise PoleError("lambda is not generic: theta(lambda_i - lambda_j) ~ 0")
    th_dg = jtheta(d + p.gamma, p.theta)
    if residue:
        # res_{z=gamma} 1/theta(z-gamma) = 1/theta'(0); the diagonal E_ii x E_ii
        # part of R is constant in z and contributes nothing.
        scale = jtheta(p.gamma, p.theta) / jtheta_dz(0.0, p.theta)
        alpha = scale * th_dg / th_d
        beta = -alpha
    else:
        th_zg = jtheta(z - p.gamma, p.theta)
        if abs(th_zg) < POLE_TOL:
            raise PoleError(f"spectral parameter at pole: theta(z-gamma) ~ 0 for z={z!r}")
        th_z = jtheta(z, p.theta)
        alpha = th_z * th_dg / (th_zg * th_d)
        beta = -jtheta(z + d, p.theta) * jtheta(p.gamma, p.theta) / (th_zg * th_d)
    return alpha, beta


def _assemble(alpha, beta, n_colors: int, diag_value) -> np.ndarray:
    """R-shaped matrix from pair tables: column (a,b) has its diagonal entry
    from alpha[a,b] and its (b,a) exchange entry from beta[b,a]."""
    idx = np.arange(n_colors)
    a = np.repeat(idx, n_colors)
    b = np.tile(idx, n_colors)
    cols = a * n_colors + b
    swaps = b * n_colors + a
    dim = n_colors * n_colors
    mat = np.zeros((dim, dim), dtype=np.complex128)
    same = a == b
    mat[cols, cols] = np.where(same, diag_value, alpha[a, b])
    off = ~same
    mat[swaps[off], cols[off]] = beta[b, a][off]
    return mat


def rmatrix(z: complex, lam, p: ModelParams) -> GradedOperator:
    """The fundamental R-matrix R(z, lambda) on C^N x C^N."""
    alpha, beta = _pair_tables(z, lam, p, residue=False)
    return GradedOperator(p.n_colors, 2, _assemble(alpha, beta, p.n_colors, 1.0))


def rmatrix_residue(lam, p: ModelParams) -> GradedOperator:
    """Analytic residue of R(z, lambda) at the simple pole z = gamma.

    Kills the symmetric subspace: the diagonal part contributes
    theta(gamma) theta(d+gamma) / (theta'(0) theta(d)) and the exchange part
    exactly its negative.
    """
    alpha, beta = _pair_tables(None, lam, p, residue=True)
    return GradedOperator(p.n_colors, 2, _assemble(alpha, beta, p.n_colors, 0.0))


def flip_operator(n_colors: int) -> GradedOperator:
    """The flip P: u x v -> v x u on C^N x C^N."""
    return permutation_operator((1, 0), n_colors)


def rmatrix_gamma_zero_limit(k: int, n_colors: int) -> GradedOperator:
    """gamma -> 0 limit of R(k*gamma, lambda), as a combination of Id and P.

    For k <= -1 the limit is (|k|/(|k|+1)) Id + (1/(|k|+1)) P; for k >= 2 it
    is (k/(k-1)) Id - (1/(k-1)) P.  k = 1 sits at the pole (the rescaled
    residue limit of (1/gamma) res R is Id - P) and k = 0 is excluded.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    if k == 1:
        raise ValueError(
            "k = 1 is the pole; the rescaled residue limit (1/gamma) res R -> Id - P "
            "is a separate case"
        )
    eye = GradedOperator.identity(2, n_colors).mat
    pmat = flip_operator(n_colors).mat
    if k < 0:
        m = -k
        mat = (m / (m + 1)) * eye + (1.0 / (m + 1)) * pmat
    else:
        mat = (k / (k - 1)) * eye - (1.0 / (k - 1)) * pmat
    return GradedOperator(n_colors, 2, mat)


def dybe_sides(z1: complex, z2: complex, z3: complex, lam, p: ModelParams):
    """Both triple products of the dynamical Yang-Baxter equation on (C^N)^{x 3}.

    Returns (lhs, rhs):

        lhs = R(z1-z2, lam - g h^(3))^(12) R(z1-z3, lam)^(13) R(z2-z3, lam - g h^(1))^(23)
        rhs = R(z2-z3, lam)^(23) R(z1-z3, lam - g h^(2))^(13) R(z1-z2, lam)^(12)
    """
    n = p.n_colors
    dims = (n, n, n)
    wts = [vector_weights(n)] * 3
    lam = np.asarray(lam, dtype=np.complex128)

    def r(z):
        return lambda lm: rmatrix(z, lm, p).mat

    r12_s = embed_shifted(r(z1 - z2), (0, 1), (2,), dims, wts, lam, p.gamma)
    r13 = embed_operator(rmatrix(z1 - z3, lam, p).mat, (0, 2), dims)
    r23_s = embed_shifted(r(z2 - z3), (1, 2), (0,), dims, wts, lam, p.gamma)
    lhs = r12_s @ r13 @ r23_s

    r23 = embed_operator(rmatrix(z2 - z3, lam, p).mat, (1, 2), dims)
    r13_s = embed_shifted(r(z1 - z3), (0, 2), (1,), dims, wts, lam, p.gamma)
    r12 = embed_operator(rmatrix(z1 - z2, lam, p).mat, (0, 1), dims)
    rhs = r23 @ r13_s @ r12
    return lhs, rhs


def unitarity_defect(z: complex, lam, p: ModelParams) -> float:
    """Relative Frobenius defect of R(z,lam) R(-z,lam)^(21) = Id."""
    pmat = flip_operator(p.n_colors).mat
    prod = rmatrix(z, lam, p).mat @ (pmat @ rmatrix(-z, lam, p).mat @ pmat)
    eye = np.eye(prod.shape[0])
    return float(np.linalg.norm(prod - eye) / np.linalg.norm(eye))


def weyl_equivariance_defect(z: complex, lam, images, p: ModelParams) -> float:
    """Relative defect of R(z, sigma.lam) = (sigma x sigma) R(z, lam) (sigma x sigma)^{-1}.

    ``images`` is the color permutation sigma; sigma acts on lambda by
    (sigma.lam)_i = lam_{sigma^{-1}(i)}.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    n = p.n_colors
    pm = np.zeros((n, n))
    for src, dst in enumerate(images):
        pm[dst, src] = 1.0
    sig2 = np.kron(pm, pm)
    perm_lam = np.empty_like(lam)
    for src, dst in enumerate(images):
        perm_lam[dst] = lam[src]
    lhs = rmatrix(z, perm_lam, p).mat
    rhs = sig2 @ rmatrix(z, lam, p).mat @ sig2.T
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def generic_lambda(rng: np.random.Generator, p: ModelParams, margin: float = 1e-6,
                   depth: int = 1, max_tries: int = 1000) -> np.ndarray:
    """Random generic dynamical parameter.

    Entries are uniform on [0,1) + [0,1)i; a draw is rejected while any
    |theta(lambda_i - lambda_j + k*gamma)|, |k| <= depth, falls below
    ``margin``.  Rejections are essentially never triggered; they guard the
    pole threshold of every downstream theta ratio.
    """
    n = p.n_colors
    for _ in range(max_tries):
        lam = rng.random(n) + 1j * rng.random(n)
        d = lam[:, None] - lam[None, :]
        off = ~np.eye(n, dtype=bool)
        ok = True
        for k in range(-depth, depth + 1):
            vals = jtheta(d[off] + k * p.gamma, p.theta)
            if np.min(np.abs(vals)) < margin:
                ok = False
                break
        if ok:
            return lam
    raise RuntimeError("could not draw a generic lambda; gamma may be degenerate")


def generic_point(rng: np.random.Generator, p: ModelParams, avoid=(),
                  margin: float = 1e-4, max_tries: int = 1000) -> complex:
    """Random spectral parameter in the unit cell with |theta(z - a)| >= margin
    for every a in ``avoid``."""
    for _ in range(max_tries):
        z = complex(rng.random(), rng.random())
        if all(abs(jtheta(z - a, p.theta)) >= margin for a in avoid):
            return z
    raise RuntimeError("could not draw a generic spectral point")
