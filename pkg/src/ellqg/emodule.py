"""Representations of the elliptic quantum group and their R-matrices.

An E-module is a weight-graded space W together with an L-operator
L(z, lambda) on C^N x W satisfying the quadratic exchange relation against
the fundamental R-matrix (``rll_defect`` measures it).  Provided here:

* the vector representation V(w) with L(z, lambda) = R(z - w, lambda);
* tensor products, L(z,l) = L1(z, l - g h^(3))^(12) L2(z, l)^(13);
* the n-fold product V(w) x V(w+g) x ... x V(w+(n-1)g), whose L operator is
  the staircase product
      R(z-w, l - g sum_{j>=2} h^(j))^(01) ... R(z-w-(n-1)g, l)^(0n),
  built from sparse two-entry-per-column factors so that large quantum
  spaces stay cheap, plus the reversed-ordering ("opposite coproduct")
  variant used by the intertwining identities;
* the symmetric power Sym^n V(w) (restriction to the invariant subspace
  C^N x S^n) and the exterior power Ext^n V(w) (quotient by the invariant
  complement of the antisymmetric tensors, realized on the orthonormal
  antisymmetric basis) -- both constructions verify the subspace invariance
  on every evaluation and raise SubspaceLeakError if it fails;
* R-matrices between modules, their tensor-product composition rules, and
  the fused R-matrix of two products of vector representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .rmatrix import ModelParams, _pair_tables, rmatrix
from .tensorspace import (
    antisym_basis,
    complement_basis,
    embed_operator,
    embed_shifted,
    kron_sum_weights,
    multi_indices,
    sym_basis,
    vector_weights,
    weight_table,
)

__all__ = [
    "EModule",
    "SubspaceLeakError",
    "LEAK_TOL",
    "vector_module",
    "trivial_module",
    "tensor_module",
    "vector_power_module",
    "sym_power_module",
    "ext_power_module",
    "vector_power_l",
    "vector_power_l_opposite",
    "chain_subspace_leak",
    "rll_defect",
    "coproduct_intertwiner_defects",
    "ModuleRMatrix",
    "module_rmatrix",
    "compose_rmatrix_left",
    "compose_rmatrix_right",
    "fused_product_rmatrix",
    "staircase_points",
    "swap_factors",
    "pair_unitarity_defect",
    "module_dybe_defect",
]

LEAK_TOL = 1e-8


class SubspaceLeakError(RuntimeError):
    """An L-operator failed to preserve the subspace defining a module."""


@dataclass(frozen=True)
class EModule:
    """Weight-graded space with an L-operator evaluator on C^N x W."""

    params: ModelParams
    weights: np.ndarray
    l_op: Callable[[complex, np.ndarray], np.ndarray]
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.weights)

    def l_blocks(self, z: complex, lam) -> np.ndarray:
        """Matrix elements as blocks[j, :, i, :] = L_ji(z, lam), the End(W)
        coefficient in L (e_i x v) = sum_j e_j x L_ji v."""
        n = self.params.n_colors
        return self.l_op(z, lam).reshape(n, self.dim, n, self.dim)

    def sector_indices(self, sector) -> np.ndarray:
        """Basis indices of a weight sector.

        ``sector`` is a weight tuple, or "zero" for the zero-weight space in
        the traceless sense: every color occurs equally often (the sector
        (ell, ..., ell) for n = N*ell factors, empty when N does not divide
        the number of factors).
        """
        if isinstance(sector, str):
            if sector != "zero":
                raise ValueError(f"unknown sector spec {sector!r}")
            mask = (self.weights == self.weights[:, :1]).all(axis=1)
            return np.nonzero(mask)[0]
        target = np.asarray(sector, dtype=np.intp)
        return np.nonzero((self.weights == target).all(axis=1))[0]


def vector_module(w: complex, p: ModelParams) -> EModule:
    """The vector representation with evaluation point w: L(z, l) = R(z-w, l)."""
    return EModule(
        params=p,
        weights=vector_weights(p.n_colors),
        l_op=lambda z, lam: rmatrix(z - w, lam, p).mat,
        label=f"V({w})",
    )


def trivial_module(p: ModelParams) -> EModule:
    """One-dimensional zero-weight module with L = Id."""
    n = p.n_colors
    return EModule(
        params=p,
        weights=np.zeros((1, n), dtype=np.intp),
        l_op=lambda z, lam: np.eye(n, dtype=np.complex128),
        label="C",
    )


def tensor_module(m1: EModule, m2: EModule) -> EModule:
    """Tensor product module: L(z,l) = L1(z, l - g h^(3))^(12) L2(z, l)^(13)."""
    p = m1.params
    n = p.n_colors
    dims = (n, m1.dim, m2.dim)
    wts = (vector_weights(n), m1.weights, m2.weights)

    def l_op(z, lam):
        lam = np.asarray(lam, dtype=np.complex128)
        part2 = embed_operator(m2.l_op(z, lam), (0, 2), dims)
        part1 = embed_shifted(
            lambda lm: m1.l_op(z, lm), (0, 1), (2,), dims, wts, lam, p.gamma
        )
        return part1 @ part2

    return EModule(
        params=p,
        weights=kron_sum_weights(m1.weights, m2.weights),
        l_op=l_op,
        label=f"{m1.label}*{m2.label}",
    )


def staircase_points(n: int, w: complex, gamma: complex) -> list:
    """Evaluation points w, w+gamma, ..., w+(n-1)gamma of the fused product."""
    return [w + k * gamma for k in range(n)]


def _chain_factor(k: int, n: int, w: complex, z: complex, lam, p: ModelParams,
                  opposite: bool) -> sp.csr_matrix:
    """Sparse matrix of the k-th staircase factor on (C^N)^{x(n+1)}.

    The factor is R(z - w - (k-1) gamma, lam - gamma mu)^(0k) with mu the
    weight of quantum slots k+1..n (slots 1..k-1 for the opposite ordering).
    Each column of the fundamental R-matrix has at most two entries, so the
    factor is assembled column-wise from the pair amplitude tables.
    """
    N = p.n_colors
    dim = N ** (n + 1)
    tab = multi_indices(n + 1, N)
    a = tab[:, 0]
    b = tab[:, k]
    spect = tab[:, 1:k] if opposite else tab[:, k + 1:]
    counts = np.stack([(spect == c).sum(axis=1) for c in range(N)], axis=1)
    groups, ginv = np.unique(counts, axis=0, return_inverse=True)
    spectral = z - w - (k - 1) * p.gamma
    lam = np.asarray(lam, dtype=np.complex128)
    alpha_all = np.empty((len(groups), N, N), dtype=np.complex128)
    beta_all = np.empty_like(alpha_all)
    for g, mu in enumerate(groups):
        alpha_all[g], beta_all[g] = _pair_tables(spectral, lam - p.gamma * mu, p, residue=False)
    flat = np.arange(dim)
    same = a == b
    diag_vals = np.where(same, 1.0 + 0.0j, alpha_all[ginv, a, b])
    off = ~same
    swap = flat + (b - a) * N**n + (a - b) * N ** (n - k)
    rows = np.concatenate([flat, swap[off]])
    cols = np.concatenate([flat, flat[off]])
    vals = np.concatenate([diag_vals, beta_all[ginv, b, a][off]])
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def _apply_chain(n, w, z, lam, p, block, opposite=False) -> np.ndarray:
    """Apply the (possibly opposite-ordered) staircase L product to a block."""
    order = range(1, n + 1) if opposite else range(n, 0, -1)
    out = np.asarray(block, dtype=np.complex128)
    for k in order:
        out = _chain_factor(k, n, w, z, lam, p, opposite) @ out
    return out


def vector_power_l(n: int, w: complex, z: complex, lam, p: ModelParams) -> np.ndarray:
    """Dense L-operator of V(w) x ... x V(w+(n-1)gamma) on (C^N)^{x(n+1)}."""
    return _apply_chain(n, w, z, lam, p, np.eye(p.n_colors ** (n + 1), dtype=np.complex128))


def vector_power_l_opposite(n: int, w: complex, z: complex, lam, p: ModelParams) -> np.ndarray:
    """Dense opposite-ordering L-operator, R(...)^(0n) ... R(z-w, l)^(01)."""
    return _apply_chain(
        n, w, z, lam, p, np.eye(p.n_colors ** (n + 1), dtype=np.complex128), opposite=True
    )


def vector_power_module(n: int, w: complex, p: ModelParams) -> EModule:
    """The product module V(w) x V(w+gamma) x ... x V(w+(n-1)gamma)."""
    return EModule(
        params=p,
        weights=weight_table(n, p.n_colors),
        l_op=lambda z, lam: vector_power_l(n, w, z, lam, p),
        label=f"V^x{n}({w})",
    )


def _restricted_l(n, w, p, basis, check_basis, check_against, kind):
    """L evaluator compressed onto ``basis``; every evaluation verifies that
    ``check_basis`` stays inside the span tested by ``check_against``.

    Evaluations are memoized on (z, lambda): transfer-matrix coefficients
    revisit the same arguments many times.
    """
    N = p.n_colors
    big = np.kron(np.eye(N, dtype=np.complex128), basis)
    same_check = check_basis is basis
    big_check = big if same_check else np.kron(np.eye(N, dtype=np.complex128), check_basis)
    big_against = np.kron(np.eye(N, dtype=np.complex128), check_against)
    memo = {}

    def l_op(z, lam):
        lam = np.asarray(lam, dtype=np.complex128)
        key = (complex(z), lam.tobytes())
        hit = memo.get(key)
        if hit is not None:
            return hit
        img_basis = _apply_chain(n, w, z, lam, p, big)
        small = big.conj().T @ img_basis
        if big_check.shape[1]:
            img = img_basis if same_check else _apply_chain(n, w, z, lam, p, big_check)
            leak = np.linalg.norm(img - big_against @ (big_against.conj().T @ img))
            leak /= np.linalg.norm(img)
            if leak > LEAK_TOL:
                raise SubspaceLeakError(
                    f"L does not preserve the {kind} subspace: relative leakage {leak:.3e}"
                )
        if len(memo) > 128:
            memo.clear()
        memo[key] = small
        return small

    return l_op


def sym_power_module(n: int, w: complex, p: ModelParams) -> EModule:
    """Symmetric power Sym^n V(w): the staircase L restricted to C^N x S^n."""
    basis, col_wts = sym_basis(n, p.n_colors)
    l_op = _restricted_l(n, w, p, basis, basis, basis, "symmetric")
    return EModule(params=p, weights=col_wts, l_op=l_op, label=f"Sym^{n}V({w})")


def ext_power_module(n: int, w: complex, p: ModelParams) -> EModule:
    """Exterior power Ext^n V(w): the quotient by the invariant complement of
    the antisymmetric tensors, realized on the orthonormal antisymmetric
    basis.  Requires n <= N."""
    N = p.n_colors
    basis, col_wts = antisym_basis(n, N)
    if basis.shape[1] == 0:
        raise ValueError(f"exterior power vanishes for n={n} > N={N}")
    jbasis = complement_basis(basis, N**n)
    # the quotient is well defined iff L keeps C^N x J inside itself,
    # equivalently the image of C^N x J has no antisymmetric component
    l_op = _restricted_l(n, w, p, basis, jbasis, jbasis, "quotient-complement")
    return EModule(params=p, weights=col_wts, l_op=l_op, label=f"Ext^{n}V({w})")


def chain_subspace_leak(n, w, z, lam, p, basis) -> float:
    """Relative leakage of the staircase L image of C^N x span(basis) out of
    that subspace (the invariance statement behind the fused submodules)."""
    big = np.kron(np.eye(p.n_colors, dtype=np.complex128), basis)
    img = _apply_chain(n, w, z, lam, p, big)
    resid = img - big @ (big.conj().T @ img)
    return float(np.linalg.norm(resid) / np.linalg.norm(img))


def rll_defect(module: EModule, z1: complex, z2: complex, lam) -> float:
    """Relative residual of the exchange relation

    R(z1-z2, l - g h^(3))^(12) L(z1, l)^(13) L(z2, l - g h^(1))^(23)
      = L(z2, l)^(23) L(z1, l - g h^(2))^(13) R(z1-z2, l)^(12)

    on C^N x C^N x W.
    """
    p = module.params
    n = p.n_colors
    dims = (n, n, module.dim)
    wts = (vector_weights(n), vector_weights(n), module.weights)
    lam = np.asarray(lam, dtype=np.complex128)

    r_fac = lambda lm: rmatrix(z1 - z2, lm, p).mat
    lhs = (
        embed_shifted(r_fac, (0, 1), (2,), dims, wts, lam, p.gamma)
        @ embed_operator(module.l_op(z1, lam), (0, 2), dims)
        @ embed_shifted(lambda lm: module.l_op(z2, lm), (1, 2), (0,), dims, wts, lam, p.gamma)
    )
    rhs = (
        embed_operator(module.l_op(z2, lam), (1, 2), dims)
        @ embed_shifted(lambda lm: module.l_op(z1, lm), (0, 2), (1,), dims, wts, lam, p.gamma)
        @ embed_operator(rmatrix(z1 - z2, lam, p).mat, (0, 1), dims)
    )
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def coproduct_intertwiner_defects(n, w, z, lam, p) -> tuple:
    """Residuals of the two intertwining identities relating the staircase L,
    its opposite ordering L', and the fusion operators:

        L(z,l) (1 x WS_n(l - g h^(0)))  = (1 x WS_n(l)) L'(z,l)
        (1 x WE_n(l)) L(z,l)            = L'(z,l) (1 x WE_n(l - g h^(0)))

    with WS the symmetric and WE the regularized exterior fusion operator.
    """
    from .fusion import ext_fusion, sym_fusion

    N = p.n_colors
    dims = (N,) * (n + 1)
    wts = [vector_weights(N)] * (n + 1)
    lam = np.asarray(lam, dtype=np.complex128)
    quantum = tuple(range(1, n + 1))

    big_l = vector_power_l(n, w, z, lam, p)
    big_lp = vector_power_l_opposite(n, w, z, lam, p)

    ws_shift = embed_shifted(
        lambda lm: sym_fusion(n, lm, p).mat, quantum, (0,), dims, wts, lam, p.gamma
    )
    ws_plain = embed_operator(sym_fusion(n, lam, p).mat, quantum, dims)
    lhs = big_l @ ws_shift
    rhs = ws_plain @ big_lp
    d_sym = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))

    we_shift = embed_shifted(
        lambda lm: ext_fusion(n, lm, p).mat, quantum, (0,), dims, wts, lam, p.gamma
    )
    we_plain = embed_operator(ext_fusion(n, lam, p).mat, quantum, dims)
    lhs = we_plain @ big_l
    rhs = big_lp @ we_shift
    # for n > N the exterior fusion operator vanishes identically and both
    # sides are roundoff; normalize against the L scale in that case
    scale = max(np.linalg.norm(rhs), np.linalg.norm(lhs), np.linalg.norm(big_l))
    d_ext = float(np.linalg.norm(lhs - rhs) / scale)
    return d_sym, d_ext


@dataclass(frozen=True)
class ModuleRMatrix:
    """R-matrix for an ordered pair of modules: lam -> End(W1 x W2)."""

    params: ModelParams
    weights1: np.ndarray
    weights2: np.ndarray
    eval_fn: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    @property
    def dim1(self) -> int:
        return len(self.weights1)

    @property
    def dim2(self) -> int:
        return len(self.weights2)

    def __call__(self, lam) -> np.ndarray:
        return self.eval_fn(np.asarray(lam, dtype=np.complex128))


def module_rmatrix(module: EModule, z: complex) -> ModuleRMatrix:
    """The R-matrix for (V(z), W) is the L-operator of W evaluated at z."""
    return ModuleRMatrix(
        params=module.params,
        weights1=vector_weights(module.params.n_colors),
        weights2=module.weights,
        eval_fn=lambda lam: module.l_op(z, lam),
        label=f"R[V({z}),{module.label}]",
    )


def compose_rmatrix_left(r13: ModuleRMatrix, r23: ModuleRMatrix) -> ModuleRMatrix:
    """R-matrix for (W1 x W2, W3) from R_{W1,W3} and R_{W2,W3}:

    R_{W1 x W2, W3}(l) = R_{W2,W3}(l)^(23) R_{W1,W3}(l - g h^(2))^(13).

    This is the ordering compatible with the tensor-product L convention
    L_{W1 x W2} = L_1(z, l - g h^(3))^(12) L_2(z, l)^(13): the composed
    matrix times the factor flip is a module morphism, and unitarity against
    the mirrored composition holds.
    """
    p = r13.params
    dims = (r13.dim1, r23.dim1, r13.dim2)
    wts = (r13.weights1, r23.weights1, r13.weights2)

    def eval_fn(lam):
        part23 = embed_operator(r23(lam), (1, 2), dims)
        part13 = embed_shifted(lambda lm: r13(lm), (0, 2), (1,), dims, wts, lam, p.gamma)
        return part23 @ part13

    return ModuleRMatrix(
        params=p,
        weights1=kron_sum_weights(r13.weights1, r23.weights1),
        weights2=r13.weights2,
        eval_fn=eval_fn,
    )


def compose_rmatrix_right(r13: ModuleRMatrix, r12: ModuleRMatrix) -> ModuleRMatrix:
    """R-matrix for (W1, W2 x W3) from R_{W1,W3} and R_{W1,W2}:

    R_{W1, W2 x W3}(l) = R_{W1,W2}(l - g h^(3))^(12) R_{W1,W3}(l)^(13),

    mirroring the tensor-product L convention (for W1 = V(z) this *is*
    the L operator of W2 x W3).
    """
    p = r13.params
    dims = (r13.dim1, r12.dim2, r13.dim2)
    wts = (r13.weights1, r12.weights2, r13.weights2)

    def eval_fn(lam):
        part12 = embed_shifted(lambda lm: r12(lm), (0, 1), (2,), dims, wts, lam, p.gamma)
        part13 = embed_operator(r13(lam), (0, 2), dims)
        return part12 @ part13

    return ModuleRMatrix(
        params=p,
        weights1=r13.weights1,
        weights2=kron_sum_weights(r12.weights2, r13.weights2),
        eval_fn=eval_fn,
    )


def fused_product_rmatrix(points1, points2, p: ModelParams) -> ModuleRMatrix:
    """R-matrix between two tensor products of vector representations with
    the given evaluation points, built from fundamental R-matrices via the
    two composition rules."""
    points1, points2 = list(points1), list(points2)
    if not points1 or not points2:
        raise ValueError("both factor lists must be nonempty")
    if len(points1) == 1 and len(points2) == 1:
        z1, z2 = points1[0], points2[0]
        wt = vector_weights(p.n_colors)
        return ModuleRMatrix(
            params=p,
            weights1=wt,
            weights2=wt,
            eval_fn=lambda lam: rmatrix(z1 - z2, lam, p).mat,
        )
    if len(points1) > 1:
        head = fused_product_rmatrix(points1[:1], points2, p)
        rest = fused_product_rmatrix(points1[1:], points2, p)
        return compose_rmatrix_left(head, rest)
    head = fused_product_rmatrix(points1, points2[:1], p)
    rest = fused_product_rmatrix(points1, points2[1:], p)
    return compose_rmatrix_right(rest, head)


def swap_factors(mat: np.ndarray, d_first: int, d_second: int) -> np.ndarray:
    """Reinterpret an operator on B x A as an operator on A x B."""
    t = mat.reshape(d_second, d_first, d_second, d_first)
    return np.ascontiguousarray(
        t.transpose(1, 0, 3, 2).reshape(d_first * d_second, d_first * d_second)
    )


def pair_unitarity_defect(points1, points2, lam, p: ModelParams) -> float:
    """Relative defect of R_{W1,W2}(l)^(12) R_{W2,W1}(l)^(21) = Id."""
    r12 = fused_product_rmatrix(points1, points2, p)
    r21 = fused_product_rmatrix(points2, points1, p)
    prod = r12(lam) @ swap_factors(r21(lam), r12.dim1, r12.dim2)
    eye = np.eye(prod.shape[0])
    return float(np.linalg.norm(prod - eye) / np.linalg.norm(eye))


def module_dybe_defect(pts1, pts2, pts3, lam, p: ModelParams) -> float:
    """Relative residual of the dynamical Yang-Baxter equation for the fused
    R-matrices of three products of vector representations."""
    r12 = fused_product_rmatrix(pts1, pts2, p)
    r13 = fused_product_rmatrix(pts1, pts3, p)
    r23 = fused_product_rmatrix(pts2, pts3, p)
    dims = (r12.dim1, r12.dim2, r13.dim2)
    wts = (r12.weights1, r12.weights2, r13.weights2)
    lam = np.asarray(lam, dtype=np.complex128)
    g = p.gamma
    lhs = (
        embed_shifted(lambda lm: r12(lm), (0, 1), (2,), dims, wts, lam, g)
        @ embed_operator(r13(lam), (0, 2), dims)
        @ embed_shifted(lambda lm: r23(lm), (1, 2), (0,), dims, wts, lam, g)
    )
    rhs = (
        embed_operator(r23(lam), (1, 2), dims)
        @ embed_shifted(lambda lm: r13(lm), (0, 2), (1,), dims, wts, lam, g)
        @ embed_operator(r12(lam), (0, 1), dims)
    )
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
