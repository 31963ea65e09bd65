"""Weight-graded dense tensor algebra on (C^N)^{x n}.

Basis tensors e_{i_0} x ... x e_{i_{n-1}} are indexed lexicographically with
factor 0 as the most significant digit, so an operator on n factors is a
dense complex array of shape (N^n, N^n).  Colors, factors and permutation
letters are 0-based throughout.

The module provides basis/weight bookkeeping, permutation operators and
symmetrizers, numeric rank and column-space comparison, and the two
placement primitives used everywhere else:

* ``embed_operator`` places an operator acting on a subset of factors into
  a larger tensor product (factors may have different dimensions);
* ``embed_shifted`` does the same for operator families whose argument is
  shifted by the weight of a set of spectator factors, realized exactly by
  looping over the weight blocks of those spectators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb, factorial, prod

import numpy as np
from scipy.linalg import null_space

__all__ = [
    "GradedOperator",
    "multi_indices",
    "weight_table",
    "basis_weight",
    "shift_lambda",
    "perm_sign",
    "permutation_operator",
    "transposition",
    "projector_sym",
    "projector_antisym",
    "sym_basis",
    "antisym_basis",
    "kron_sum_weights",
    "complement_basis",
    "numeric_rank",
    "same_column_space",
    "vector_weights",
    "factor_digits",
    "embed_operator",
    "embed_shifted",
]

RANK_TOL = 1e-7


@lru_cache(maxsize=None)
def multi_indices(n_factors: int, n_colors: int) -> np.ndarray:
    """Digit table of shape (N^n, n); row r holds the factor colors of basis r."""
    if n_factors == 0:
        tab = np.zeros((1, 0), dtype=np.intp)
    else:
        grids = np.indices((n_colors,) * n_factors)
        tab = grids.reshape(n_factors, -1).T.copy()
    tab.flags.writeable = False
    return tab


@lru_cache(maxsize=None)
def weight_table(n_factors: int, n_colors: int) -> np.ndarray:
    """Color-count table of shape (N^n, N): row r is the weight of basis r."""
    tab = multi_indices(n_factors, n_colors)
    wt = np.stack([(tab == c).sum(axis=1) for c in range(n_colors)], axis=1)
    wt.flags.writeable = False
    return wt


def basis_weight(indices, n_colors: int) -> np.ndarray:
    """Weight (color counts) of the basis tensor with the given factor colors."""
    out = np.zeros(n_colors, dtype=np.intp)
    for i in indices:
        if not 0 <= i < n_colors:
            raise ValueError(f"color index {i} out of range 0..{n_colors - 1}")
        out[i] += 1
    return out


def shift_lambda(lam, mu, gamma):
    """Shift the dynamical parameter: lambda - gamma * mu, componentwise."""
    lam = np.asarray(lam, dtype=np.complex128)
    mu = np.asarray(mu)
    if lam.shape != mu.shape:
        raise ValueError(f"length mismatch: {lam.shape} vs {mu.shape}")
    return lam - gamma * mu


def perm_sign(images) -> int:
    """Sign of a permutation given as a tuple of images."""
    images = list(images)
    sign = 1
    seen = [False] * len(images)
    for start in range(len(images)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = images[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class GradedOperator:
    """Dense operator on (C^N)^{x n} together with its grading data."""

    n_colors: int
    n_factors: int
    mat: np.ndarray

    def __post_init__(self):
        dim = self.n_colors**self.n_factors
        if self.mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {self.mat.shape} does not match "
                f"{self.n_colors}^{self.n_factors}"
            )

    @classmethod
    def identity(cls, n_factors: int, n_colors: int) -> "GradedOperator":
        dim = n_colors**n_factors
        return cls(n_colors, n_factors, np.eye(dim, dtype=np.complex128))

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        if (self.n_colors, self.n_factors) != (other.n_colors, other.n_factors):
            raise ValueError("operators act on different tensor spaces")
        return GradedOperator(self.n_colors, self.n_factors, self.mat @ other.mat)

    def weight_leakage(self) -> float:
        """Largest |entry| connecting two different total weights.

        Zero (below roundoff) for every h-invariant operator.
        """
        wt = weight_table(self.n_factors, self.n_colors)
        _, code = np.unique(wt, axis=0, return_inverse=True)
        off = code[:, None] != code[None, :]
        if not off.any():
            return 0.0
        return float(np.abs(self.mat[off]).max())


def permutation_operator(images, n_colors: int) -> GradedOperator:
    """Operator sending e_{i_0} x ... x e_{i_{n-1}} to the tensor with factor
    k moved to position images[k].

    For n = 2 and images = (1, 0) this is the flip P.  Satisfies
    op(sigma o rho) = op(sigma) @ op(rho) with (sigma o rho)(k) = sigma(rho(k)).
    """
    images = tuple(images)
    n = len(images)
    if sorted(images) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {images}")
    tab = multi_indices(n, n_colors)
    out_digits = np.empty_like(tab)
    for k, target in enumerate(images):
        out_digits[:, target] = tab[:, k]
    place = n_colors ** np.arange(n - 1, -1, -1)
    flat_out = out_digits @ place
    dim = n_colors**n
    mat = np.zeros((dim, dim), dtype=np.complex128)
    mat[flat_out, np.arange(dim)] = 1.0
    return GradedOperator(n_colors, n, mat)


def transposition(n_factors: int, a: int, b: int) -> tuple:
    """Images tuple of the transposition (a b) in S_{n_factors}."""
    images = list(range(n_factors))
    images[a], images[b] = images[b], images[a]
    return tuple(images)


def projector_sym(n_factors: int, n_colors: int) -> GradedOperator:
    """Orthogonal projector onto symmetric tensors, (1/n!) sum_sigma op(sigma)."""
    dim = n_colors**n_factors
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for images in permutations(range(n_factors)):
        acc += permutation_operator(images, n_colors).mat
    return GradedOperator(n_colors, n_factors, acc / factorial(n_factors))


def projector_antisym(n_factors: int, n_colors: int) -> GradedOperator:
    """Orthogonal projector onto antisymmetric tensors, (1/n!) sum_sigma eps(sigma) op(sigma)."""
    dim = n_colors**n_factors
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for images in permutations(range(n_factors)):
        acc += perm_sign(images) * permutation_operator(images, n_colors).mat
    return GradedOperator(n_colors, n_factors, acc / factorial(n_factors))


@lru_cache(maxsize=None)
def sym_basis(n_factors: int, n_colors: int):
    """Orthonormal weight-pure basis of the symmetric subspace.

    Returns ``(basis, weights)`` where basis has shape (N^n, C(N+n-1, n)) and
    weights holds one weight row per column.  Each column is the normalized
    sum of the basis tensors with a fixed color multiset, so the zero-weight
    column (when present) is the normalized symmetric zero-weight sum.
    """
    wt = weight_table(n_factors, n_colors)
    uniq, first, inverse = np.unique(wt, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")  # columns in first-appearance order
    dim = n_colors**n_factors
    basis = np.zeros((dim, len(uniq)), dtype=np.complex128)
    for col, g in enumerate(order):
        rows = np.nonzero(inverse == g)[0]
        basis[rows, col] = 1.0 / np.sqrt(len(rows))
    wts = uniq[order].copy()
    basis.flags.writeable = False
    wts.flags.writeable = False
    return basis, wts


@lru_cache(maxsize=None)
def antisym_basis(n_factors: int, n_colors: int):
    """Orthonormal basis of antisymmetric tensors plus the column weights.

    Columns are normalized alternating sums over color subsets of size n;
    empty when n > N.
    """
    from itertools import combinations

    dim = n_colors**n_factors
    subsets = list(combinations(range(n_colors), n_factors))
    basis = np.zeros((dim, len(subsets)), dtype=np.complex128)
    wts = np.zeros((len(subsets), n_colors), dtype=np.intp)
    place = n_colors ** np.arange(n_factors - 1, -1, -1)
    norm = 1.0 / np.sqrt(factorial(n_factors))
    for col, colors in enumerate(subsets):
        for images in permutations(range(n_factors)):
            digits = [colors[images[k]] for k in range(n_factors)]
            flat = int(np.dot(digits, place))
            basis[flat, col] = perm_sign(images) * norm
        wts[col, list(colors)] = 1
    basis.flags.writeable = False
    wts.flags.writeable = False
    return basis, wts


def kron_sum_weights(w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """Weights of a tensor-product basis: row (i, j) holds w1[i] + w2[j]."""
    w1 = np.asarray(w1, dtype=np.intp)
    w2 = np.asarray(w2, dtype=np.intp)
    return np.repeat(w1, len(w2), axis=0) + np.tile(w2, (len(w1), 1))


def complement_basis(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)`` in C^dim."""
    if basis.size == 0:
        return np.eye(dim, dtype=np.complex128)
    out = null_space(basis.conj().T)
    return np.asarray(out, dtype=np.complex128)


def _as_matrix(a) -> np.ndarray:
    return np.asarray(getattr(a, "mat", a))


def numeric_rank(a, rel_tol: float = RANK_TOL, floor: float = 0.0) -> int:
    """Number of singular values above rel_tol times the largest one.

    ``floor`` is an optional absolute threshold for callers that must tell a
    roundoff-level zero matrix (all singular values comparable and tiny, where
    a purely relative cut would count noise) apart from a genuine low rank.
    """
    mat = _as_matrix(a)
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > max(rel_tol * s[0], floor)))


def same_column_space(a, b, rel_tol: float = RANK_TOL) -> bool:
    """True iff the two matrices have equal rank and col(b) lies in col(a)."""
    amat, bmat = _as_matrix(a), _as_matrix(b)
    ra, rb = numeric_rank(amat, rel_tol), numeric_rank(bmat, rel_tol)
    if ra != rb:
        return False
    if ra == 0:
        return True
    u, s, _ = np.linalg.svd(amat, full_matrices=False)
    ua = u[:, :ra]
    resid = bmat - ua @ (ua.conj().T @ bmat)
    return bool(np.linalg.norm(resid) <= rel_tol * np.linalg.norm(bmat))


@lru_cache(maxsize=None)
def vector_weights(n_colors: int) -> np.ndarray:
    """Weights of the standard basis of C^N (basis vector j has weight omega_j)."""
    wt = np.eye(n_colors, dtype=np.intp)
    wt.flags.writeable = False
    return wt


@lru_cache(maxsize=None)
def factor_digits(dims: tuple) -> tuple:
    """Per-factor digit arrays for the mixed-radix basis enumeration of ``dims``."""
    total = prod(dims) if dims else 1
    flat = np.arange(total)
    out = []
    for f in range(len(dims)):
        stride = prod(dims[f + 1 :]) if f + 1 < len(dims) else 1
        dig = (flat // stride) % dims[f]
        dig.flags.writeable = False
        out.append(dig)
    return tuple(out)


def embed_operator(mat: np.ndarray, positions, dims) -> np.ndarray:
    """Place ``mat`` on the listed factors of a tensor product with the given
    per-factor dimensions, acting as the identity elsewhere.

    ``positions`` is ordered: axis k of ``mat`` corresponds to factor
    positions[k], so (j, k) and (k, j) give different placements.
    """
    dims = tuple(dims)
    positions = list(positions)
    n = len(dims)
    spect = [f for f in range(n) if f not in positions]
    d_act = prod(dims[f] for f in positions)
    d_sp = prod(dims[f] for f in spect) if spect else 1
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.shape != (d_act, d_act):
        raise ValueError(f"operator shape {mat.shape} does not match factors {positions}")
    big = np.kron(mat, np.eye(d_sp, dtype=np.complex128))
    order = positions + spect
    inv = list(np.argsort(order))
    shape = [dims[f] for f in order]
    t = big.reshape(shape + shape)
    t = t.transpose(inv + [n + i for i in inv])
    total = prod(dims)
    return np.ascontiguousarray(t.reshape(total, total))


def embed_shifted(factory, positions, shift_positions, dims, weights, lam, gamma) -> np.ndarray:
    """Place a dynamically shifted operator family on a tensor product.

    ``factory(lam')`` must return the operator on the ``positions`` factors
    for shifted argument lam'.  The shift is lam - gamma * mu where mu is the
    total weight of the ``shift_positions`` factors of the *input* basis
    tensor; since those factors are spectators the result is well defined and
    is assembled exactly, one spectator weight block at a time.

    ``weights[f]`` is the (dims[f], N) integer weight table of factor f.
    """
    dims = tuple(dims)
    shift_positions = list(shift_positions)
    lam = np.asarray(lam, dtype=np.complex128)
    if not shift_positions:
        return embed_operator(factory(lam), positions, dims)
    if set(shift_positions) & set(positions):
        raise ValueError("shift factors must be spectators of the placed operator")
    digs = factor_digits(dims)
    total = prod(dims)
    key = np.zeros((total, lam.shape[0]), dtype=np.intp)
    for f in shift_positions:
        key += np.asarray(weights[f], dtype=np.intp)[digs[f]]
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    out = np.zeros((total, total), dtype=np.complex128)
    for g in range(len(uniq)):
        cols = np.nonzero(inverse == g)[0]
        block = embed_operator(factory(lam - gamma * uniq[g]), positions, dims)
        out[:, cols] = block[:, cols]
    return out
