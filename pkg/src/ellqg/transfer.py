"""Transfer matrices of E-modules and the Ruijsenaars identification.

For a module (W, L) the transfer matrix is the difference operator

    T(z) f(lambda) = sum_i L_ii(z, lambda) f(lambda - gamma omega_i)

acting on functions valued in a weight sector of W (the zero-weight space by
default).  The fused family T_m(z) antisymmetrizes m-fold products of
L-matrix elements over column subsets:

    T_m(z) f(l) = sum_{j_1<...<j_m} sum_{s in S_m} eps(s)
        L_{j_s(1) j_1}(z, l - g(w_{j_2}+...+w_{j_m})) ...
        L_{j_s(m) j_m}(z - (m-1) g, l)   f(l - g(w_{j_1}+...+w_{j_m})),

with T_1 = T.  For the symmetric power Sym^{N ell} V(0), whose zero-weight
space is one dimensional, T(z) reproduces the Ruijsenaars operator up to the
scalar theta(z - g ell)/theta(z - g N ell), and T_m(z) is proportional to
the m-th Ruijsenaars operator with a lambda-independent factor g_m(z) that
tends to 1 as gamma -> 0 (``transfer_ruijsenaars_ratio`` measures it).

The top operator T_N carries the quantum determinant:
T_N(z) = phi(l - g h)/phi(l) Det(z, l) Gamma_(1,..,1) with
phi(l) = prod_{i<j} theta(l_i - l_j); the associated shift operator commutes
with every generator L_ij(w, l) Gamma_j of the difference-operator algebra.

``sym_fusion_gauge`` and ``gauge_ratio_residual`` cover the zero-weight
normalization of the symmetric fusion operator: applied to the ordered
zero-weight tensor it returns the symmetric zero-weight sum scaled by a
constant times

    g(lambda) = prod_{j<k} prod_{s=1..ell}
        theta(l_j - l_k + g s) / theta(l_j - l_k - g (s-1)),

and only ratios of the scalar (which cancel the constant) are checked.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from .diffop import DifferenceOperator
from .emodule import EModule, ModuleRMatrix
from .fusion import sym_fusion
from .rmatrix import ModelParams, POLE_TOL, PoleError
from .tensorspace import antisym_basis, perm_sign, weight_table
from .theta import jtheta

__all__ = [
    "transfer_matrix",
    "higher_transfer_matrix",
    "trace_transfer",
    "phi_product",
    "quantum_determinant",
    "quantum_determinant_op",
    "operator_algebra_generator",
    "gauge_factor",
    "sym_fusion_gauge",
    "gauge_ratio_residual",
    "ruijsenaars_spectral_factor",
    "transfer_ruijsenaars_ratio",
]


def _sector_indices(module: EModule, sector):
    if sector == "full":
        return np.arange(module.dim)
    idx = module.sector_indices(sector)
    if len(idx) == 0:
        raise ValueError(f"weight sector {sector!r} of {module.label} is empty")
    return idx


def transfer_matrix(module: EModule, z: complex, sector="zero") -> DifferenceOperator:
    """Transfer matrix of a module: shift omega_i carries the sector block of
    the diagonal matrix element L_ii(z, lambda)."""
    p = module.params
    n = p.n_colors
    idx = _sector_indices(module, sector)
    terms = {}
    for i in range(n):
        mu = tuple(1 if k == i else 0 for k in range(n))

        def fn(lam, i=i):
            blocks = module.l_blocks(z, lam)
            return blocks[i, :, i, :][np.ix_(idx, idx)]

        terms[mu] = fn
    return DifferenceOperator(p.gamma, len(idx), terms)


def exterior_aux_rmatrix(module: EModule, z: complex, m: int) -> ModuleRMatrix:
    """R-matrix with auxiliary space the m-th exterior power of the vector
    representation at z (the quotient of V(z) x ... x V(z+(m-1)g) realized on
    the orthonormal antisymmetric basis) and quantum space ``module``.

    Evaluations are memoized on lambda: the trace-form transfer matrix reads
    several weight sectors of the same evaluation.
    """
    from .emodule import compose_rmatrix_left, module_rmatrix

    p = module.params
    if not 1 <= m <= p.n_colors:
        raise ValueError(f"order m must lie in 1..{p.n_colors}")
    factors = [module_rmatrix(module, z + k * p.gamma) for k in range(m)]

    def build(k):
        if k == m - 1:
            return factors[k]
        return compose_rmatrix_left(factors[k], build(k + 1))

    full = build(0)
    basis, wts = antisym_basis(m, p.n_colors)
    big = np.kron(basis, np.eye(module.dim, dtype=np.complex128))
    cache = {}

    def eval_fn(lam):
        key = np.asarray(lam, dtype=np.complex128).tobytes()
        if key not in cache:
            if len(cache) > 64:
                cache.clear()
            cache[key] = big.conj().T @ full(lam) @ big
        return cache[key]

    return ModuleRMatrix(
        params=p, weights1=wts, weights2=module.weights, eval_fn=eval_fn,
        label=f"R[Ext^{m}V({z}),{module.label}]",
    )


def higher_transfer_matrix(module: EModule, z: complex, m: int, sector="zero") -> DifferenceOperator:
    """The fused transfer matrix T_m(z): the trace of the R-matrix with
    auxiliary space the m-th exterior power of the vector representation,

        T_m(z) f(l) = sum_mu tr_{Ext^m V(z)[mu]} R(l) f(l - g mu),

    a difference operator with one shift per color subset of size m.
    T_1 is transfer_matrix.

    The coefficients are evaluated through the expansion of that trace in L
    matrix elements: with the auxiliary slots at z, z+g, ..., z+(m-1)g, the
    subset-J coefficient is the arrangement average

        (1/m!) sum_{bra, ket arrangements (b, c) of J} sign(b) sign(c)
            L_{b_{m-1} c_{m-1}}(z+(m-1)g, l) ...
            L_{b_0 c_0}(z, l - g(w_{c_1}+...+w_{c_{m-1}})),

    which needs only small End(W) blocks instead of the composed R-matrix
    (``trace_transfer(exterior_aux_rmatrix(...))`` computes the same thing
    and is kept for cross-validation).
    """
    p = module.params
    n = p.n_colors
    if not 1 <= m <= n:
        raise ValueError(f"order m must lie in 1..{n}")
    idx = _sector_indices(module, sector)
    omega = np.eye(n, dtype=np.intp)
    arrangements = list(permutations(range(m)))
    signs = {images: perm_sign(images) for images in arrangements}
    norm = 1.0
    for k in range(2, m + 1):
        norm *= k
    terms = {}
    for subset in combinations(range(n), m):
        mu = tuple(1 if k in subset else 0 for k in range(n))

        def fn(lam, subset=subset):
            lam = np.asarray(lam, dtype=np.complex128)
            cache = {}

            def blocks(k, tail):
                key = (k, tail)
                if key not in cache:
                    shift = sum((omega[j] for j in tail), np.zeros(n, dtype=np.intp))
                    cache[key] = module.l_blocks(z + k * p.gamma, lam - p.gamma * shift)
                return cache[key]

            acc = np.zeros((module.dim, module.dim), dtype=np.complex128)
            for ket in arrangements:
                c = [subset[ket[k]] for k in range(m)]
                tails = [tuple(sorted(c[l] for l in range(k + 1, m))) for k in range(m)]
                for bra in arrangements:
                    b = [subset[bra[k]] for k in range(m)]
                    prod = np.eye(module.dim, dtype=np.complex128)
                    for k in range(m - 1, -1, -1):
                        prod = prod @ blocks(k, tails[k])[b[k], :, c[k], :]
                    acc += signs[bra] * signs[ket] * prod
            return acc[np.ix_(idx, idx)] / norm

        terms[mu] = fn
    return DifferenceOperator(p.gamma, len(idx), terms)


def minor_expansion_transfer(module: EModule, z: complex, m: int, sector="zero") -> DifferenceOperator:
    """Antisymmetrized expansion of T_m(z) in L matrix elements,

        sum_J sum_{s in S_m} eps(s)
            L_{j_s(1) j_1}(z, l - g(w_{j_2}+...+w_{j_m})) ...
            L_{j_s(m) j_m}(z - (m-1) g, l)   Gamma_{j_1} ... Gamma_{j_m},

    with the End(W) factors composed in the written order.  Coincides with
    the trace form for m = 1; on the zero-weight sector of a symmetric power
    it is proportional to it for m = 2 by a lambda- and subset-independent
    factor; for m >= 3 no single ordered expansion reproduces the trace
    form, which is the normative definition.
    """
    p = module.params
    n = p.n_colors
    if not 1 <= m <= n:
        raise ValueError(f"order m must lie in 1..{n}")
    idx = _sector_indices(module, sector)
    omega = np.eye(n, dtype=np.intp)
    terms = {}
    for subset in combinations(range(n), m):
        mu = tuple(1 if k in subset else 0 for k in range(n))

        def fn(lam, subset=subset):
            lam = np.asarray(lam, dtype=np.complex128)
            # position a carries spectral z - a*gamma and the shift by the
            # tail of the subset; neither depends on the permutation
            blocks = []
            for a in range(m):
                tail = sum((omega[j] for j in subset[a + 1:]),
                           np.zeros(n, dtype=np.intp))
                blocks.append(module.l_blocks(z - a * p.gamma, lam - p.gamma * tail))
            acc = np.zeros((module.dim, module.dim), dtype=np.complex128)
            for images in permutations(range(m)):
                prod = np.eye(module.dim, dtype=np.complex128)
                for a in range(m):
                    prod = prod @ blocks[a][subset[images[a]], :, subset[a], :]
                acc += perm_sign(images) * prod
            return acc[np.ix_(idx, idx)]

        terms[mu] = fn
    return DifferenceOperator(p.gamma, len(idx), terms)


def trace_transfer(rmat: ModuleRMatrix, sector="zero") -> DifferenceOperator:
    """Transfer matrix of an R-matrix pair: trace the auxiliary space over
    its weight sectors, T f(l) = sum_mu tr_{W1[mu]} R(l) f(l - g mu)."""
    p = rmat.params
    wts1 = np.asarray(rmat.weights1)
    uniq = np.unique(wts1, axis=0)
    wts2 = np.asarray(rmat.weights2)
    if sector == "full":
        idx = np.arange(rmat.dim2)
    else:
        if sector == "zero":
            idx = np.nonzero((wts2 == wts2[:, :1]).all(axis=1))[0]
        else:
            idx = np.nonzero((wts2 == np.asarray(sector)).all(axis=1))[0]
        if len(idx) == 0:
            raise ValueError("empty weight sector of the quantum space")
    terms = {}
    for mu in uniq:
        rows = np.nonzero((wts1 == mu).all(axis=1))[0]

        def fn(lam, rows=rows):
            mat = rmat(lam).reshape(rmat.dim1, rmat.dim2, rmat.dim1, rmat.dim2)
            acc = np.zeros((rmat.dim2, rmat.dim2), dtype=np.complex128)
            for r in rows:
                acc += mat[r, :, r, :]
            return acc[np.ix_(idx, idx)]

        terms[tuple(int(c) for c in mu)] = fn
    return DifferenceOperator(p.gamma, len(idx), terms)


def phi_product(lam, p: ModelParams) -> complex:
    """phi(lambda) = prod_{i<j} theta(lambda_i - lambda_j)."""
    lam = np.asarray(lam, dtype=np.complex128)
    n = p.n_colors
    val = 1.0 + 0.0j
    for i in range(n):
        for j in range(i + 1, n):
            val *= jtheta(lam[i] - lam[j], p.theta)
    return val


def quantum_determinant(module: EModule, z: complex, lam) -> np.ndarray:
    """The quantum determinant Det(z, lambda) as a matrix on W.

    Defined through the top transfer matrix: the coefficient of the full
    shift in T_N(z) equals phi(l - g h)/phi(l) Det(z, l), where h acts on
    each weight sector by its weight; on the zero-weight sector the
    prefactor is 1 and Det is the coefficient itself.
    """
    p = module.params
    n = p.n_colors
    lam = np.asarray(lam, dtype=np.complex128)
    top = higher_transfer_matrix(module, z, n, sector="full")
    coeff = top.coeff((1,) * n, lam)
    phi0 = phi_product(lam, p)
    if abs(phi0) < POLE_TOL:
        raise PoleError("phi(lambda) vanishes; lambda not generic")
    scale = np.array([
        phi_product(lam - p.gamma * np.asarray(wt), p) / phi0 for wt in module.weights
    ])
    return coeff / scale[:, None]


def quantum_determinant_op(module: EModule, z: complex) -> DifferenceOperator:
    """Det(z, lambda) times the full shift, as a difference operator on
    W-valued functions."""
    p = module.params
    n = p.n_colors
    return DifferenceOperator(
        p.gamma, module.dim,
        {(1,) * n: lambda lam: quantum_determinant(module, z, lam)},
    )


def operator_algebra_generator(module: EModule, w: complex, i: int, j: int) -> DifferenceOperator:
    """The difference-operator algebra generator L_ij(w, lambda) Gamma_j on
    W-valued functions."""
    p = module.params
    n = p.n_colors
    mu = tuple(1 if k == j else 0 for k in range(n))
    return DifferenceOperator(
        p.gamma, module.dim,
        {mu: lambda lam: module.l_blocks(w, lam)[i, :, j, :]},
    )


def gauge_factor(lam, ell: int, p: ModelParams) -> complex:
    """The lambda-dependent zero-weight scale of the symmetric fusion operator,

    g(lambda) = prod_{j<k} prod_{s=1..ell}
        theta(l_j - l_k + g s) / theta(l_j - l_k - g (s-1)).

    Satisfies g(l)/g(l - g omega_0) =
        prod_{k>=1} theta(l_0-l_k + g ell) theta(l_0-l_k - g ell) / theta(l_0-l_k)^2.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    n = p.n_colors
    val = 1.0 + 0.0j
    for j in range(n):
        for k in range(j + 1, n):
            d = lam[j] - lam[k]
            for s in range(1, ell + 1):
                den = jtheta(d - p.gamma * (s - 1), p.theta)
                if abs(den) < POLE_TOL:
                    raise PoleError("lambda not generic for the gauge factor")
                val *= jtheta(d + p.gamma * s, p.theta) / den
    return val


def sym_fusion_gauge(ell: int, lam, p: ModelParams) -> tuple:
    """Apply the symmetric fusion operator of N*ell factors to the ordered
    zero-weight tensor e_0^ell x ... x e_{N-1}^ell.

    Returns ``(scale, off_component)``: the image is scale times the
    symmetric zero-weight sum, and off_component is the relative norm of
    whatever falls outside that line (zero up to roundoff).
    """
    n_colors = p.n_colors
    n = n_colors * ell
    lam = np.asarray(lam, dtype=np.complex128)
    ws = sym_fusion(n, lam, p).mat
    place = n_colors ** np.arange(n - 1, -1, -1)
    ordered_digits = np.repeat(np.arange(n_colors), ell)
    ordered = int(ordered_digits @ place)
    image = ws[:, ordered]
    wt = weight_table(n, n_colors)
    zero_rows = np.nonzero((wt == ell).all(axis=1))[0]
    e_sum = np.zeros(n_colors**n, dtype=np.complex128)
    e_sum[zero_rows] = 1.0
    scale = (e_sum @ image) / (e_sum @ e_sum)
    off = np.linalg.norm(image - scale * e_sum) / np.linalg.norm(image)
    return complex(scale), float(off)


def gauge_ratio_residual(ell: int, lam_a, lam_b, p: ModelParams) -> tuple:
    """Residual of scale(lam_a)/scale(lam_b) against g(lam_a)/g(lam_b)
    (the unknown overall constant cancels in the ratio), plus the largest
    off-line component of the two images."""
    scale_a, off_a = sym_fusion_gauge(ell, lam_a, p)
    scale_b, off_b = sym_fusion_gauge(ell, lam_b, p)
    g_a = gauge_factor(lam_a, ell, p)
    g_b = gauge_factor(lam_b, ell, p)
    # |scale_a/scale_b - g_a/g_b| in cross-multiplied form, so that identical
    # arguments cancel exactly instead of leaving complex-division roundoff
    residual = abs(scale_a * g_b - scale_b * g_a) / abs(scale_b * g_b)
    return residual, max(off_a, off_b)


def ruijsenaars_spectral_factor(z: complex, ell: int, p: ModelParams) -> complex:
    """theta(z - gamma ell) / theta(z - gamma N ell), the scalar relating the
    transfer matrix of Sym^{N ell} V(0) to the first Ruijsenaars operator."""
    num = jtheta(z - p.gamma * ell, p.theta)
    den = jtheta(z - p.gamma * p.n_colors * ell, p.theta)
    if abs(den) < POLE_TOL:
        raise PoleError("spectral parameter at a pole of the identification factor")
    return num / den


def transfer_ruijsenaars_ratio(module: EModule, z: complex, m: int, ell: int, lams) -> dict:
    """Coefficientwise ratio of T_m(z) on the zero-weight sector of
    ``module`` to the m-th Ruijsenaars operator, per subset and lambda.

    Returns {subset shift: [ratio per lambda]}.  For the symmetric power
    Sym^{N ell} V(0) every entry of every list is the same number g_m(z).
    """
    from .diffop import ruijsenaars_operator

    p = module.params
    tm = higher_transfer_matrix(module, z, m)
    mm = ruijsenaars_operator(m, ell, p)
    out = {}
    for mu in tm.shifts:
        out[mu] = [
            complex(tm.coeff(mu, lam)[0, 0] / mm.coeff(mu, lam)[0, 0]) for lam in lams
        ]
    return out
