"""Named property checks over seeded random parameter draws.

Every identity the library implements is exposed here as a check function
mapping a RunConfig to a CheckResult.  Checks draw their randomness from a
PCG64 generator seeded with (config seed, crc32 of the check name), so a
fixed configuration reproduces residuals bit for bit.

``max_residual`` is the largest defect observed.  Checks that also assert
discrete facts (ranks, dimension counts) add 1.0 per failed count, so any
discrete mismatch trips the tolerance no matter how small the continuous
part is.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass, replace
from itertools import combinations
from math import comb

import numpy as np

from . import diffop, emodule, fusion, tensorspace, transfer
from .rmatrix import (
    DEFAULT_GAMMA,
    DEFAULT_TAU,
    ModelParams,
    default_params,
    dybe_sides,
    flip_operator,
    generic_lambda,
    generic_point,
    rmatrix as build_rmatrix,
    rmatrix_gamma_zero_limit,
    rmatrix_residue,
    unitarity_defect,
    weyl_equivariance_defect,
)
from .theta import ThetaParams, jtheta, jtheta_dz

__all__ = ["RunConfig", "CheckResult", "SUITES", "run_suite", "run_checks"]


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a verification run."""

    suite: str = "all"
    n_colors: int = 2
    ell: int = 1
    n_factors: int = 3
    tau: complex = DEFAULT_TAU
    gamma: complex = DEFAULT_GAMMA
    seed: int = 12345
    samples: int = 20
    tol: float | None = None
    out: str = ""

    def __post_init__(self):
        if self.n_colors < 2:
            raise ValueError("N must be at least 2")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not complex(self.tau).imag > 0:
            raise ValueError("tau must lie in the upper half plane")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")
        if self.n_factors < 1:
            raise ValueError("n must be at least 1")

    def params(self, n_colors=None, gamma=None) -> ModelParams:
        return ModelParams(
            n_colors=n_colors or self.n_colors,
            gamma=self.gamma if gamma is None else gamma,
            theta=ThetaParams(tau=self.tau),
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tol: float
    passed: bool
    samples_used: int
    seconds: float


def _rng(cfg: RunConfig, name: str) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((cfg.seed, zlib.crc32(name.encode()))))
    )


def _check(name, tol):
    """Wrap a residual generator into a CheckResult-producing check."""

    def decorate(fn):
        def run(cfg: RunConfig) -> CheckResult:
            start = time.perf_counter()
            effective_tol = cfg.tol if cfg.tol is not None else tol
            residual, samples = fn(cfg, _rng(cfg, name))
            return CheckResult(
                name=name,
                max_residual=float(residual),
                tol=float(effective_tol),
                passed=bool(residual < effective_tol),
                samples_used=int(samples),
                seconds=time.perf_counter() - start,
            )

        run.check_name = name
        return run

    return decorate


def _avoid(p, lo, hi):
    return [k * p.gamma for k in range(lo, hi + 1)]


# ---------------------------------------------------------------- theta --


@_check("theta_oddness", 1e-12)
def theta_oddness(cfg, rng):
    tp = ThetaParams(tau=cfg.tau)
    z = rng.random(100) + 1j * rng.random(100)
    t = jtheta(z, tp)
    res = np.abs(jtheta(-z, tp) + t) / (1.0 + np.abs(t))
    return res.max(), len(z)


@_check("theta_quasi_periods", 1e-10)
def theta_quasi_periods(cfg, rng):
    tp = ThetaParams(tau=cfg.tau)
    z = rng.random(100) + 1j * rng.random(100)
    t = jtheta(z, tp)
    r1 = np.abs(jtheta(z + 1, tp) + t) / (1.0 + np.abs(t))
    factor = -np.exp(-1j * np.pi * tp.tau - 2j * np.pi * z)
    r2 = np.abs(jtheta(z + tp.tau, tp) - factor * t) / (1.0 + np.abs(factor * t))
    return max(r1.max(), r2.max()), len(z)


@_check("theta_lattice_zeros", 1e-10)
def theta_lattice_zeros(cfg, rng):
    tp = ThetaParams(tau=cfg.tau)
    vals = [abs(jtheta(m + n * tp.tau, tp)) for m in (-1, 0, 1) for n in (-1, 0, 1)]
    return max(vals), 9


@_check("theta_derivative_fd", 1e-6)
def theta_derivative_fd(cfg, rng):
    tp = ThetaParams(tau=cfg.tau)
    h = 1e-6
    worst = 0.0
    for _ in range(20):
        z = complex(rng.random(), rng.random())
        fd = (jtheta(z + h, tp) - jtheta(z - h, tp)) / (2 * h)
        dz = jtheta_dz(z, tp)
        worst = max(worst, abs(fd - dz) / abs(dz))
    return worst, 20


# -------------------------------------------------------------- rmatrix --


@_check("dybe_residual", 1e-9)
def dybe_residual(cfg, rng):
    p = cfg.params()
    worst = 0.0
    used = 0
    while used < cfg.samples:
        lam = generic_lambda(rng, p)
        zs = [generic_point(rng, p) for _ in range(3)]
        if any(
            abs(a - b - s * p.gamma) < 1e-3
            for a, b in combinations(zs, 2)
            for s in (1, -1)
        ):
            continue
        lhs, rhs = dybe_sides(*zs, lam, p)
        worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
        used += 1
    return worst, used


@_check("unitarity", 1e-10)
def unitarity(cfg, rng):
    p = cfg.params()
    worst = 0.0
    for _ in range(cfg.samples):
        lam = generic_lambda(rng, p)
        z = generic_point(rng, p, avoid=(p.gamma, -p.gamma))
        worst = max(worst, unitarity_defect(z, lam, p))
    return worst, cfg.samples


@_check("weyl_equivariance", 1e-10)
def weyl_equivariance(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    worst = 0.0
    draws = min(cfg.samples, 10)
    for _ in range(draws):
        lam = generic_lambda(rng, p)
        z = generic_point(rng, p, avoid=(p.gamma,))
        for a in range(n):
            for b in range(a + 1, n):
                images = tensorspace.transposition(n, a, b)
                worst = max(worst, weyl_equivariance_defect(z, lam, images, p))
    return worst, draws


@_check("image_at_minus_gamma", 0.5)
def image_at_minus_gamma(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    lam = generic_lambda(rng, p)
    r = build_rmatrix(-p.gamma, lam, p)
    failures = 0.0
    if tensorspace.numeric_rank(r) != comb(n + 1, 2):
        failures += 1.0
    if not tensorspace.same_column_space(r.mat, tensorspace.projector_sym(2, n).mat):
        failures += 1.0
    return failures, 1


@_check("residue_vs_numeric_limit", 1e-4)
def residue_vs_numeric_limit(cfg, rng):
    p = cfg.params()
    lam = generic_lambda(rng, p)
    eps = 1e-6
    approx = eps * build_rmatrix(p.gamma + eps, lam, p).mat
    exact = rmatrix_residue(lam, p).mat
    return np.linalg.norm(approx - exact) / np.linalg.norm(exact), 1


@_check("residue_kernel", 1e-9)
def residue_kernel(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    lam = generic_lambda(rng, p)
    reg = rmatrix_residue(lam, p).mat
    res = float(np.abs(reg @ tensorspace.projector_sym(2, n).mat).max())
    if tensorspace.numeric_rank(reg) != n * n - comb(n + 1, 2):
        res += 1.0
    return res, 1


@_check("gamma_zero_limits", 1e-3)
def gamma_zero_limits(cfg, rng):
    p = cfg.params(gamma=1e-4)
    n = p.n_colors
    lam = generic_lambda(rng, p)
    eye = np.eye(n * n)
    flip = flip_operator(n).mat
    worst = 0.0
    for k in (1, 2, 3):
        approx = build_rmatrix(-k * p.gamma, lam, p).mat
        exact = rmatrix_gamma_zero_limit(-k, n).mat
        worst = max(worst, np.abs(approx - exact).max())
        if k >= 2:
            approx = build_rmatrix(k * p.gamma, lam, p).mat
            exact = rmatrix_gamma_zero_limit(k, n).mat
            worst = max(worst, np.abs(approx - exact).max())
    rescaled = rmatrix_residue(lam, p).mat / p.gamma
    worst = max(worst, float(np.abs(rescaled - (eye - flip)).max()))
    return worst, 3


@_check("r_h_invariance", 1e-12)
def r_h_invariance(cfg, rng):
    p = cfg.params()
    worst = 0.0
    for _ in range(min(cfg.samples, 10)):
        lam = generic_lambda(rng, p)
        z = generic_point(rng, p, avoid=(p.gamma,))
        worst = max(worst, build_rmatrix(z, lam, p).weight_leakage())
    return worst, min(cfg.samples, 10)


# --------------------------------------------------------------- fusion --


def _generic_zs(rng, p, n):
    while True:
        zs = [generic_point(rng, p) for _ in range(n)]
        ok = all(
            abs(zs[i] - zs[j] - p.gamma) >= 1e-3
            for i in range(n)
            for j in range(n)
            if i != j
        )
        if ok:
            return zs


@_check("word_independence", 1e-9)
def word_independence(cfg, rng):
    p = cfg.params()
    n = min(max(cfg.n_factors, 3), 4)
    target = tuple(range(n - 1, -1, -1))
    words = fusion.reduced_words(target, n)
    worst = 0.0
    for _ in range(5):
        lam = generic_lambda(rng, p)
        zs = _generic_zs(rng, p, n)
        mats = [fusion.eval_diagram(fusion.Diagram(n, w), zs, lam, p).mat for w in words]
        base = mats[0]
        for m in mats[1:]:
            worst = max(worst, np.linalg.norm(m - base) / np.linalg.norm(base))
    return worst, 5


@_check("admissible_diagrams_match_recursion", 1e-9)
def admissible_diagrams_match_recursion(cfg, rng):
    p = cfg.params()
    n = 4
    target = tuple(range(n - 1, -1, -1))
    words = [w for w in fusion.reduced_words(target, n)][:3]
    worst = 0.0
    for _ in range(2):
        lam = generic_lambda(rng, p)
        zs = _generic_zs(rng, p, n)
        rec = fusion.fusion_operator(zs, lam, p).mat
        for w in words:
            dia = fusion.eval_diagram(fusion.Diagram(n, w), zs, lam, p).mat
            worst = max(worst, np.linalg.norm(dia - rec) / np.linalg.norm(rec))
    return worst, 2


FUSION_GRID = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)]


@_check("fusion_rank_counts", 0.5)
def fusion_rank_counts(cfg, rng):
    failures = 0.0
    for n_colors, n in FUSION_GRID:
        p = cfg.params(n_colors=n_colors)
        lam = generic_lambda(rng, p, depth=n + 1)
        ws = fusion.sym_fusion(n, lam, p)
        if tensorspace.numeric_rank(ws) != comb(n_colors + n - 1, n):
            failures += 1.0
        if not tensorspace.same_column_space(
            ws.mat, tensorspace.projector_sym(n, n_colors).mat
        ):
            failures += 1.0
        we = fusion.ext_fusion(n, lam, p)
        if tensorspace.numeric_rank(we, floor=1e-10 * n_colors**n) != comb(n_colors, n):
            failures += 1.0
        jn = tensorspace.complement_basis(
            tensorspace.antisym_basis(n, n_colors)[0], n_colors**n
        )
        if jn.size and np.abs(we.mat @ jn).max() > 1e-9:
            failures += 1.0
    return failures, len(FUSION_GRID)


@_check("sym_fusion_flip_invariance", 1e-9)
def sym_fusion_flip_invariance(cfg, rng):
    worst = 0.0
    for n_colors, n in [(2, 2), (2, 3), (3, 2)]:
        p = cfg.params(n_colors=n_colors)
        lam = generic_lambda(rng, p, depth=n + 1)
        ws = fusion.sym_fusion(n, lam, p).mat
        for j in range(n - 1):
            pop = tensorspace.permutation_operator(
                tensorspace.transposition(n, j, j + 1), n_colors
            ).mat
            worst = max(worst, np.linalg.norm(pop @ ws - ws) / np.linalg.norm(ws))
    return worst, 3


@_check("ext_fusion_antisym_kill", 1e-9)
def ext_fusion_antisym_kill(cfg, rng):
    worst = 0.0
    for n_colors, n in [(2, 2), (2, 3), (3, 2)]:
        p = cfg.params(n_colors=n_colors)
        lam = generic_lambda(rng, p, depth=n + 1)
        we = fusion.ext_fusion(n, lam, p).mat
        eye = np.eye(n_colors**n)
        for j in range(n - 1):
            pop = tensorspace.permutation_operator(
                tensorspace.transposition(n, j, j + 1), n_colors
            ).mat
            worst = max(
                worst,
                np.linalg.norm(we @ (pop + eye)) / (1.0 + np.linalg.norm(we)),
            )
    return worst, 3


@_check("sym_fusion_small_gamma", 1e-3)
def sym_fusion_small_gamma(cfg, rng):
    p = cfg.params(gamma=1e-4)
    n = min(max(cfg.n_factors, 2), 3)
    lam = generic_lambda(rng, p)
    ws = fusion.sym_fusion(n, lam, p).mat
    ps = tensorspace.projector_sym(n, p.n_colors).mat
    return float(np.abs(ws @ ps - ps).max()), 1


@_check("ext_fusion_small_gamma_scalar", 1e-3)
def ext_fusion_small_gamma_scalar(cfg, rng):
    p = cfg.params(gamma=1e-4)
    n = min(max(cfg.n_factors, 2), p.n_colors)
    lam = generic_lambda(rng, p)
    we = fusion.ext_fusion(n, lam, p).mat / p.gamma ** (n - 1)
    ba = tensorspace.antisym_basis(n, p.n_colors)[0]
    block = ba.conj().T @ we @ ba
    scale = abs(block[0, 0])
    if scale <= 1e-3:
        return 1.0, 1
    dev = np.abs(block - block[0, 0] * np.eye(block.shape[0])).max()
    return float(dev / scale), 1


# -------------------------------------------------------------- modules --


@_check("rll_residual", 1e-9)
def rll_residual(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    mods = [
        emodule.vector_module(0.37 + 0.05j, p),
        emodule.tensor_module(emodule.vector_module(0.1, p), emodule.vector_module(0.52, p)),
        emodule.sym_power_module(2, 0.0, p),
        emodule.ext_power_module(2, 0.0, p),
    ]
    worst = 0.0
    draws = min(cfg.samples, 10)
    for _ in range(draws):
        lam = generic_lambda(rng, p, depth=3)
        z1 = generic_point(rng, p, avoid=_avoid(p, -2, 4))
        z2 = generic_point(rng, p, avoid=_avoid(p, -2, 4))
        for mod in mods:
            worst = max(worst, emodule.rll_defect(mod, z1, z2, lam))
    return worst, draws


@_check("tensor_l_matches_chain", 1e-12)
def tensor_l_matches_chain(cfg, rng):
    p = cfg.params()
    n = 3
    w = generic_point(rng, p)
    lam = generic_lambda(rng, p, depth=n + 1)
    z = generic_point(rng, p, avoid=_avoid(p, -1, n + 1))
    mods = [emodule.vector_module(pt, p) for pt in emodule.staircase_points(n, w, p.gamma)]
    iterated = emodule.tensor_module(mods[0], emodule.tensor_module(mods[1], mods[2]))
    diff = iterated.l_op(z, lam) - emodule.vector_power_l(n, w, z, lam, p)
    return float(np.abs(diff).max()), 1


@_check("subspace_preservation", 1e-9)
def subspace_preservation(cfg, rng):
    worst = 0.0
    for n_colors, n in FUSION_GRID:
        p = cfg.params(n_colors=n_colors)
        w = generic_point(rng, p)
        lam = generic_lambda(rng, p, depth=n + 2)
        z = generic_point(rng, p, avoid=_avoid(p, -1, n + 2))
        bs, _ = tensorspace.sym_basis(n, n_colors)
        jb = tensorspace.complement_basis(
            tensorspace.antisym_basis(n, n_colors)[0], n_colors**n
        )
        worst = max(worst, emodule.chain_subspace_leak(n, w, z, lam, p, bs))
        worst = max(worst, emodule.chain_subspace_leak(n, w, z, lam, p, jb))
    return worst, len(FUSION_GRID)


@_check("intertwining_identities", 1e-9)
def intertwining_identities(cfg, rng):
    worst = 0.0
    for n_colors, n in [(2, 2), (2, 3), (3, 2)]:
        p = cfg.params(n_colors=n_colors)
        w = generic_point(rng, p)
        for _ in range(5):
            lam = generic_lambda(rng, p, depth=n + 2)
            z = generic_point(rng, p, avoid=_avoid(p, -2, n + 3))
            d_sym, d_ext = emodule.coproduct_intertwiner_defects(n, w, z, lam, p)
            worst = max(worst, d_sym, d_ext)
    return worst, 15


@_check("top_exterior_l", 1e-9)
def top_exterior_l(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    g = p.gamma
    tp = p.theta
    w = generic_point(rng, p)
    mod = emodule.ext_power_module(n, w, p)
    avoid = [w + k * g for k in range(-2, n + 3)]
    z = generic_point(rng, p, avoid=avoid)
    z2 = generic_point(rng, p, avoid=avoid)
    lam = generic_lambda(rng, p, depth=n + 2)
    big, big2 = mod.l_op(z, lam), mod.l_op(z2, lam)
    res = float(np.abs(big - np.diag(np.diag(big))).max())
    zr = (jtheta(z - w, tp) / jtheta(z - w - (n - 1) * g, tp)) / (
        jtheta(z2 - w, tp) / jtheta(z2 - w - (n - 1) * g, tp)
    )
    res = max(res, abs(big[0, 0] / big2[0, 0] - zr))
    om = np.eye(n)

    def q(i, lm):
        lam_part = np.prod(
            [jtheta(lm[i] - lm[k] - g, tp) / jtheta(lm[i] - lm[k], tp)
             for k in range(n) if k != i]
        )
        c = jtheta(z - w, tp) / jtheta(z - w - (n - 1) * g, tp)
        return mod.l_op(z, lm)[i, i] / (c * lam_part)

    for i in range(n):
        for j in range(i + 1, n):
            lhs = q(i, lam) * q(j, lam - g * om[i])
            rhs = q(j, lam) * q(i, lam - g * om[j])
            res = max(res, abs(lhs - rhs) / abs(rhs))
    return res, 1


@_check("module_rmatrix_is_l", 1e-12)
def module_rmatrix_is_l(cfg, rng):
    p = cfg.params()
    w = generic_point(rng, p)
    lam = generic_lambda(rng, p, depth=3)
    z = generic_point(rng, p, avoid=_avoid(p, -1, 3))
    fused = emodule.fused_product_rmatrix([z], emodule.staircase_points(2, w, p.gamma), p)
    diff = fused(lam) - emodule.vector_power_l(2, w, z, lam, p)
    return float(np.abs(diff).max()), 1


@_check("module_rmatrix_unitarity", 1e-9)
def module_rmatrix_unitarity(cfg, rng):
    p = cfg.params()
    worst = 0.0
    for _ in range(3):
        lam = generic_lambda(rng, p, depth=3)
        z = generic_point(rng, p, avoid=_avoid(p, -2, 3))
        w = generic_point(rng, p)
        worst = max(
            worst,
            emodule.pair_unitarity_defect([z, z + p.gamma], [w], lam, p),
            emodule.pair_unitarity_defect([z, z + p.gamma], [w, w + p.gamma], lam, p),
        )
    return worst, 3


@_check("module_rmatrix_dybe", 1e-9)
def module_rmatrix_dybe(cfg, rng):
    p = cfg.params()
    worst = 0.0
    for _ in range(3):
        lam = generic_lambda(rng, p, depth=3)
        z1 = generic_point(rng, p, avoid=_avoid(p, -2, 3))
        z2 = generic_point(rng, p, avoid=_avoid(p, -2, 3))
        w = generic_point(rng, p)
        worst = max(
            worst, emodule.module_dybe_defect([z1], [z2], [w, w + p.gamma], lam, p)
        )
    return worst, 3


@_check("fused_rmatrix_subspaces", 1e-9)
def fused_rmatrix_subspaces(cfg, rng):
    p = cfg.params(n_colors=2)
    lam = generic_lambda(rng, p, depth=3)
    z = generic_point(rng, p, avoid=_avoid(p, -2, 4))
    w = generic_point(rng, p)
    rm = emodule.fused_product_rmatrix(
        emodule.staircase_points(2, z, p.gamma),
        emodule.staircase_points(2, w, p.gamma),
        p,
    )
    mat = rm(lam)
    res = 0.0
    if tensorspace.numeric_rank(mat) != 16:
        res += 1.0
    bs, _ = tensorspace.sym_basis(2, 2)
    jb = tensorspace.complement_basis(tensorspace.antisym_basis(2, 2)[0], 4)
    for b1 in (np.eye(4), bs, jb):
        for b2 in (np.eye(4), bs, jb):
            sub = np.kron(b1, b2)
            img = mat @ sub
            leak = np.linalg.norm(img - sub @ (sub.conj().T @ img))
            res = max(res, leak / np.linalg.norm(img))
    return res, 1


# ---------------------------------------------------------- ruijsenaars --


@_check("ruijsenaars_commutativity", 1e-8)
def ruijsenaars_commutativity(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    lams = [
        generic_lambda(rng, p, depth=2 * cfg.ell + 1)
        for _ in range(min(cfg.samples, 10))
    ]
    worst = 0.0
    for ma in range(1, n + 1):
        for mb in range(ma + 1, n + 1):
            comm = diffop.commutator(
                diffop.ruijsenaars_operator(ma, cfg.ell, p),
                diffop.ruijsenaars_operator(mb, cfg.ell, p),
            )
            for lam in lams:
                for mu in comm.shifts:
                    worst = max(worst, float(np.abs(comm.coeff(mu, lam)).max()))
    return worst, len(lams)


@_check("ruijsenaars_weyl_symmetry", 1e-10)
def ruijsenaars_weyl_symmetry(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    lams = [generic_lambda(rng, p, depth=cfg.ell + 1) for _ in range(5)]
    worst = 0.0
    for m in range(1, n + 1):
        op = diffop.ruijsenaars_operator(m, cfg.ell, p)
        for a in range(n):
            for b in range(a + 1, n):
                conj = diffop.sn_conjugate(op, tensorspace.transposition(n, a, b))
                worst = max(worst, diffop.max_coeff_difference(conj, op, lams))
    return worst, 5


@_check("gauge_shift_identity", 1e-10)
def gauge_shift_identity(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    ell = max(cfg.ell, 1)
    worst = 0.0
    for _ in range(20):
        lam = generic_lambda(rng, p, depth=2 * ell + 1)
        shifted = lam.copy()
        shifted[0] -= p.gamma
        ratio = transfer.gauge_factor(lam, ell, p) / transfer.gauge_factor(shifted, ell, p)
        want = 1.0
        for k in range(1, n):
            d = lam[0] - lam[k]
            want *= (
                jtheta(d + p.gamma * ell, p.theta)
                * jtheta(d - p.gamma * ell, p.theta)
                / jtheta(d, p.theta) ** 2
            )
        worst = max(worst, abs(ratio - want) / abs(want))
    return worst, 20


@_check("compose_associativity", 1e-10)
def compose_associativity(cfg, rng):
    p = cfg.params()
    m1 = diffop.ruijsenaars_operator(1, 1, p)
    m2 = diffop.ruijsenaars_operator(min(2, p.n_colors), 1, p)
    m3 = diffop.ruijsenaars_operator(1, 2, p)
    left = diffop.compose(diffop.compose(m1, m2), m3)
    right = diffop.compose(m1, diffop.compose(m2, m3))
    lams = [generic_lambda(rng, p, depth=5) for _ in range(3)]
    return diffop.max_coeff_difference(left, right, lams), 3


@_check("ruijsenaars_coefficient_formulas", 1e-12)
def ruijsenaars_coefficient_formulas(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    lam = generic_lambda(rng, p, depth=2)
    res = 0.0
    top = diffop.ruijsenaars_operator(n, cfg.ell, p)
    if top.shifts != ((1,) * n,):
        res += 1.0
    res = max(res, abs(top.coeff((1,) * n, lam)[0, 0] - 1.0))
    for m in range(1, n + 1):
        op0 = diffop.ruijsenaars_operator(m, 0, p)
        for mu in op0.shifts:
            res = max(res, abs(op0.coeff(mu, lam)[0, 0] - 1.0))
    op = diffop.ruijsenaars_operator(1, 1, p)
    mu = (1,) + (0,) * (n - 1)
    want = np.prod(
        [jtheta(lam[0] - lam[k] + p.gamma, p.theta) / jtheta(lam[0] - lam[k], p.theta)
         for k in range(1, n)]
    )
    res = max(res, abs(op.coeff(mu, lam)[0, 0] - want))
    return res, 1


# ------------------------------------------------------------- transfer --


def _sym_module_setup(cfg, rng, p=None):
    p = p or cfg.params()
    n = p.n_colors * cfg.ell
    mod = emodule.sym_power_module(n, 0.0, p)
    avoid = _avoid(p, -p.n_colors, n + p.n_colors + 1)
    z = generic_point(rng, p, avoid=avoid)
    return mod, n, z


@_check("theorem_T_equals_M", 1e-8)
def theorem_t_equals_m(cfg, rng):
    p = cfg.params()
    mod, n, _ = _sym_module_setup(cfg, rng, p)
    m1 = diffop.ruijsenaars_operator(1, cfg.ell, p)
    avoid = _avoid(p, -p.n_colors, n + p.n_colors + 1)
    worst = 0.0
    draws = min(cfg.samples, 10)
    for _ in range(draws):
        lam = generic_lambda(rng, p, depth=n + 2)
        z = generic_point(rng, p, avoid=avoid)
        t = transfer.transfer_matrix(mod, z)
        fac = transfer.ruijsenaars_spectral_factor(z, cfg.ell, p)
        for mu in t.shifts:
            got = t.coeff(mu, lam)[0, 0]
            want = fac * m1.coeff(mu, lam)[0, 0]
            worst = max(worst, abs(got - want) / abs(want))
    return worst, draws


@_check("first_shift_coefficient", 1e-9)
def first_shift_coefficient(cfg, rng):
    p = cfg.params()
    mod, n, z = _sym_module_setup(cfg, rng, p)
    lam = generic_lambda(rng, p, depth=n + 2)
    t = transfer.transfer_matrix(mod, z)
    mu = (1,) + (0,) * (p.n_colors - 1)
    got = t.coeff(mu, lam)[0, 0]
    want = transfer.ruijsenaars_spectral_factor(z, cfg.ell, p)
    for k in range(1, p.n_colors):
        want *= jtheta(lam[0] - lam[k] + cfg.ell * p.gamma, p.theta) / jtheta(
            lam[0] - lam[k], p.theta
        )
    return abs(got - want) / abs(want), 1


@_check("zero_weight_gauge_ratio", 1e-8)
def zero_weight_gauge_ratio(cfg, rng):
    p = cfg.params()
    lam_a = generic_lambda(rng, p, depth=p.n_colors * cfg.ell + 1)
    lam_b = generic_lambda(rng, p, depth=p.n_colors * cfg.ell + 1)
    residual, _ = transfer.gauge_ratio_residual(cfg.ell, lam_a, lam_b, p)
    return residual, 2


@_check("zero_weight_gauge_alignment", 1e-9)
def zero_weight_gauge_alignment(cfg, rng):
    p = cfg.params()
    lam = generic_lambda(rng, p, depth=p.n_colors * cfg.ell + 1)
    _, off = transfer.gauge_ratio_residual(cfg.ell, lam, lam, p)
    return off, 1


@_check("tm_ratio_lambda_independent", 1e-7)
def tm_ratio_lambda_independent(cfg, rng):
    p = cfg.params()
    mod, n, z = _sym_module_setup(cfg, rng, p)
    lams = [generic_lambda(rng, p, depth=n + 2) for _ in range(5)]
    worst = 0.0
    for m in range(1, p.n_colors + 1):
        ratios = transfer.transfer_ruijsenaars_ratio(mod, z, m, cfg.ell, lams)
        values = np.array([v for lst in ratios.values() for v in lst])
        worst = max(worst, float(np.abs(values / values.mean() - 1).max()))
    return worst, len(lams)


@_check("tm_small_gamma_limit", 1e-3)
def tm_small_gamma_limit(cfg, rng):
    # the deviation from 1 is first order in gamma with slope theta'(z)/theta(z);
    # the spectral point sits near the half-period where theta' vanishes
    p = cfg.params(gamma=1e-4)
    mod = emodule.sym_power_module(p.n_colors * cfg.ell, 0.0, p)
    z = 0.5 + 0.02 * (rng.random() - 0.5) + 0.01j * rng.random()
    lams = [generic_lambda(rng, p, depth=3) for _ in range(2)]
    worst = 0.0
    for m in range(1, p.n_colors + 1):
        ratios = transfer.transfer_ruijsenaars_ratio(mod, z, m, cfg.ell, lams)
        values = np.array([v for lst in ratios.values() for v in lst])
        worst = max(worst, float(np.abs(values - 1).max()))
    return worst, len(lams)


@_check("transfer_commutativity", 1e-8)
def transfer_commutativity(cfg, rng):
    p = cfg.params()
    mod, n, z = _sym_module_setup(cfg, rng, p)
    avoid = _avoid(p, -p.n_colors, n + p.n_colors + 1)
    w = generic_point(rng, p, avoid=avoid)
    lams = [
        generic_lambda(rng, p, depth=n + 2)
        for _ in range(min(cfg.samples, 10))
    ]
    worst = 0.0
    for ma in range(1, p.n_colors + 1):
        for mb in range(ma, p.n_colors + 1):
            comm = diffop.commutator(
                transfer.higher_transfer_matrix(mod, z, ma),
                transfer.higher_transfer_matrix(mod, w, mb),
            )
            for lam in lams:
                for mu in comm.shifts:
                    worst = max(worst, float(np.abs(comm.coeff(mu, lam)).max()))
    return worst, len(lams)


@_check("quantum_det_centrality", 1e-8)
def quantum_det_centrality(cfg, rng):
    p = cfg.params()
    n = p.n_colors
    mod = emodule.vector_module(0.0, p)
    avoid = _avoid(p, -n, n + 2)
    z = generic_point(rng, p, avoid=avoid)
    w = generic_point(rng, p, avoid=avoid)
    det_op = transfer.quantum_determinant_op(mod, z)
    lams = [generic_lambda(rng, p, depth=3) for _ in range(3)]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            comm = diffop.commutator(
                det_op, transfer.operator_algebra_generator(mod, w, i, j)
            )
            for lam in lams:
                for mu in comm.shifts:
                    worst = max(worst, float(np.abs(comm.coeff(mu, lam)).max()))
    return worst, len(lams)


@_check("transfer_weyl_symmetric", 1e-9)
def transfer_weyl_symmetric(cfg, rng):
    p = cfg.params()
    mod, n, z = _sym_module_setup(cfg, rng, p)
    t = transfer.transfer_matrix(mod, z)
    lams = [generic_lambda(rng, p, depth=n + 1) for _ in range(5)]
    worst = 0.0
    for a in range(p.n_colors):
        for b in range(a + 1, p.n_colors):
            conj = diffop.sn_conjugate(
                t, tensorspace.transposition(p.n_colors, a, b)
            )
            worst = max(worst, diffop.max_coeff_difference(conj, t, lams))
    return worst, 5


@_check("minor_expansion_consistency", 1e-10)
def minor_expansion_consistency(cfg, rng):
    p = cfg.params()
    mod, n, z = _sym_module_setup(cfg, rng, p)
    lams = [generic_lambda(rng, p, depth=n + 2) for _ in range(3)]
    worst = diffop.max_coeff_difference(
        transfer.minor_expansion_transfer(mod, z, 1),
        transfer.higher_transfer_matrix(mod, z, 1),
        lams,
    )
    if p.n_colors >= 2:
        me = transfer.minor_expansion_transfer(mod, z, 2)
        tf = transfer.higher_transfer_matrix(mod, z, 2)
        ratios = np.array(
            [me.coeff(mu, lam)[0, 0] / tf.coeff(mu, lam)[0, 0]
             for lam in lams for mu in tf.shifts]
        )
        worst = max(worst, float(np.abs(ratios / ratios.mean() - 1).max()))
    return worst, 3


SUITES = {
    "theta": [theta_oddness, theta_quasi_periods, theta_lattice_zeros, theta_derivative_fd],
    "rmatrix": [
        dybe_residual,
        unitarity,
        weyl_equivariance,
        image_at_minus_gamma,
        residue_vs_numeric_limit,
        residue_kernel,
        gamma_zero_limits,
        r_h_invariance,
    ],
    "fusion": [
        word_independence,
        admissible_diagrams_match_recursion,
        fusion_rank_counts,
        sym_fusion_flip_invariance,
        ext_fusion_antisym_kill,
        sym_fusion_small_gamma,
        ext_fusion_small_gamma_scalar,
    ],
    "modules": [
        rll_residual,
        tensor_l_matches_chain,
        subspace_preservation,
        intertwining_identities,
        top_exterior_l,
        module_rmatrix_is_l,
        module_rmatrix_unitarity,
        module_rmatrix_dybe,
        fused_rmatrix_subspaces,
    ],
    "ruijsenaars": [
        ruijsenaars_commutativity,
        ruijsenaars_weyl_symmetry,
        gauge_shift_identity,
        compose_associativity,
        ruijsenaars_coefficient_formulas,
    ],
    "transfer": [
        theorem_t_equals_m,
        first_shift_coefficient,
        zero_weight_gauge_ratio,
        zero_weight_gauge_alignment,
        tm_ratio_lambda_independent,
        tm_small_gamma_limit,
        transfer_commutativity,
        quantum_det_centrality,
        transfer_weyl_symmetric,
        minor_expansion_consistency,
    ],
}
SUITES["all"] = [fn for name in ("theta", "rmatrix", "fusion", "modules", "ruijsenaars", "transfer")
                 for fn in SUITES[name]]


def run_checks(cfg: RunConfig, checks) -> list:
    return [fn(cfg) for fn in checks]


def run_suite(cfg: RunConfig) -> dict:
    """Run a named suite and assemble the report dictionary."""
    if cfg.suite not in SUITES:
        raise ValueError(f"unknown suite {cfg.suite!r}; choose from {sorted(SUITES)}")
    results = run_checks(cfg, SUITES[cfg.suite])
    report = {
        "config": {
            "suite": cfg.suite,
            "N": cfg.n_colors,
            "ell": cfg.ell,
            "n": cfg.n_factors,
            "tau_re": complex(cfg.tau).real,
            "tau_im": complex(cfg.tau).imag,
            "gamma_re": complex(cfg.gamma).real,
            "gamma_im": complex(cfg.gamma).imag,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "tol": cfg.tol,
            "out": cfg.out,
        },
        "checks": [
            {
                "name": r.name,
                "max_residual": r.max_residual,
                "tol": r.tol,
                "pass": r.passed,
                "samples_used": r.samples_used,
                "wall_time_s": r.seconds,
            }
            for r in results
        ],
        "pass": all(r.passed for r in results),
        "version": "0.1.0",
    }
    return report
