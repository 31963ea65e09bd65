"""Difference operators in the dynamical parameter with matrix coefficients.

An operator A acts on functions f of lambda in C^N with values in C^dim by

    (A f)(lambda) = sum_mu  coeff_A(mu, lambda) . f(lambda - gamma * mu),

where the shifts mu run over a finite set of non-negative integer vectors
and each coefficient is a dim x dim complex matrix (1 x 1 in the scalar
case).  Coefficients are lazy evaluators; operator identities are certified
by sampling coefficients at generic lambda.

Composition follows from the action:

    coeff_{A o B}(rho, lambda)
        = sum_{mu + nu = rho} coeff_A(mu, lambda) . coeff_B(nu, lambda - gamma mu).

The commuting Ruijsenaars family with non-negative integer coupling ell is
provided:

    ruijsenaars_operator(m):  sum_{|J| = m}
        prod_{j in J, k not in J} theta(l_j - l_k + ell*gamma)/theta(l_j - l_k)
        prod_{j in J} Gamma_j,

with Gamma_j the shift of lambda_j by -gamma.  For m = N the coefficient is
an empty product, so the top operator is the plain full shift.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .rmatrix import ModelParams, POLE_TOL, PoleError
from .theta import jtheta

__all__ = [
    "DifferenceOperator",
    "shift_operator",
    "compose",
    "commutator",
    "sn_conjugate",
    "ruijsenaars_operator",
    "max_coeff_difference",
]


class DifferenceOperator:
    """Finite sum of lambda-shifts with lazy matrix coefficients.

    ``terms`` maps shift tuples (non-negative ints, length N) to evaluators
    lambda -> (dim, dim) complex matrix.  Instances are treated as immutable.
    """

    def __init__(self, gamma: complex, dim: int, terms: dict):
        self.gamma = gamma
        self.dim = dim
        self.terms = {tuple(int(c) for c in mu): fn for mu, fn in terms.items()}
        for mu in self.terms:
            if any(c < 0 for c in mu):
                raise ValueError(f"negative shift {mu}")

    @property
    def shifts(self) -> tuple:
        return tuple(sorted(self.terms))

    def coeff(self, mu, lam) -> np.ndarray:
        """Coefficient matrix of the shift by -gamma*mu, evaluated at lam."""
        fn = self.terms.get(tuple(int(c) for c in mu))
        if fn is None:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        out = np.asarray(fn(np.asarray(lam, dtype=np.complex128)), dtype=np.complex128)
        return out.reshape(self.dim, self.dim)

    def apply(self, f, lam) -> np.ndarray:
        """Evaluate (A f)(lambda) for a function f: lambda -> C^dim."""
        lam = np.asarray(lam, dtype=np.complex128)
        out = np.zeros(self.dim, dtype=np.complex128)
        for mu in self.terms:
            out += self.coeff(mu, lam) @ np.asarray(f(lam - self.gamma * np.asarray(mu)))
        return out

    def __matmul__(self, other: "DifferenceOperator") -> "DifferenceOperator":
        return compose(self, other)

    def __sub__(self, other: "DifferenceOperator") -> "DifferenceOperator":
        return _combine(self, other, -1.0)

    def __add__(self, other: "DifferenceOperator") -> "DifferenceOperator":
        return _combine(self, other, 1.0)


def _check_compatible(a: DifferenceOperator, b: DifferenceOperator):
    if a.dim != b.dim:
        raise ValueError(f"value dimensions differ: {a.dim} vs {b.dim}")
    if a.gamma != b.gamma:
        raise ValueError("operators carry different step gamma")


def _combine(a: DifferenceOperator, b: DifferenceOperator, sign: float) -> DifferenceOperator:
    _check_compatible(a, b)
    terms = {}
    for mu in set(a.terms) | set(b.terms):
        def fn(lam, mu=mu):
            return a.coeff(mu, lam) + sign * b.coeff(mu, lam)
        terms[mu] = fn
    return DifferenceOperator(a.gamma, a.dim, terms)


def shift_operator(mu, gamma: complex, dim: int = 1) -> DifferenceOperator:
    """The plain shift Gamma_mu: f(lambda) -> f(lambda - gamma*mu)."""
    eye = np.eye(dim, dtype=np.complex128)
    return DifferenceOperator(gamma, dim, {tuple(mu): lambda lam: eye})


def compose(a: DifferenceOperator, b: DifferenceOperator) -> DifferenceOperator:
    """Operator composition (a after b)."""
    _check_compatible(a, b)
    pieces = {}
    for mu, fa in a.terms.items():
        for nu, fb in b.terms.items():
            rho = tuple(m + n for m, n in zip(mu, nu))
            pieces.setdefault(rho, []).append((mu, nu))
    terms = {}
    for rho, pairs in pieces.items():
        def fn(lam, pairs=pairs):
            acc = np.zeros((a.dim, a.dim), dtype=np.complex128)
            for mu, nu in pairs:
                shifted = lam - a.gamma * np.asarray(mu)
                acc += a.coeff(mu, lam) @ b.coeff(nu, shifted)
            return acc
        terms[rho] = fn
    return DifferenceOperator(a.gamma, a.dim, terms)


def commutator(a: DifferenceOperator, b: DifferenceOperator) -> DifferenceOperator:
    """compose(a, b) - compose(b, a), coefficients merged by shift."""
    return compose(a, b) - compose(b, a)


def sn_conjugate(a: DifferenceOperator, images) -> DifferenceOperator:
    """Conjugate by a permutation of the lambda entries: sigma o A o sigma^{-1}.

    sigma acts on functions by (sigma f)(lambda) = f(sigma^{-1} lambda) with
    (sigma lambda)_i = lambda_{sigma^{-1}(i)}; the value space is untouched.
    The shift mu moves to sigma(mu) and its coefficient is evaluated at
    sigma^{-1} lambda.
    """
    images = tuple(images)
    inv = [0] * len(images)
    for src, dst in enumerate(images):
        inv[dst] = src

    def permute(vec):
        return tuple(vec[inv[i]] for i in range(len(images)))

    terms = {}
    for mu, fn in a.terms.items():
        def conj_fn(lam, fn=fn):
            lam_inv = np.asarray([lam[images[i]] for i in range(len(images))])
            return fn(lam_inv)
        terms[permute(mu)] = conj_fn
    return DifferenceOperator(a.gamma, a.dim, terms)


def ruijsenaars_operator(m: int, ell: int, p: ModelParams) -> DifferenceOperator:
    """The m-th commuting Ruijsenaars difference operator at integer coupling ell."""
    n = p.n_colors
    if not 1 <= m <= n:
        raise ValueError(f"order m must lie in 1..{n}")
    if ell < 0:
        raise ValueError("coupling ell must be non-negative")
    terms = {}
    for subset in combinations(range(n), m):
        mu = tuple(1 if j in subset else 0 for j in range(n))
        comp = tuple(k for k in range(n) if k not in subset)

        def fn(lam, subset=subset, comp=comp):
            if not comp:
                return np.ones((1, 1), dtype=np.complex128)
            d = lam[list(subset)][:, None] - lam[list(comp)][None, :]
            den = jtheta(d, p.theta)
            if np.abs(den).min() < POLE_TOL:
                raise PoleError("lambda not generic for a Ruijsenaars coefficient")
            val = np.prod(jtheta(d + ell * p.gamma, p.theta) / den)
            return np.array([[val]], dtype=np.complex128)

        terms[mu] = fn
    return DifferenceOperator(p.gamma, 1, terms)


def max_coeff_difference(a: DifferenceOperator, b: DifferenceOperator, lams) -> float:
    """Largest |entry| of any coefficient of a - b over the sampled lambdas."""
    _check_compatible(a, b)
    worst = 0.0
    for lam in lams:
        for mu in set(a.terms) | set(b.terms):
            diff = a.coeff(mu, lam) - b.coeff(mu, lam)
            worst = max(worst, float(np.abs(diff).max()))
    return worst
