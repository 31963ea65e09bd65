"""Jacobi's first theta function for a fixed modular parameter.

The function evaluated here is

    theta(z) = -sum_{j in Z+1/2} exp(pi*i*j^2*tau + 2*pi*i*j*(z + 1/2)),

with tau in the upper half plane.  Collapsing the symmetric pair
j = +/-(k+1/2) gives the sine series

    theta(z) = 2 * sum_{k>=0} (-1)^k exp(pi*i*tau*(k+1/2)^2) * sin((2k+1)*pi*z),

which is what the evaluator sums.  theta is odd, vanishes on Z + tau*Z, and
satisfies theta(z+1) = -theta(z) and theta(z+tau) = -exp(-pi*i*tau-2*pi*i*z)*theta(z).

All arithmetic is double-precision complex.  z is not reduced to a
fundamental domain first; accuracy degrades once |Im z| is large compared
with Im tau, which does not happen at the argument sizes used in this
package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ThetaParams", "ThetaConvergenceError", "jtheta", "jtheta_dz"]


class ThetaConvergenceError(ArithmeticError):
    """Raised when the series cap is reached before the tail criterion."""


@dataclass(frozen=True)
class ThetaParams:
    """Modular parameter and truncation policy for the theta series.

    Parameters
    ----------
    tau : complex
        Modular parameter, Im(tau) > 0.
    max_terms : int
        Cap on the number of symmetric index pairs summed.
    term_tol : float
        Relative tail cutoff: summation stops once the last two pairs are
        below ``term_tol`` times the largest pair magnitude seen so far.
        Two consecutive pairs are required so that an accidental zero of
        sin((2k+1)*pi*z) cannot truncate the series early.
    """

    tau: complex
    max_terms: int = 200
    term_tol: float = 1e-18

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise ValueError(f"tau must lie in the upper half plane, got {self.tau!r}")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if not 0.0 < self.term_tol < 1.0:
            raise ValueError("term_tol must lie strictly between 0 and 1")


def _series(z, params: ThetaParams, deriv: bool):
    z = np.asarray(z, dtype=np.complex128)
    total = np.zeros(z.shape, dtype=np.complex128)
    runmax = np.zeros(z.shape, dtype=np.float64)
    prev_small = False
    for k in range(params.max_terms):
        half = k + 0.5
        amp = 2.0 * (-1.0) ** k * np.exp(1j * np.pi * params.tau * half * half)
        freq = (2 * k + 1) * np.pi
        if deriv:
            term = amp * freq * np.cos(freq * z)
        else:
            term = amp * np.sin(freq * z)
        total = total + term
        mag = np.abs(term)
        runmax = np.maximum(runmax, mag)
        small = bool(np.all(mag <= params.term_tol * runmax))
        if small and prev_small:
            return total
        prev_small = small
    raise ThetaConvergenceError(
        f"theta series did not meet the tail criterion within {params.max_terms} "
        f"pairs (tau={params.tau!r}); Im(tau) may be too small"
    )


def jtheta(z, params: ThetaParams):
    """Evaluate Jacobi's first theta function at ``z`` (scalar or array)."""
    out = _series(z, params, deriv=False)
    if out.shape == ():
        return complex(out)
    return out


def jtheta_dz(z, params: ThetaParams):
    """Evaluate the z-derivative of Jacobi's first theta function."""
    out = _series(z, params, deriv=True)
    if out.shape == ():
        return complex(out)
    return out
