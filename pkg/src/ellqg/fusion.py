"""Diagram calculus and fusion operators on (C^N)^{x n}.

A diagram is a braid-like wiring of n lines encoded by a word of adjacent
position swaps, bottom crossing first (letters are 0-based: letter a swaps
the lines currently at positions a and a+1).  A crossing of the lines
j (entering from the left) and k contributes the factor

    R(z_j - z_k, lambda - gamma * sum_{l left of the crossing} h^(l))^(jk)

and the diagram evaluates to the product of these factors, bottom crossing
rightmost.  Words inducing the same permutation evaluate to the same
operator (unitarity, the dynamical Yang-Baxter equation, and disjoint-factor
commutation implement the braid relations), and any word in which every
pair of lines crosses exactly once evaluates to the fusion operator W_n.

W_n is also built by a direct recursion; the two specializations

    sym_fusion(n):  W_n at z = (0, gamma, ..., (n-1) gamma)
    ext_fusion(n):  limit of prod_j (z_j - z_{j+1} - gamma) W_n(z)^(n,...,1)
                    at z = ((n-1) gamma, ..., gamma, 0)

project onto the symmetric tensors and kill the complement of the
antisymmetric tensors, respectively.  In the exterior case every adjacent
crossing sits exactly at the pole z = gamma and is replaced by the analytic
residue (which absorbs the vanishing prefactor); the factor relabeling
(n,...,1) is realized by conjugation with the order-reversing permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rmatrix import ModelParams, rmatrix, rmatrix_residue
from .tensorspace import (
    GradedOperator,
    embed_shifted,
    permutation_operator,
    vector_weights,
)

__all__ = [
    "Diagram",
    "eval_diagram",
    "fusion_operator",
    "sym_fusion",
    "ext_fusion",
    "standard_admissible_word",
    "reduced_words",
]


@dataclass(frozen=True)
class Diagram:
    """Wiring diagram of ``n_lines`` lines given by a swap word, bottom first."""

    n_lines: int
    word: tuple

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        for a in self.word:
            if not 0 <= a <= self.n_lines - 2:
                raise ValueError(f"letter {a} out of range 0..{self.n_lines - 2}")

    def crossings(self):
        """Yield (left_line, right_line, left_of_crossing) bottom to top."""
        pos = list(range(self.n_lines))
        for a in self.word:
            j, k = pos[a], pos[a + 1]
            yield j, k, tuple(pos[:a])
            pos[a], pos[a + 1] = pos[a + 1], pos[a]

    def permutation(self):
        """Images tuple: line j at the bottom ends at position images[j] on top."""
        pos = list(range(self.n_lines))
        for a in self.word:
            pos[a], pos[a + 1] = pos[a + 1], pos[a]
        images = [0] * self.n_lines
        for position, line in enumerate(pos):
            images[line] = position
        return tuple(images)

    def is_admissible(self) -> bool:
        """True iff every pair of lines crosses exactly once."""
        seen = set()
        for j, k, _ in self.crossings():
            pair = (min(j, k), max(j, k))
            if pair in seen:
                return False
            seen.add(pair)
        return len(seen) == self.n_lines * (self.n_lines - 1) // 2


def eval_diagram(diagram: Diagram, zs, lam, p: ModelParams) -> GradedOperator:
    """Product of R-matrices represented by a diagram.

    ``zs`` holds one spectral parameter per line.  Raises PoleError if a
    crossing parameter z_j - z_k sits at a pole for the given parameters.
    """
    n = diagram.n_lines
    if len(zs) != n:
        raise ValueError("need one spectral parameter per line")
    dims = (p.n_colors,) * n
    wts = [vector_weights(p.n_colors)] * n
    lam = np.asarray(lam, dtype=np.complex128)
    total = np.eye(p.n_colors**n, dtype=np.complex128)
    for j, k, left in diagram.crossings():
        factor = embed_shifted(
            lambda lm, j=j, k=k: rmatrix(zs[j] - zs[k], lm, p).mat,
            (j, k), left, dims, wts, lam, p.gamma,
        )
        total = factor @ total
    return GradedOperator(p.n_colors, n, total)


def standard_admissible_word(n: int) -> tuple:
    """A fixed reduced word for the order-reversing permutation: every pair
    of lines crosses exactly once."""
    word = []
    for k in range(1, n):
        word.extend(range(k - 1, -1, -1))
    return tuple(word)


def reduced_words(diagram_perm, n: int):
    """All swap words of minimal length inducing the given permutation.

    ``diagram_perm`` is an images tuple as returned by Diagram.permutation().
    Enumerated by depth-first search over position states, crossing each
    still-inverted adjacent pair; every generated word crosses any pair at
    most once, so all words are reduced.
    """
    target = tuple(diagram_perm)
    out = []

    def rec(pos, word):
        images = [0] * n
        for position, line in enumerate(pos):
            images[line] = position
        if tuple(images) == target:
            out.append(tuple(word))
            return
        for a in range(n - 1):
            # cross only pairs the target still wants inverted
            if target[pos[a]] > target[pos[a + 1]]:
                pos[a], pos[a + 1] = pos[a + 1], pos[a]
                word.append(a)
                rec(pos, word)
                word.pop()
                pos[a], pos[a + 1] = pos[a + 1], pos[a]

    rec(list(range(n)), [])
    return out


def fusion_operator(zs, lam, p: ModelParams) -> GradedOperator:
    """The fusion operator W_n(z, lambda), built by the defining recursion

    W_1 = 1,
    W_n = R(z_0-z_1, lam - g sum_{j>=2} h^(j))^(01) ... R(z_0-z_{n-1}, lam)^(0,n-1)
          (1 x W_{n-1}(z_1..z_{n-1}, lam - g h^(0))).

    Equals eval_diagram on any admissible diagram.
    """
    zs = list(zs)
    n = len(zs)
    if n < 1:
        raise ValueError("need at least one line")
    if n == 1:
        return GradedOperator.identity(1, p.n_colors)
    dims = (p.n_colors,) * n
    wts = [vector_weights(p.n_colors)] * n
    lam = np.asarray(lam, dtype=np.complex128)
    total = embed_shifted(
        lambda lm: fusion_operator(zs[1:], lm, p).mat,
        tuple(range(1, n)), (0,), dims, wts, lam, p.gamma,
    )
    for k in range(n - 1, 0, -1):
        factor = embed_shifted(
            lambda lm, k=k: rmatrix(zs[0] - zs[k], lm, p).mat,
            (0, k), tuple(range(k + 1, n)), dims, wts, lam, p.gamma,
        )
        total = factor @ total
    return GradedOperator(p.n_colors, n, total)


def sym_fusion(n: int, lam, p: ModelParams) -> GradedOperator:
    """W_n at the spectral staircase (0, gamma, ..., (n-1) gamma).

    Every crossing parameter is a negative multiple of gamma, so the product
    is pole-free; the image is the symmetric subspace.
    """
    zs = [j * p.gamma for j in range(n)]
    return fusion_operator(zs, lam, p)


def ext_fusion(n: int, lam, p: ModelParams) -> GradedOperator:
    """Regularized fusion at the reversed staircase ((n-1) gamma, ..., gamma, 0)
    with factor labels reversed; the kernel is the complement of the
    antisymmetric subspace.

    Crossings of lines j < k carry spectral parameter (k-j) gamma; adjacent
    labels sit exactly at the pole and contribute the residue matrix instead
    (one vanishing staircase prefactor per adjacent pair is absorbed there).
    """
    if n < 1:
        raise ValueError("need at least one line")
    N = p.n_colors
    if n == 1:
        return GradedOperator.identity(1, N)
    dims = (N,) * n
    wts = [vector_weights(N)] * n
    lam = np.asarray(lam, dtype=np.complex128)
    diagram = Diagram(n, standard_admissible_word(n))
    total = np.eye(N**n, dtype=np.complex128)
    for j, k, left in diagram.crossings():
        step = k - j  # positive: lines meet in original order in an admissible word
        if step == 1:
            factory = lambda lm: rmatrix_residue(lm, p).mat
        else:
            factory = lambda lm, s=step: rmatrix(s * p.gamma, lm, p).mat
        factor = embed_shifted(factory, (j, k), left, dims, wts, lam, p.gamma)
        total = factor @ total
    rev = permutation_operator(tuple(range(n - 1, -1, -1)), N).mat
    return GradedOperator(N, n, rev @ total @ rev)
