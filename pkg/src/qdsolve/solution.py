"""Solution spaces of the truncated functional equation.

A non-empty solution set is an affine space F + span(K) over K; it is
carried as a particular vector and a basis of series columns.  The
inconsistent case is represented by ``None`` at call sites, following
the convention that a routine receiving None propagates it.

``canonical_form`` reduces a space to (RREF of the flattened basis,
particular reduced modulo that row space), making equality of affine
sets a plain array comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import Matrix, lin_solve
from .polymat import SeriesMatrix

_INT64 = np.int64


@dataclass
class SolutionSpace:
    particular: SeriesMatrix  # n x 1
    basis: SeriesMatrix  # n x t, columns linearly independent

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def n(self) -> int:
        return self.particular.rows

    @property
    def prec(self) -> int:
        return self.particular.prec

    def member(self, weights) -> SeriesMatrix:
        """The member particular + basis * weights."""
        w = Matrix(self.particular.p, [[int(v)] for v in weights])
        return self.particular + self.basis.rmul_const(w)


def _flatten_cols(m: SeriesMatrix) -> np.ndarray:
    """Columns of a series matrix as rows of an (cols, rows*prec) array."""
    n, t, L = m.rows, m.cols, m.data.shape[2]
    full = np.zeros((n, t, m.prec), dtype=_INT64)
    if L:
        full[:, :, :L] = m.data
    return np.swapaxes(full, 0, 1).reshape(t, n * m.prec)


def canonical_form(space: SolutionSpace) -> tuple[np.ndarray, np.ndarray]:
    """(canonical basis rows, canonical particular) for set comparison."""
    from .linalg import _rref

    p = space.particular.p
    rows = _flatten_cols(space.basis) % p
    red, pivots = _rref(rows.copy(), p, rows.shape[1])
    red = red[: len(pivots)]
    part = _flatten_cols(space.particular)[0] % p
    for i, c in enumerate(pivots):
        if part[c]:
            part = (part - part[c] * red[i]) % p
    return red, part


def spaces_equal(s1: SolutionSpace | None, s2: SolutionSpace | None) -> bool:
    """True when both are the inconsistent marker or the same affine set."""
    if s1 is None or s2 is None:
        return s1 is None and s2 is None
    if (s1.n, s1.prec, s1.particular.p) != (s2.n, s2.prec, s2.particular.p):
        return False
    b1, p1 = canonical_form(s1)
    b2, p2 = canonical_form(s2)
    return b1.shape == b2.shape and np.array_equal(b1, b2) and np.array_equal(p1, p2)


def resolve_affine_family(
    family: SeriesMatrix, cons_coeffs: np.ndarray, cons_const: np.ndarray
) -> SolutionSpace | None:
    """Specialize a parameter-affine family subject to linear constraints.

    ``family`` is n x (1 + P): column 0 the constant part, column 1+t the
    coefficient of parameter t.  Constraints read cons_coeffs @ params +
    cons_const = 0.  Returns the solution space over the remaining
    freedom, or None when the constraints are inconsistent.
    """
    p = family.p
    nparams = family.cols - 1
    if nparams == 0:
        if np.any(cons_const % p):
            return None
        return SolutionSpace(family, SeriesMatrix.zeros(p, family.rows, 0, family.prec))
    sol = lin_solve(
        Matrix(p, cons_coeffs.reshape(-1, nparams)),
        Matrix(p, (-cons_const.reshape(-1, 1)) % p),
    )
    if sol is None:
        return None
    blocks = family.col_slice(1, family.cols)
    particular = family.col(0) + blocks.rmul_const(sol.particular)
    basis = blocks.rmul_const(sol.nullspace)
    return SolutionSpace(particular, basis)
