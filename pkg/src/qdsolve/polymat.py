"""Matrices with truncated-series entries.

Storage is a dense (rows, cols, L) int64 array of coefficient planes with
L <= prec and the trailing all-zero planes trimmed; entries share one
truncation order.  The matrix product is the naive cubic scheme over the
entries, each pairwise product going through the truncated convolution
backend.
"""

from __future__ import annotations

import numpy as np

from . import instrument
from .convolution import conv_trunc
from .errors import InternalInvariantError
from .linalg import Matrix, mat_inv
from .series import Series

_INT64 = np.int64


def _trim3(data: np.ndarray) -> np.ndarray:
    L = data.shape[2]
    if L == 0 or data[:, :, L - 1].any():
        return data
    keep = data.reshape(-1, L).any(axis=0)
    nz = np.nonzero(keep)[0]
    if len(nz) == 0:
        return data[:, :, :0]
    return data[:, :, : nz[-1] + 1]


class SeriesMatrix:
    __slots__ = ("p", "prec", "data")

    def __init__(self, p: int, data: np.ndarray, prec: int):
        if data.ndim != 3:
            raise ValueError("series matrix data must be 3-dimensional")
        if prec < 0:
            raise ValueError("precision must be nonnegative")
        self.p = p
        self.data = _trim3((data.astype(_INT64) % p)[:, :, :prec])
        self.prec = prec

    @classmethod
    def _mk(cls, p: int, data: np.ndarray, prec: int) -> "SeriesMatrix":
        m = object.__new__(cls)
        m.p = p
        m.data = data
        m.prec = prec
        return m

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int, prec: int) -> "SeriesMatrix":
        return cls._mk(p, np.zeros((rows, cols, 0), dtype=_INT64), prec)

    @classmethod
    def identity(cls, p: int, n: int, prec: int) -> "SeriesMatrix":
        if prec == 0:
            return cls.zeros(p, n, n, 0)
        return cls._mk(p, np.eye(n, dtype=_INT64)[:, :, None], prec)

    @classmethod
    def from_entries(cls, grid, prec: int) -> "SeriesMatrix":
        """Build from a rectangular grid of Series (all over the same field)."""
        rows = len(grid)
        cols = len(grid[0])
        p = grid[0][0].p
        L = 0
        for row in grid:
            for s in row:
                if s.p != p:
                    raise ValueError("mixed fields in series grid")
                L = max(L, len(s.coeffs))
        data = np.zeros((rows, cols, min(L, prec)), dtype=_INT64)
        for i, row in enumerate(grid):
            for j, s in enumerate(row):
                c = s.coeffs[: data.shape[2]]
                data[i, j, : len(c)] = c
        return cls._mk(p, data, prec)

    @classmethod
    def from_coeff_mats(cls, p: int, mats, prec: int, rows: int, cols: int) -> "SeriesMatrix":
        """Build from a list of degree-indexed coefficient matrices."""
        L = min(len(mats), prec)
        data = np.zeros((rows, cols, L), dtype=_INT64)
        for d in range(L):
            m = mats[d]
            data[:, :, d] = m.a if isinstance(m, Matrix) else np.asarray(m, dtype=_INT64)
        return cls._mk(p, _trim3(data % p), prec)

    @classmethod
    def from_series(cls, s: Series) -> "SeriesMatrix":
        return cls._mk(s.p, s.coeffs[None, None, :].copy(), s.prec)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def entry(self, i: int, j: int) -> Series:
        arr = self.data[i, j]
        nz = np.nonzero(arr)[0]
        arr = arr[: nz[-1] + 1] if len(nz) else arr[:0]
        return Series._mk(self.p, arr.copy(), self.prec)

    def coefficient_matrix(self, j: int) -> Matrix:
        if j < 0 or j >= self.prec:
            raise IndexError(f"coefficient {j} outside precision {self.prec}")
        return Matrix._mk(self.p, self.coefficient_array(j).copy())

    def coefficient_array(self, j: int) -> np.ndarray:
        if j < self.data.shape[2]:
            return self.data[:, :, j]
        return np.zeros((self.rows, self.cols), dtype=_INT64)

    def is_zero(self) -> bool:
        return self.data.shape[2] == 0

    def __eq__(self, other):
        return (
            isinstance(other, SeriesMatrix)
            and other.p == self.p
            and other.prec == self.prec
            and other.data.shape == self.data.shape
            and np.array_equal(other.data, self.data)
        )

    def __repr__(self):
        return f"SeriesMatrix({self.rows}x{self.cols} mod x^{self.prec}, p={self.p})"

    def _check_compat(self, other: "SeriesMatrix"):
        if other.p != self.p:
            raise ValueError("series matrices over different fields")

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_compat(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        prec = min(self.prec, other.prec)
        a, b = self.data[:, :, :prec], other.data[:, :, :prec]
        if a.shape[2] < b.shape[2]:
            a, b = b, a
        out = a.copy()
        out[:, :, : b.shape[2]] = (out[:, :, : b.shape[2]] + b) % self.p
        return SeriesMatrix._mk(self.p, _trim3(out), prec)

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return self + (-other)

    def __neg__(self) -> "SeriesMatrix":
        return SeriesMatrix._mk(self.p, (-self.data) % self.p, self.prec)

    def scale(self, c: int) -> "SeriesMatrix":
        c %= self.p
        if c == 0:
            return SeriesMatrix.zeros(self.p, self.rows, self.cols, self.prec)
        instrument.mul_counter.add(self.data.size)
        # scaling by a nonzero unit preserves the support
        return SeriesMatrix._mk(self.p, self.data * c % self.p, self.prec)

    def mul(self, other: "SeriesMatrix", n: int | None = None) -> "SeriesMatrix":
        """Naive cubic matrix product, entries truncated mod x^n."""
        self._check_compat(other)
        if self.cols != other.rows:
            raise ValueError("inner dimensions disagree")
        if n is None:
            n = min(self.prec, other.prec)
        if n > self.prec or n > other.prec:
            raise ValueError("target precision exceeds operand precision")
        p = self.p
        rows, inner, cols = self.rows, self.cols, other.cols
        La = self.data.shape[2]
        Lb = other.data.shape[2]
        Lout = min(n, max(0, La + Lb - 1))
        out = np.zeros((rows, cols, Lout), dtype=_INT64)
        if Lout:
            cap = 2**62 // p
            for i in range(rows):
                di = self.data[i]
                for j in range(cols):
                    dj = other.data[:, j]
                    acc = np.zeros(Lout, dtype=_INT64)
                    pending = 0
                    for l in range(inner):
                        c = conv_trunc(di[l], dj[l], p, n)
                        acc[: len(c)] += c
                        pending += 1
                        if pending >= cap:
                            acc %= p
                            pending = 0
                    out[i, j] = acc % p
        return SeriesMatrix._mk(p, _trim3(out), n)

    def lmul_const(self, M: Matrix) -> "SeriesMatrix":
        """Constant matrix times series matrix."""
        if M.cols != self.rows:
            raise ValueError("dimension mismatch")
        p = self.p
        L = self.data.shape[2]
        instrument.mul_counter.add(M.rows * M.cols * self.cols * L)
        flat = self.data.reshape(self.rows, self.cols * L)
        step = max(1, (2**62) // ((p - 1) * (p - 1) + 1))
        if M.cols <= step:
            out = M.a @ flat % p
        else:
            out = np.zeros((M.rows, flat.shape[1]), dtype=_INT64)
            for i in range(0, M.cols, step):
                out = (out + M.a[:, i : i + step] @ flat[i : i + step]) % p
        return SeriesMatrix._mk(p, _trim3(out.reshape(M.rows, self.cols, L)), self.prec)

    def rmul_const(self, M: Matrix) -> "SeriesMatrix":
        """Series matrix times constant matrix."""
        if self.cols != M.rows:
            raise ValueError("dimension mismatch")
        p = self.p
        L = self.data.shape[2]
        instrument.mul_counter.add(self.rows * self.cols * M.cols * L)
        step = max(1, (2**62) // ((p - 1) * (p - 1) + 1))
        tmp = np.swapaxes(self.data, 1, 2).reshape(self.rows * L, self.cols)
        if self.cols <= step:
            out = tmp @ M.a % p
        else:
            out = np.zeros((tmp.shape[0], M.cols), dtype=_INT64)
            for i in range(0, self.cols, step):
                out = (out + tmp[:, i : i + step] @ M.a[i : i + step]) % p
        out = np.swapaxes(out.reshape(self.rows, L, M.cols), 1, 2)
        return SeriesMatrix._mk(p, _trim3(np.ascontiguousarray(out)), self.prec)

    def delta(self, ctx) -> "SeriesMatrix":
        if self.prec == 0:
            raise ValueError("cannot differentiate a precision-0 matrix")
        L = self.data.shape[2]
        if L <= 1:
            return SeriesMatrix.zeros(self.p, self.rows, self.cols, self.prec - 1)
        g = ctx.gamma_slice(L)
        instrument.mul_counter.add(self.rows * self.cols * (L - 1))
        out = self.data[:, :, 1:] * g[1:] % self.p
        return SeriesMatrix._mk(self.p, _trim3(out), self.prec - 1)

    def sigma(self, ctx) -> "SeriesMatrix":
        if ctx.q == 1 or self.is_zero():
            return self
        L = self.data.shape[2]
        instrument.mul_counter.add(self.rows * self.cols * L)
        # the weights q^i are units, so the support is preserved
        out = self.data * ctx.qpow_slice(L) % self.p
        return SeriesMatrix._mk(self.p, out, self.prec)

    def shift(self, m: int, truncate: bool = False) -> "SeriesMatrix":
        """Multiply (m > 0) or divide (m < 0) every entry by x^m."""
        if m == 0:
            return self
        L = self.data.shape[2]
        if m > 0:
            if L == 0:
                return SeriesMatrix.zeros(self.p, self.rows, self.cols, self.prec + m)
            out = np.zeros((self.rows, self.cols, L + m), dtype=_INT64)
            out[:, :, m:] = self.data
            return SeriesMatrix._mk(self.p, out, self.prec + m)
        d = -m
        if not truncate and np.any(self.data[:, :, :d]):
            raise ValueError(f"division by x^{d} inexact: low-order coefficients nonzero")
        prec = max(self.prec - d, 0)
        return SeriesMatrix._mk(self.p, _trim3(self.data[:, :, d:][:, :, :prec].copy()), prec)

    def truncate(self, n: int) -> "SeriesMatrix":
        if n > self.prec:
            raise ValueError(f"cannot truncate precision {self.prec} up to {n}")
        if n == self.prec:
            return self
        if n >= self.data.shape[2]:
            return SeriesMatrix._mk(self.p, self.data, n)
        return SeriesMatrix._mk(self.p, _trim3(self.data[:, :, :n]), n)

    def as_poly_prec(self, n: int) -> "SeriesMatrix":
        """Lift precision; valid only when the entries are exact polynomials."""
        if n < self.prec:
            return self.truncate(n)
        return SeriesMatrix._mk(self.p, self.data, n)

    def col(self, j: int) -> "SeriesMatrix":
        return SeriesMatrix._mk(self.p, _trim3(self.data[:, j : j + 1, :].copy()), self.prec)

    def col_slice(self, j0: int, j1: int) -> "SeriesMatrix":
        return SeriesMatrix._mk(self.p, _trim3(self.data[:, j0:j1, :].copy()), self.prec)

    @classmethod
    def hstack(cls, parts) -> "SeriesMatrix":
        parts = list(parts)
        p = parts[0].p
        prec = min(m.prec for m in parts)
        rows = parts[0].rows
        L = max(m.data.shape[2] for m in parts)
        cols = sum(m.cols for m in parts)
        data = np.zeros((rows, cols, min(L, prec)), dtype=_INT64)
        at = 0
        for m in parts:
            Lm = min(m.data.shape[2], data.shape[2])
            data[:, at : at + m.cols, :Lm] = m.data[:, :, :Lm]
            at += m.cols
        return cls._mk(p, _trim3(data), prec)

    def inv_newton(self, n: int) -> "SeriesMatrix":
        """Inverse mod x^n by precision-doubling X <- X(2 Id - A X)."""
        if self.rows != self.cols:
            raise ValueError("only square series matrices are invertible")
        if n > self.prec:
            raise ValueError("operand known to lower precision than requested")
        p = self.p
        X = SeriesMatrix._mk(p, mat_inv(self.coefficient_matrix(0)).a[:, :, None], 1)
        s = 1
        while s < n:
            s2 = min(2 * s, n)
            AX = self.truncate(s2).mul(X.as_poly_prec(s2), s2)
            E = SeriesMatrix.identity(p, self.rows, s2).scale(2) - AX
            X = X.as_poly_prec(s2).mul(E, s2)
            s = s2
        if instrument.checks_enabled():
            prod = self.truncate(n).mul(X, n)
            if prod != SeriesMatrix.identity(p, self.rows, n):
                raise InternalInvariantError("Newton inverse residual nonzero")
        return X
