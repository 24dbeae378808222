"""Newton-iteration solver: gauge to polynomial coefficients and back.

The pipeline: pick (B, V) with A sigma(V) = V B mod x^k and V_0
invertible, lift V to an invertible W solving the associated equation
x^k delta(W) = A sigma(W) - W B mod x^N by a precision-doubling
iteration (each step solves an auxiliary equation whose right side is
the current residual), then solve the polynomial-coefficient equation
x^k delta(Y) = B sigma(Y) + W^(-1) C coefficient by coefficient and
return (W Y, W M).

The good-spectrum condition is a hard precondition here: it makes every
per-coefficient Sylvester step uniquely solvable.  The inverse of the
iterate is maintained incrementally across levels and refreshed by
Newton doubling, and the residual products are computed only on the
window where the residual is supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import instrument
from .errors import InternalInvariantError, SpectrumError
from .linalg import Matrix, mat_inv, sylvester_solve
from .polymat import SeriesMatrix
from .series import QContext
from .solution import SolutionSpace
from .spectrum import diagonalize, good_spectrum

_INT64 = np.int64


@dataclass
class AssociatedData:
    """Polynomial data (B, V) of degree < k with A sigma(V) = V B mod x^k."""

    B: SeriesMatrix
    V: SeriesMatrix


def choose_associated(A: SeriesMatrix, ctx: QContext) -> AssociatedData:
    """B = A mod x^k with V = Id, except in the differential case with
    k > 1 where the splitting construction is required."""
    k = ctx.k
    if k == 1 or ctx.q != 1:
        return AssociatedData(A.truncate(k), SeriesMatrix.identity(A.p, A.rows, k))
    return splitting_lemma(A, ctx)


def splitting_lemma(A: SeriesMatrix, ctx: QContext, seed: int = 0) -> AssociatedData:
    """Diagonal polynomial B and V with V_0 invertible, A V = V B mod x^k.

    Needs k > 1, q = 1 and A_0 with n distinct eigenvalues in K.
    """
    k, p, n = ctx.k, ctx.p, A.rows
    if k <= 1 or ctx.q != 1:
        raise ValueError("splitting construction applies to q = 1 and k > 1 only")
    A0 = A.coefficient_matrix(0)
    P, D0 = diagonalize(A0, seed=seed)
    Pinv = mat_inv(P)
    D = A.truncate(k).lmul_const(Pinv).rmul_const(P)
    roots = [int(D0.a[i, i]) for i in range(n)]
    inv_diff = np.zeros((n, n), dtype=_INT64)
    for l in range(n):
        for m_ in range(n):
            if l != m_:
                instrument.mul_counter.add(instrument.inv_cost(p))
                inv_diff[l, m_] = pow((roots[l] - roots[m_]) % p, p - 2, p)
    Vt = np.zeros((n, n, k), dtype=_INT64)
    Bc = np.zeros((n, n, k), dtype=_INT64)
    Vt[:, :, 0] = np.eye(n, dtype=_INT64)
    Bc[:, :, 0] = D0.a
    Dd = D.data
    Ld = Dd.shape[2]
    for i in range(1, k):
        delta_i = np.zeros((n, n), dtype=_INT64)
        for j in range(1, i + 1):
            if j < Ld:
                instrument.mul_counter.add(n * n * n)
                delta_i = (delta_i - Dd[:, :, j] @ Vt[:, :, i - j]) % p
        for j in range(1, i):
            instrument.mul_counter.add(n * n * n)
            delta_i = (delta_i + Vt[:, :, j] @ Bc[:, :, i - j]) % p
        bd = (-np.diagonal(delta_i)) % p
        Bc[:, :, i] = np.diag(bd)
        instrument.mul_counter.add(n * n)
        Vi = delta_i * inv_diff % p
        np.fill_diagonal(Vi, 0)
        Vt[:, :, i] = Vi
    B = SeriesMatrix(p, Bc, k)
    V = SeriesMatrix(p, Vt, k).lmul_const(P)
    if A.truncate(k).mul(V, k) != V.mul(B, k):
        raise InternalInvariantError("splitting construction residual nonzero")
    return AssociatedData(B, V)


def pol_coeffs_de(P: SeriesMatrix, Q: SeriesMatrix, N: int, ctx: QContext) -> SolutionSpace | None:
    """Solve x^k delta(Y) = P sigma(Y) + Q mod x^N for polynomial P of degree < k.

    Proceeds coefficient by coefficient; each step is one constant linear
    solve.  Returns None as soon as a step is inconsistent.
    """
    k, p, n = ctx.k, ctx.p, P.rows
    if P.data.shape[2] > k:
        raise ValueError("coefficient matrix must be a polynomial of degree < k")
    if Q.prec < N:
        raise ValueError("right-hand side known to lower precision than requested")
    P0 = P.coefficient_matrix(0)
    Pd = P.data
    Ld = Pd.shape[2]
    Qd = Q.data
    Lq = Qd.shape[2]
    eye = np.eye(n, dtype=_INT64)
    Y = np.zeros((n, N), dtype=_INT64)
    basis_parts: list[tuple[int, Matrix]] = []
    scalar = n == 1
    for i in range(N):
        rhs = Qd[:, 0, i].copy() if i < Lq else np.zeros(n, dtype=_INT64)
        for j in range(1, min(k, i + 1)):
            if j < Ld:
                instrument.mul_counter.add(n + n * n)
                rhs = (rhs + Pd[:, :, j] @ (ctx.qpow(i - j) * Y[:, i - j] % p)) % p
        if k == 1:
            M = (ctx.gamma(i) * eye - ctx.qpow(i) * P0.a) % p
            instrument.mul_counter.add(n * n)
        else:
            M = (-ctx.qpow(i) * P0.a) % p
            instrument.mul_counter.add(n * n)
            j = i - k + 1
            if j >= 0:
                instrument.mul_counter.add(n)
                rhs = (rhs - ctx.gamma(j) * Y[:, j]) % p
        if scalar:
            mv, rv = int(M[0, 0]), int(rhs[0])
            if mv == 0:
                if rv:
                    return None
                basis_parts.append((i, Matrix(p, [[1]])))
            else:
                instrument.mul_counter.add(1 + instrument.inv_cost(p))
                Y[0, i] = rv * pow(mv, p - 2, p) % p
            continue
        sol = _lin_solve_arr(M, rhs, p)
        if sol is None:
            return None
        Y[:, i] = sol[0]
        if sol[1].shape[1]:
            basis_parts.append((i, Matrix(p, sol[1])))
    particular = SeriesMatrix(p, Y[:, None, :], N)
    if basis_parts:
        cols = []
        for i, M_i in basis_parts:
            data = np.zeros((n, M_i.cols, i + 1), dtype=_INT64)
            data[:, :, i] = M_i.a
            cols.append(SeriesMatrix(p, data, N))
        basis = SeriesMatrix.hstack(cols)
    else:
        basis = SeriesMatrix.zeros(p, n, 0, N)
    return SolutionSpace(particular, basis)


def _lin_solve_arr(M: np.ndarray, rhs: np.ndarray, p: int):
    from .linalg import lin_solve

    sol = lin_solve(Matrix(p, M), Matrix(p, rhs.reshape(-1, 1)))
    if sol is None:
        return None
    return sol.particular.a[:, 0], sol.nullspace.a


def diff_sylvester(Gamma: SeriesMatrix, B: SeriesMatrix, m: int, N: int, ctx: QContext) -> SeriesMatrix:
    """Solve x^k delta(U) = B sigma(U) - U B + Gamma mod x^N, Gamma = 0 mod x^m.

    For k = 1 or q != 1; each coefficient is one constant Sylvester
    solve, uniquely solvable under the good-spectrum condition.  The
    result satisfies U = 0 mod x^m.
    """
    k, p, n = ctx.k, ctx.p, B.rows
    if not (k <= m < N):
        raise ValueError("window must satisfy k <= m < N")
    B0 = B.coefficient_matrix(0)
    Bd = B.data
    Ld = Bd.shape[2]
    Gd = Gamma.data
    Lg = Gd.shape[2]
    if np.any(Gd[:, :, :m]):
        raise ValueError("right-hand side not divisible by x^m")
    eye = np.eye(n, dtype=_INT64)
    U = np.zeros((n, n, N), dtype=_INT64)
    scalar = n == 1
    b0 = int(B0.a[0, 0]) if scalar else 0
    for i in range(m, N):
        C = Gd[:, :, i].copy() if i < Lg else np.zeros((n, n), dtype=_INT64)
        for j in range(1, min(k, i - m + 1)):
            if j < Ld:
                instrument.mul_counter.add(n * n + 2 * n * n * n)
                C = (C + Bd[:, :, j] @ (ctx.qpow(i - j) * U[:, :, i - j] % p)
                     - U[:, :, i - j] @ Bd[:, :, j]) % p
        if k == 1:
            instrument.mul_counter.add(n * n)
            Ya = (ctx.qpow(i) * B0.a - ctx.gamma(i) * eye) % p
            Za = (-C) % p
        else:
            instrument.mul_counter.add(n * n)
            Ya = ctx.qpow(i) * B0.a % p
            j = i - k + 1
            prev = ctx.gamma(j) * U[:, :, j] % p if j >= m else np.zeros((n, n), dtype=_INT64)
            if j >= m:
                instrument.mul_counter.add(n * n)
            Za = (prev - C) % p
        if scalar:
            # Y x - x B0 = Z collapses to (Y - B0) x = Z
            den = (int(Ya[0, 0]) - b0) % p
            if den == 0:
                raise SpectrumError(
                    f"Sylvester step at index {i} is singular: "
                    "spectra of the step pair intersect"
                )
            instrument.mul_counter.add(1 + instrument.inv_cost(p))
            U[0, 0, i] = int(Za[0, 0]) * pow(den, p - 2, p) % p
            continue
        try:
            X = sylvester_solve(Matrix(p, Ya), B0, Matrix(p, Za))
        except ValueError as e:
            raise SpectrumError(f"Sylvester step at index {i} is singular: {e}") from e
        U[:, :, i] = X.a
    return SeriesMatrix(p, U, N)


def diff_sylvester_differential(
    Gamma: SeriesMatrix, B: SeriesMatrix, m: int, N: int, ctx: QContext
) -> SeriesMatrix:
    """The q = 1, k > 1 variant of the auxiliary solve; B must be diagonal.

    Diagonal entries integrate directly; off-diagonal entries reduce to
    scalar polynomial-coefficient equations, unique because k > 1.
    """
    k, p, n = ctx.k, ctx.p, B.rows
    if ctx.q != 1 or k <= 1:
        raise ValueError("this variant applies to q = 1 and k > 1 only")
    if not (k <= m < N):
        raise ValueError("window must satisfy k <= m < N")
    offdiag = B.data.copy()
    for l in range(n):
        offdiag[l, l, :] = 0
    if np.any(offdiag):
        raise ValueError("B must be diagonal")
    U = np.zeros((n, n, N), dtype=_INT64)
    for i in range(n):
        for j in range(n):
            g = Gamma.entry(i, j)
            if i == j:
                u = ctx.integrate(g.shift(-k))
                arr = u.coeffs[:N]
                U[i, j, : len(arr)] = arr
            else:
                Pij = SeriesMatrix.from_series(B.entry(i, i) - B.entry(j, j))
                sol = pol_coeffs_de(Pij, SeriesMatrix.from_series(g), N, ctx)
                if sol is None:
                    raise SpectrumError(
                        f"auxiliary scalar equation inconsistent at entry ({i}, {j})"
                    )
                if sol.basis.cols:
                    raise InternalInvariantError(
                        "auxiliary scalar solution not unique despite k > 1"
                    )
                arr = sol.particular.data[0, 0, :N]
                U[i, j, : len(arr)] = arr
    return SeriesMatrix(p, U, N)


def _newton_ladder(N: int, k: int) -> list[int]:
    ladder = [N]
    while ladder[-1] > k:
        ladder.append((ladder[-1] + k) // 2)  # ceil((N + k - 1) / 2)
    ladder.reverse()
    return ladder


def newton_ae(A: SeriesMatrix, B: SeriesMatrix, V: SeriesMatrix, N: int, ctx: QContext) -> SeriesMatrix:
    """Lift V (a solution of the associated equation mod x^k, invertible)
    to a solution mod x^N with W = V mod x^k and W_0 invertible."""
    W, _, _ = _newton_ae_impl(A, B, V, N, ctx)
    return W


def _newton_ae_impl(A: SeriesMatrix, B: SeriesMatrix, V: SeriesMatrix, N: int, ctx: QContext):
    k, p, n = ctx.k, ctx.p, A.rows
    if N <= k:
        return V, None, 0
    if A.prec < N:
        raise ValueError("A known to lower precision than requested")
    ladder = _newton_ladder(N, k)
    W = V
    Winv: SeriesMatrix | None = None
    inv_valid = 0
    sylv = diff_sylvester if (k == 1 or ctx.q != 1) else diff_sylvester_differential
    for idx in range(1, len(ladder)):
        target = ladder[idx]
        mprev = ladder[idx - 1]
        At = A.truncate(target)
        Wp = W.as_poly_prec(target)
        Bt = B.as_poly_prec(target)
        R = (
            Wp.delta(ctx).shift(k).truncate(target)
            - At.mul(Wp.sigma(ctx), target)
            + Wp.mul(Bt, target)
        )
        window = target - mprev
        try:
            Rh = R.shift(-mprev)
        except ValueError as e:
            raise InternalInvariantError(
                f"associated-equation residual not divisible by x^{mprev}"
            ) from e
        if Rh.is_zero():
            continue
        need = window
        if Winv is None:
            Winv = Wp.truncate(need).inv_newton(need)
            inv_valid = need
        while inv_valid < need:
            s2 = min(2 * inv_valid, need)
            E = SeriesMatrix.identity(p, n, s2).scale(2) - Wp.truncate(s2).mul(
                Winv.as_poly_prec(s2), s2
            )
            Winv = Winv.as_poly_prec(s2).mul(E, s2)
            inv_valid = s2
        Gh = Winv.as_poly_prec(need).truncate(need).mul(Rh, need)
        Gamma = (-Gh).shift(mprev).truncate(target)
        U = sylv(Gamma, B, mprev, target, ctx)
        # U = 0 mod x^(mprev - k + 1); the strict shift asserts the valuation
        v = mprev - k + 1
        Uh = U.shift(-v)
        WU = Wp.truncate(target - v).mul(Uh, target - v).shift(v)
        W = (Wp + WU.truncate(target)).truncate(target)
        # the update is 0 mod x^v, so Winv still inverts W to that order
        inv_valid = min(inv_valid, v)
    return W.as_poly_prec(N), Winv, inv_valid


def newton_solve(A: SeriesMatrix, C: SeriesMatrix, N: int, ctx: QContext) -> SolutionSpace | None:
    """Generators of the solution space mod x^N via the gauge transform.

    Raises SpectrumError when A_0 lacks a good spectrum at precision N
    (this is distinct from returning None, which reports a consistent
    check that the equation itself has no solution).
    """
    if N < 1:
        raise ValueError("precision must be positive")
    if A.prec < N or C.prec < N:
        raise ValueError("operands known to lower precision than requested")
    p, n = ctx.p, A.rows
    rep = good_spectrum(A.coefficient_matrix(0), ctx, N)
    if not rep.good:
        raise SpectrumError(f"no good spectrum at precision {N}: {rep.reason}")
    # coefficients of A beyond x^N never reach the truncated solution, so
    # lifting by zeros is sound when N < k
    At = A.truncate(N).as_poly_prec(max(N, ctx.k))
    assoc = choose_associated(At, ctx)
    W, Winv, inv_valid = _newton_ae_impl(At, assoc.B, assoc.V, N, ctx)
    Wp = W.as_poly_prec(N) if W.prec < N else W.truncate(N)
    if Winv is None:
        Winv = Wp.inv_newton(N)
    else:
        while inv_valid < N:
            s2 = min(2 * inv_valid, N)
            E = SeriesMatrix.identity(p, n, s2).scale(2) - Wp.truncate(s2).mul(
                Winv.as_poly_prec(s2), s2
            )
            Winv = Winv.as_poly_prec(s2).mul(E, s2)
            inv_valid = s2
    Gamma = Winv.mul(C.truncate(N), N)
    sol = pol_coeffs_de(assoc.B, Gamma, N, ctx)
    if sol is None:
        return None
    return SolutionSpace(Wp.mul(sol.particular, N), Wp.mul(sol.basis, N))
