"""Command-line front end: solve, check, bench and gen subcommands.

Exit codes: 0 success (an inconsistent system, printed as BOT, is a
valid answer), 1 usage or file-format problems, 2 violated semantic
preconditions (non-prime modulus, zero q, gamma degeneracy, bad
spectrum for the Newton engine), 3 internal invariant violations.
"""

from __future__ import annotations

import argparse
import sys

from .bench import ALGORITHMS, run_bench, to_csv
from .dac import dac_solve
from .errors import (
    InternalInvariantError,
    PreconditionError,
    ProblemFormatError,
    UsageError,
)
from .newton import newton_solve
from .oracle import dense_solve, residual
from .problemfile import (
    parse_problem,
    parse_solution,
    serialize_problem,
    serialize_solution,
)
from .spectrum import singular_indices


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qdsolve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve a problem file")
    ps.add_argument("file", help="problem file path, or - for stdin")
    ps.add_argument("--algo", choices=ALGORITHMS, default="dac")
    ps.add_argument("--out", help="write the solution file here instead of stdout")

    pc = sub.add_parser("check", help="verify a solution file against a problem file")
    pc.add_argument("file", help="problem file path")
    pc.add_argument("solution", help="solution file path")

    pb = sub.add_parser("bench", help="emit scaling data as CSV on stdout")
    pb.add_argument("--n", default="1", help="comma-separated list of system sizes")
    pb.add_argument("--N", default="1024", help="comma-separated list of precisions")
    pb.add_argument("--k", type=int, default=1)
    pb.add_argument("--q-mode", choices=("one", "random"), default="random")
    pb.add_argument("--algos", default="dense,dac,newton")
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--reps", type=int, default=1)
    pb.add_argument("--p", type=int, default=134217757)

    pg = sub.add_parser("gen", help="generate a random problem file on stdout")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--N", type=int, required=True)
    pg.add_argument("--k", type=int, default=1)
    pg.add_argument("--q", default="1", help="an explicit value, or 'random'")
    pg.add_argument("--p", type=int, default=134217757)
    pg.add_argument("--good-spectrum", action="store_true")
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r") as fh:
            return fh.read()
    except OSError as e:
        raise ProblemFormatError(f"cannot read {path}: {e}")


def _cmd_solve(args) -> int:
    inst = parse_problem(_read(args.file))
    if args.algo == "dense":
        space = dense_solve(inst)
    elif args.algo == "dac":
        R = singular_indices(inst.A.coefficient_matrix(0), inst.ctx, inst.N)
        if len(R) > 1:
            print(
                f"warning: {len(R)} singular indices {R}; "
                "the divide-and-conquer cost bound assumes at most one",
                file=sys.stderr,
            )
        space = dac_solve(inst.A, inst.C, inst.N, inst.ctx)
    else:
        space = newton_solve(inst.A, inst.C, inst.N, inst.ctx)
    text = serialize_solution(space, inst.p, inst.n, inst.N)
    if space is None:
        print("BOT", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_check(args) -> int:
    inst = parse_problem(_read(args.file))
    space = parse_solution(_read(args.solution), inst.p, inst.n, inst.N)
    if space is None:
        print("solution file declares BOT; nothing to verify")
        return 0
    res = residual(space.particular, inst)
    if not res.is_zero():
        bad = _first_nonzero_index(res)
        print(f"particular solution fails at coefficient {bad}", file=sys.stderr)
        return 4
    for j in range(space.dim):
        res = residual(space.basis.col(j), inst, homogeneous=True)
        if not res.is_zero():
            bad = _first_nonzero_index(res)
            print(
                f"basis column {j} fails the homogeneous equation at coefficient {bad}",
                file=sys.stderr,
            )
            return 4
    print(f"ok: particular and {space.dim} basis column(s) verified mod x^{inst.N}")
    return 0


def _first_nonzero_index(m) -> int:
    import numpy as np

    nz = np.nonzero(m.data)
    return int(nz[2].min()) if len(nz[2]) else -1


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        vals = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}")
    if not vals:
        raise UsageError(f"empty {what} list")
    return vals


def _cmd_bench(args) -> int:
    ns = _parse_int_list(args.n, "n")
    Ns = _parse_int_list(args.N, "N")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    records = run_bench(ns, Ns, args.k, args.q_mode, algos, args.seed, args.reps, args.p)
    sys.stdout.write(to_csv(records))
    return 0


def _cmd_gen(args) -> int:
    import numpy as np

    from .field import PrimeField
    from .linalg import Matrix
    from .polymat import SeriesMatrix
    from .series import QContext
    from .spectrum import good_spectrum

    if args.n < 1:
        raise UsageError("n must be positive")
    if args.N < 1:
        raise UsageError("N must be positive")
    if args.k < 0:
        raise UsageError("k must be nonnegative")
    gen = np.random.Generator(np.random.Philox(key=args.seed))
    field = PrimeField(args.p)
    if args.q == "random":
        q = int(gen.integers(2, args.p))
    else:
        try:
            q = int(args.q) % args.p
        except ValueError:
            raise UsageError(f"bad q value {args.q!r}")
        if q == 0:
            raise PreconditionError("q must be nonzero mod p")
    Adata = gen.integers(0, args.p, size=(args.n, args.n, args.N), dtype=np.int64)
    Cdata = gen.integers(0, args.p, size=(args.n, 1, args.N), dtype=np.int64)
    if args.good_spectrum and args.k >= 1:
        ctx = QContext(field, q, args.k)
        for attempt in range(501):
            if good_spectrum(Matrix(args.p, Adata[:, :, 0]), ctx, args.N).good:
                break
            if attempt == 500:
                raise PreconditionError("no good-spectrum constant matrix found")
            Adata[:, :, 0] = gen.integers(0, args.p, size=(args.n, args.n), dtype=np.int64)
    # for k = 0 the reduced instance has zero constant matrix, whose
    # spectrum test reduces to the gamma conditions; nothing to reject on
    A = SeriesMatrix(args.p, Adata, args.N)
    C = SeriesMatrix(args.p, Cdata, args.N)
    text = serialize_problem(args.p, q, args.k, args.n, args.N, A, C)
    parse_problem(text)  # validates gamma/field preconditions end to end
    sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "gen":
            return _cmd_gen(args)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ProblemFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except PreconditionError as e:
        print(f"precondition error: {e}", file=sys.stderr)
        return 2
    except InternalInvariantError as e:
        print(f"internal invariant violated: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
