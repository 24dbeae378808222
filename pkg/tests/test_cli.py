import subprocess
import sys

from qdsolve.cli import main
from qdsolve.problemfile import parse_problem, parse_solution

EXP_PROBLEM = """\
# exponential through the order reduction: A = x, C = 0
p: 101
q: 1
k: 1
n: 1
N: 4
A[1]:
1
"""

HYPERGEOM_STYLE = """\
p: 101
q: 1
k: 1
n: 2
N: 4
A[0]:
0 0
1 96
C[0]:
0 0
"""


def run_cli(args, stdin_text=None, capsys=None):
    import io
    from contextlib import redirect_stdout, redirect_stderr

    out, err = io.StringIO(), io.StringIO()
    old_stdin = sys.stdin
    try:
        if stdin_text is not None:
            sys.stdin = io.StringIO(stdin_text)
        with redirect_stdout(out), redirect_stderr(err):
            code = main(args)
    finally:
        sys.stdin = old_stdin
    return code, out.getvalue(), err.getvalue()


def test_solve_exponential_file(tmp_path):
    prob = tmp_path / "exp.prob"
    prob.write_text(EXP_PROBLEM)
    code, out, err = run_cli(["solve", str(prob), "--algo", "dac"])
    assert code == 0
    assert "status: ok" in out and "t: 1" in out
    sol = parse_solution(out, 101, 1, 4)
    col = sol.basis.entry(0, 0)
    assert [col.coeff(i) for i in range(4)] == [1, 1, 51, 17]


def test_solve_all_engines_agree_on_file(tmp_path):
    from qdsolve.solution import spaces_equal

    prob = tmp_path / "p.prob"
    prob.write_text(EXP_PROBLEM)
    spaces = []
    for algo in ("dense", "dac", "newton"):
        code, out, _ = run_cli(["solve", str(prob), "--algo", algo])
        assert code == 0
        spaces.append(parse_solution(out, 101, 1, 4))
    assert spaces_equal(spaces[0], spaces[1]) and spaces_equal(spaces[0], spaces[2])


def test_solve_inconsistent_prints_bot(tmp_path):
    prob = tmp_path / "bot.prob"
    prob.write_text("p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nC[0]:\n1\n")
    code, out, err = run_cli(["solve", str(prob)])
    assert code == 0
    assert "status: bot" in out
    assert "BOT" in err


def test_solve_newton_bad_spectrum_exit_2(tmp_path):
    prob = tmp_path / "bad.prob"
    prob.write_text(
        "p: 101\nq: 1\nk: 1\nn: 2\nN: 12\nA[0]:\n0 0\n1 96\nC[0]:\n0 0\n"
    )
    code, out, err = run_cli(["solve", str(prob), "--algo", "newton"])
    assert code == 2
    assert "spectrum" in err.lower()
    # the same instance is fine under dac
    code, out, err = run_cli(["solve", str(prob), "--algo", "dac"])
    assert code == 0


def test_check_round_trip(tmp_path):
    prob = tmp_path / "p.prob"
    sol = tmp_path / "s.sol"
    prob.write_text(HYPERGEOM_STYLE)
    code, out, _ = run_cli(["solve", str(prob), "--out", str(sol)])
    assert code == 0
    code, out, _ = run_cli(["check", str(prob), str(sol)])
    assert code == 0


def test_check_detects_perturbation(tmp_path):
    prob = tmp_path / "p.prob"
    sol = tmp_path / "s.sol"
    prob.write_text(EXP_PROBLEM)
    run_cli(["solve", str(prob), "--out", str(sol)])
    text = sol.read_text()
    lines = text.splitlines()
    # bump one basis coefficient
    for i, ln in enumerate(lines):
        if ln.startswith("basis[2]"):
            lines[i + 1] = str((int(lines[i + 1]) + 1) % 101)
            break
    sol.write_text("\n".join(lines) + "\n")
    code, out, err = run_cli(["check", str(prob), str(sol)])
    assert code != 0
    assert "coefficient 2" in err


def test_check_truncated_solution_is_parse_error(tmp_path):
    prob = tmp_path / "p.prob"
    sol = tmp_path / "s.sol"
    prob.write_text(EXP_PROBLEM)
    sol.write_text("status: ok\np: 101\nn: 1\nN: 2\nt: 0\nparticular[0]:\n0\n")
    code, out, err = run_cli(["check", str(prob), str(sol)])
    assert code == 1


def test_gen_idempotent_and_solvable(tmp_path):
    code1, out1, _ = run_cli(["gen", "--seed", "5", "--n", "2", "--N", "6", "--k", "1", "--q", "random"])
    code2, out2, _ = run_cli(["gen", "--seed", "5", "--n", "2", "--N", "6", "--k", "1", "--q", "random"])
    assert code1 == code2 == 0
    assert out1 == out2
    prob = tmp_path / "g.prob"
    prob.write_text(out1)
    code, out, _ = run_cli(["solve", str(prob), "--algo", "dense"])
    assert code == 0


def test_gen_good_spectrum_feeds_newton(tmp_path):
    code, out, _ = run_cli(
        ["gen", "--seed", "9", "--n", "2", "--N", "8", "--k", "2",
         "--q", "random", "--good-spectrum"]
    )
    assert code == 0
    prob = tmp_path / "g.prob"
    prob.write_text(out)
    code, _, err = run_cli(["solve", str(prob), "--algo", "newton"])
    assert code == 0, err


def test_gen_usage_errors():
    code, _, err = run_cli(["gen", "--seed", "1", "--n", "0", "--N", "4"])
    assert code == 1
    code, _, err = run_cli(["gen", "--seed", "1", "--n", "1", "--N", "0"])
    assert code == 1


def test_gen_k0_reduction_round_trip(tmp_path):
    code, out, _ = run_cli(["gen", "--seed", "3", "--n", "1", "--N", "5", "--k", "0"])
    assert code == 0
    inst = parse_problem(out)
    assert inst.k == 1 and inst.N == 6  # normalized on load
    prob = tmp_path / "k0.prob"
    prob.write_text(out)
    sol = tmp_path / "k0.sol"
    assert run_cli(["solve", str(prob), "--out", str(sol)])[0] == 0
    assert run_cli(["check", str(prob), str(sol)])[0] == 0


def test_bench_smoke_csv_schema():
    code, out, _ = run_cli(
        ["bench", "--n", "2", "--N", "8", "--k", "1", "--q-mode", "random",
         "--algos", "dense,dac,newton", "--seed", "1", "--reps", "3", "--p", "134217757"]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "algo,n,k,N,q_is_one,p,seed,ms,mul_count"
    assert len(lines) == 4
    for ln in lines[1:]:
        fields = ln.split(",")
        assert len(fields) == 9
        assert fields[0] in ("dense", "dac", "newton")
        assert int(fields[1]) == 2 and int(fields[3]) == 8
        assert float(fields[7]) >= 0
        assert int(fields[8]) > 0


def test_parse_errors_exit_1(tmp_path):
    bad = tmp_path / "bad.prob"
    bad.write_text("p: 101\nq: 1\nk: 1\nn: 1\n")  # missing N
    assert run_cli(["solve", str(bad)])[0] == 1
    bad.write_text("p: 101\nq: 1\nk: 1\nn: 1\nN: 2\nA[0]:\n1 2 3\n")  # wrong count
    assert run_cli(["solve", str(bad)])[0] == 1
    bad.write_text("p: 6\nq: 1\nk: 1\nn: 1\nN: 2\n")  # composite p
    assert run_cli(["solve", str(bad)])[0] == 2
    bad.write_text("p: 101\nq: 0\nk: 1\nn: 1\nN: 2\n")  # zero q
    assert run_cli(["solve", str(bad)])[0] == 2
    bad.write_text("p: 5\nq: 1\nk: 1\nn: 1\nN: 7\n")  # gamma degeneracy
    assert run_cli(["solve", str(bad)])[0] == 2
    assert run_cli(["nosuchcmd"])[0] == 1


def test_round_trip_sweep_all_algorithms(tmp_path):
    # gen | solve | check for a spread of seeds and all engines
    from qdsolve.solution import spaces_equal

    count = 0
    for seed in range(100):
        n = 1 + seed % 3
        N = 3 + seed % 5
        k = (seed // 3) % 3  # includes k = 0 reductions
        args = ["gen", "--seed", str(seed), "--n", str(n), "--N", str(N),
                "--k", str(k), "--q", "random", "--good-spectrum"]
        code, text, _ = run_cli(args)
        assert code == 0
        prob = tmp_path / f"s{seed}.prob"
        prob.write_text(text)
        for algo in ("dense", "dac", "newton"):
            sol = tmp_path / f"s{seed}.{algo}.sol"
            code, _, err = run_cli(["solve", str(prob), "--algo", algo, "--out", str(sol)])
            assert code == 0, (seed, algo, err)
            code, _, err = run_cli(["check", str(prob), str(sol)])
            assert code == 0, (seed, algo, err)
        count += 1
    assert count == 100


def test_solve_from_stdin():
    code, out, _ = run_cli(["solve", "-", "--algo", "dense"], stdin_text=EXP_PROBLEM)
    assert code == 0 and "status: ok" in out


def test_check_accepts_bot_solution(tmp_path):
    prob = tmp_path / "p.prob"
    prob.write_text("p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nC[0]:\n1\n")
    sol = tmp_path / "s.sol"
    code, out, _ = run_cli(["solve", str(prob), "--out", str(sol)])
    assert code == 0 and "status: bot" in sol.read_text()
    code, out, _ = run_cli(["check", str(prob), str(sol)])
    assert code == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qdsolve.cli", "gen", "--seed", "1", "--n", "1", "--N", "3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "p: 134217757" in proc.stdout
