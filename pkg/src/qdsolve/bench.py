"""Benchmark harness: deterministic multiplication counts plus wall time.

Timing noise does not travel between machines, so scaling assertions
work on the field-multiplication counter; wall-clock medians are
reported alongside.  One CSV row per (algorithm, n, N) with the exact
header  algo,n,k,N,q_is_one,p,seed,ms,mul_count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from . import instrument
from .dac import dac_solve
from .newton import newton_solve
from .oracle import ProblemInstance, dense_solve, random_instance

CSV_HEADER = "algo,n,k,N,q_is_one,p,seed,ms,mul_count"

ALGORITHMS = ("dense", "dac", "newton")


@dataclass
class BenchRecord:
    algo: str
    n: int
    k: int
    N: int
    q_is_one: bool
    p: int
    seed: int
    ms: float
    mul_count: int

    def csv_row(self) -> str:
        return (
            f"{self.algo},{self.n},{self.k},{self.N},{int(self.q_is_one)},"
            f"{self.p},{self.seed},{self.ms:.3f},{self.mul_count}"
        )


def _run_algo(algo: str, inst: ProblemInstance):
    if algo == "dense":
        return dense_solve(inst)
    if algo == "dac":
        return dac_solve(inst.A, inst.C, inst.N, inst.ctx)
    if algo == "newton":
        return newton_solve(inst.A, inst.C, inst.N, inst.ctx)
    raise ValueError(f"unknown algorithm {algo!r}")


def bench_case(algo: str, inst: ProblemInstance, seed: int, reps: int = 1) -> BenchRecord:
    """Median-of-reps wall time and the deterministic mul count."""
    times = []
    mul_count = 0
    for _ in range(max(1, reps)):
        instrument.mul_counter.reset()
        t0 = time.perf_counter()
        _run_algo(algo, inst)
        times.append((time.perf_counter() - t0) * 1e3)
        mul_count = instrument.mul_counter.value
    times.sort()
    mid = len(times) // 2
    ms = times[mid] if len(times) % 2 else (times[mid - 1] + times[mid]) / 2
    return BenchRecord(
        algo=algo,
        n=inst.n,
        k=inst.k,
        N=inst.N,
        q_is_one=inst.ctx.q == 1,
        p=inst.p,
        seed=seed,
        ms=ms,
        mul_count=mul_count,
    )


def run_bench(
    ns,
    Ns,
    k: int,
    q_mode: str,
    algos,
    seed: int,
    reps: int,
    p: int,
) -> list[BenchRecord]:
    """One good-spectrum instance per (n, N), shared across the algorithms."""
    records = []
    for n in ns:
        for N in Ns:
            case_seed = seed + 1_000_003 * n + N
            inst = random_instance(
                case_seed, p, n, N, k, q_mode, require_good_spectrum=True
            )
            for algo in algos:
                records.append(bench_case(algo, inst, case_seed, reps))
    return records


def to_csv(records) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"


def fit_loglog_slope(points) -> float:
    """Least-squares slope of log2(y) against log2(x)."""
    pts = [(math.log2(x), math.log2(y)) for x, y in points if y > 0]
    if len(pts) < 2:
        raise ValueError("need at least two points for a slope")
    mx = sum(x for x, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    num = sum((x - mx) * (y - my) for x, y in pts)
    den = sum((x - mx) ** 2 for x, _ in pts)
    return num / den
