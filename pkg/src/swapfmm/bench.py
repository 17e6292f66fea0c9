"""Timing of the fast and the naive M2L per expansion order."""

from __future__ import annotations

import csv
import time
from dataclasses import astuple, dataclass
from typing import Iterator

import numpy as np

from .kernels import KernelConfig
from .operators import operator_data
from .pipeline import Workspace, m2l_arrays, m2l_naive_arrays
from .verify import random_shifts, random_solids

CSV_HEADER = ("P", "kernel", "ns_per_translation", "batch", "reps")
KERNELS = ("optimized", "naive")


@dataclass
class BenchRecord:
    order: int
    kernel: str
    ns_per_translation: float
    batch: int
    reps: int


def _time(fn, reps):
    t0 = time.perf_counter_ns()
    for _ in range(reps):
        fn()
    return time.perf_counter_ns() - t0


def time_kernel(fn, reps="auto", min_time=0.05) -> tuple[float, int]:
    """Total nanoseconds and repetitions for ``fn``, after one warm-up call.

    With ``reps="auto"`` the count is grown until at least ``min_time``
    seconds of measured work have accumulated.
    """
    fn()
    if reps != "auto":
        return float(_time(fn, int(reps))), int(reps)
    target = min_time * 1e9
    once = max(_time(fn, 1), 1)
    reps = max(1, int(np.ceil(target / once)))
    total = _time(fn, reps)
    while total < target:
        reps *= 2
        total = _time(fn, reps)
    return float(total), reps


def run_bench(
    pmin=1,
    pmax=50,
    batch=None,
    reps="auto",
    kernel="both",
    seed=0,
    config: KernelConfig | None = None,
    min_time=0.05,
) -> Iterator[BenchRecord]:
    """Yield one record per ``(P, kernel)`` for ``P = pmin..pmax``."""
    cfg = config or KernelConfig.default()
    batch = cfg.nu if batch is None else batch
    kernels = KERNELS if kernel == "both" else (kernel,)
    rng = np.random.default_rng(seed)
    ops = operator_data(pmax, cfg)
    ws = Workspace.for_operators(ops)
    for P in range(pmin, pmax + 1):
        src = random_solids(rng, batch, P, cfg.dtype)
        shifts = random_shifts(rng, batch)
        out = np.empty_like(src)
        for name in kernels:
            if name == "optimized":
                fn = lambda: m2l_arrays(ops, src, shifts, P, ws, out)  # noqa: E731
            else:
                fn = lambda: m2l_naive_arrays(src, shifts, P)  # noqa: E731
            total, n = time_kernel(fn, reps, min_time)
            yield BenchRecord(P, name, total / (n * batch), batch, n)


def write_csv(records, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow((r.order, r.kernel, f"{r.ns_per_translation:.1f}", r.batch, r.reps))
        fh.flush()


def read_csv(fh) -> list[BenchRecord]:
    rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    return [
        BenchRecord(int(p), k, float(ns), int(b), int(r)) for p, k, ns, b, r in rows[1:]
    ]


def loglog_slope(records, kernel, pmin, pmax) -> float:
    """Least-squares slope of ``log(ns)`` against ``log(P)`` over ``[pmin, pmax]``."""
    pts = [astuple(r) for r in records if r.kernel == kernel and pmin <= r.order <= pmax]
    if len(pts) < 2:
        raise ValueError(f"need at least two {kernel} records in [{pmin}, {pmax}]")
    P = np.log([p[0] for p in pts])
    t = np.log([p[2] for p in pts])
    return float(np.polyfit(P, t, 1)[0])
