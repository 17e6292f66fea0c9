"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import threading
from fractions import Fraction

import numpy as np
import pytest

from swapfmm import (
    Solid,
    Workspace,
    direct_potential,
    eval_local,
    l2l_arrays,
    m2l_arrays,
    m2l_naive_arrays,
    m2m_arrays,
    operator_data,
    p2m,
    pack,
    singular,
    swap_matrices,
    unpack,
    wigner_b,
)
from swapfmm.bench import loglog_slope, run_bench
from swapfmm.operators import _b_numerators
from swapfmm.verify import m2l_term_scale, normalized_error, random_shifts, random_solids


def _line(number, title, passed, detail):
    return f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title}  [{detail}]"


# 1 -------------------------------------------------------------------------
def criterion_1(cases=200, seed=1):
    # gate: error / largest term magnitude; "plain" divides by the largest coefficient
    rng = np.random.default_rng(seed)
    ops = operator_data(30)
    ws = Workspace.for_operators(ops)
    worst = {20: 0.0, 30: 0.0, "mixed": 0.0}
    plain = dict(worst)

    def record(key, src, sh, p_out):
        fast = m2l_arrays(ops, src, sh, p_out, ws)
        ref = m2l_naive_arrays(src, sh, p_out)
        scale = m2l_term_scale(src, sh, p_out)
        worst[key] = max(worst[key], normalized_error(fast, ref, scale=scale))
        plain[key] = max(plain[key], normalized_error(fast, ref))

    for P in range(1, 31):
        record(20 if P <= 20 else 30, random_solids(rng, cases, P), random_shifts(rng, cases), P)
    for p_in in range(1, 17):
        for p_out in range(1, 17):
            if p_in != p_out:
                record("mixed", random_solids(rng, cases, p_in), random_shifts(rng, cases), p_out)
    ok = worst[20] <= 1e-12 and worst[30] <= 1e-10 and worst["mixed"] <= 1e-12
    detail = (f"P<=20 {worst[20]:.1e} (tol 1e-12), P<=30 {worst[30]:.1e} (tol 1e-10), "
              f"mixed {worst['mixed']:.1e} (tol 1e-12); relative to largest coefficient: "
              f"{plain[20]:.1e}, {plain[30]:.1e}, {plain['mixed']:.1e}")
    return ok, detail


# 2 -------------------------------------------------------------------------
def _exact_residual(B):
    # B.B - I of the stored float64 table, evaluated without rounding
    Bq = np.vectorize(Fraction)(B).astype(object)
    R = Bq.dot(Bq) - np.eye(B.shape[0], dtype=object)
    return max(abs(float(x)) for x in R.ravel())


def criterion_2():
    exact_ok = True
    for n, N in enumerate(_b_numerators(30)):
        exact_ok &= bool((N.dot(N) == np.eye(2 * n + 1, dtype=object) * 4**n).all())
    # stored float64 tables hold the exact values up to n = 28; n = 29, 30 need > 53 bits
    table_err = max(_exact_residual(wigner_b(n)) for n in range(29))
    table_err_30 = _exact_residual(wigner_b(30))
    structure_ok = pack_ok = True
    for n in range(31):
        F, G = swap_matrices(n)
        par = np.add.outer(np.arange(n + 1), np.arange(n + 1)) % 2
        structure_ok &= not F[par != n % 2].any() and not G[par == n % 2].any()
        structure_ok &= not G[0].any() and not G[:, 0].any()
        for mu in (2, 6, 14):
            pack_ok &= np.array_equal(unpack(pack(F, n, mu, n % 2), n, mu, n % 2), F)
            pack_ok &= np.array_equal(unpack(pack(G, n, mu, 1 - n % 2), n, mu, 1 - n % 2), G)
    F1, G1 = swap_matrices(1)
    small_ok = np.array_equal(F1, [[0, 2], [0.5, 0]]) and np.array_equal(G1, [[0, 0], [0, 1]])
    ok = exact_ok and table_err <= 1e-13 and structure_ok and pack_ok and small_ok
    detail = (f"exact B.B=I n<=30 {exact_ok}, float64 tables n<=28 {table_err:.1e} (tol 1e-13), "
              f"float64 table n=30 {table_err_30:.1e} (not representable, see notes), "
              f"parity/zeros {structure_ok}, pack round trip {pack_ok}, F_1/G_1 {small_ok}")
    return ok, detail


# 3 -------------------------------------------------------------------------
def _z_kernel(M, R, p_out):
    L = Solid.zeros(p_out, "L")
    for n in range(p_out):
        for m in range(n + 1):
            acc = sum(M[k, m] * math.factorial(n + k) / R ** (n + k + 1) for k in range(m, M.order))
            L[n, m] = (-1) ** (n + m) * acc
    return L


def criterion_3(seed=3):
    sing_err = 0.0
    for R in (0.5, 1.0, 2.0, 7.5):
        S = singular(30, (0, 0, R))
        for n in range(30):
            ref = math.factorial(n) / R ** (n + 1)
            sing_err = max(sing_err, abs(S[n, 0].real - ref) / ref)
            if any(S[n, m] != 0 for m in range(1, n + 1)) or S[n, 0].imag != 0:
                sing_err = math.inf
    rng = np.random.default_rng(seed)
    ops = operator_data(20)
    pipe_err = 0.0
    for P in range(1, 21):
        for R in (0.7, 1.0, 1.9):
            M = Solid(P, "M", random_solids(rng, 1, P)[0])
            L = m2l_arrays(ops, M.data, [(0, 0, R)])[0]
            pipe_err = max(pipe_err, normalized_error(L, _z_kernel(M, R, P).data))
    ok = sing_err <= 1e-13 and pipe_err <= 1e-12
    return ok, f"S_n^0 closed form {sing_err:.1e} (tol 1e-13), z-aligned pipeline {pipe_err:.1e} (tol 1e-12)"


# 4 -------------------------------------------------------------------------
def criterion_4(configs=5, seed=4):
    rng = np.random.default_rng(seed)
    ops = operator_data(10)
    orders = (2, 5, 10)
    errs = np.zeros((configs, len(orders)))
    ratios = []
    for c in range(configs):
        src = rng.uniform(-0.5, 0.5, (20, 3))
        tgt = rng.uniform(-0.5, 0.5, (20, 3))
        q = rng.uniform(-1, 1, 20)
        ra = np.linalg.norm(src, axis=1).max()
        rb = np.linalg.norm(tgt, axis=1).max()
        d = random_shifts(rng, 1, 3.0 * (ra + rb), 3.0 * (ra + rb))[0]
        ratios.append(np.linalg.norm(d) / (ra + rb))
        tgt = tgt + d
        exact = direct_potential(tgt, (src, q))
        for i, P in enumerate(orders):
            M = p2m((src, q), np.zeros(3), P)
            L = Solid(P, "L", m2l_arrays(ops, M.data, [d], P)[0])
            approx = np.array([eval_local(L, d, x) for x in tgt])
            errs[c, i] = np.abs(approx - exact).max() / np.abs(exact).max()
    mean = errs.mean(axis=0)
    ok = errs[:, -1].max() <= 1e-6 and all(a > b for a, b in zip(mean, mean[1:]))
    return ok, (f"separation |d|/(r_A+r_B) = {min(ratios):.2f}, mean error P=2,5,10: "
                f"{mean[0]:.1e}, {mean[1]:.1e}, {mean[2]:.1e}; worst at P=10 {errs[:, -1].max():.1e} (tol 1e-6)")


# 5 -------------------------------------------------------------------------
def criterion_5(seed=5):
    rng = np.random.default_rng(seed)
    ops = operator_data(20)
    pos, q = rng.uniform(-0.5, 0.5, (30, 3)), rng.uniform(-1, 1, 30)
    m2m_err = 0.0
    for P in (1, 3, 8, 14, 20):
        for d in random_shifts(rng, 4, 0.1, 1.0):
            out = m2m_arrays(ops, p2m((pos, q), np.zeros(3), P).data, [d], P)[0]
            m2m_err = max(m2m_err, normalized_error(out, p2m((pos, q), d, P).data, kind=None))
    far = rng.uniform(-0.5, 0.5, (30, 3)) + np.array([3.0, 2.0, -2.5])
    l2l_err = 0.0
    for P in (1, 5, 12, 20):
        LA = Solid(P, "L", sum(qj * singular(P, x).data for x, qj in zip(far, q)))
        d = random_shifts(rng, 1, 0.2, 0.6)[0]
        LB = Solid(P, "L", l2l_arrays(ops, LA.data, [d], P)[0])
        for x in rng.uniform(-0.5, 0.5, (50, 3)):
            a, b = eval_local(LA, np.zeros(3), x), eval_local(LB, d, x)
            l2l_err = max(l2l_err, abs(a - b) / abs(a))
    ok = m2m_err <= 1e-12 and l2l_err <= 1e-12
    return ok, f"M2M vs p2m {m2m_err:.1e}, L2L at 50 points {l2l_err:.1e} (tol 1e-12)"


# 6 -------------------------------------------------------------------------
def criterion_6(seed=6):
    ops = operator_data(40)
    batch = 2 * ops.config.nu
    records = list(run_bench(1, 40, batch=batch, kernel="both", seed=seed, min_time=0.05))
    naive = loglog_slope(records, "naive", 16, 40)
    fast = loglog_slope(records, "optimized", 8, 32)
    t = {(r.order, r.kernel): r.ns_per_translation for r in records}
    speedup = {P: t[P, "naive"] / t[P, "optimized"] for P in range(1, 41)}
    faster = all(speedup[P] > 1 for P in range(10, 41))
    ok = naive >= 3.6 and fast <= 3.2 and faster and speedup[20] >= 5
    return ok, (f"naive slope [16,40] {naive:.2f} (>= 3.6), optimized slope [8,32] {fast:.2f} "
                f"(<= 3.2), min speedup P>=10 {min(speedup[P] for P in range(10, 41)):.1f}x, "
                f"speedup P=20 {speedup[20]:.1f}x (>= 5), batch {batch}")


# 7 -------------------------------------------------------------------------
def criterion_7(threads=4, seed=7):
    ops = operator_data(16)
    rng = np.random.default_rng(seed)
    jobs = [(random_solids(rng, 64, P), random_shifts(rng, 64), P) for P in (4, 9, 16, 12) * 2]
    sequential = [m2l_arrays(ops, s, r, P) for s, r, P in jobs]
    results = [None] * len(jobs)
    barrier = threading.Barrier(threads)

    def worker(tid):
        ws = Workspace.for_operators(ops)
        barrier.wait()
        for _ in range(5):
            for i in range(tid, len(jobs), threads):
                s, r, P = jobs[i]
                results[i] = m2l_arrays(ops, s, r, P, ws)

    pool = [threading.Thread(target=worker, args=(k,)) for k in range(threads)]
    for th in pool:
        th.start()
    for th in pool:
        th.join()
    err = max(normalized_error(a, b, kind=None) for a, b in zip(results, sequential))
    return err <= 1e-13, f"{threads} threads, shared operators, own workspaces, max deviation {err:.1e} (tol 1e-13)"


CRITERIA = [
    (1, "oracle equivalence", criterion_1),
    (2, "swap-matrix properties", criterion_2),
    (3, "z-axis closed forms", criterion_3),
    (4, "end-to-end potential", criterion_4),
    (5, "M2M/L2L exactness", criterion_5),
    (6, "complexity trend", criterion_6),
    (7, "thread safety", criterion_7),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(number, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for number, title, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        print(_line(number, title, ok, detail), flush=True)
    raise SystemExit(0 if all(results) else 1)
