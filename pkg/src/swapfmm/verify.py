"""Self-checks comparing the fast paths against independent references.

Each suite returns a :class:`SuiteResult` holding the largest error seen and
the tolerance it was held to. Used by ``swapfmm verify`` and the demos.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .harmonics import direct_potential, eval_local, p2m, singular, singular_into
from .kernels import KernelConfig, swap_product
from .operators import _b_numerators, operator_data, pack, swap_matrices, unpack
from .geometry import check_shifts
from .pipeline import Workspace, order_of, l2l_arrays, m2l_arrays, m2l_naive_arrays, m2m_arrays
from .solids import Solid


@dataclass
class SuiteResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} max error {self.max_error:.3e}  (tol {self.tolerance:.0e})"


def natural_scale(order):
    """``sqrt((n-m)! (n+m)!)`` per stored real, rows ``0..order-1``.

    Multipole coefficients of a unit cluster shrink like the reciprocal of
    this, local coefficients grow like it. Dividing M (or multiplying L) by it
    gives semi-normalized coefficients, the basis in which the axis swaps are
    orthogonal.
    """
    return np.concatenate([np.repeat(1.0 / natural_weights(n), 2) for n in range(order)])


def random_solids(rng, count, order, dtype=np.float64, natural=True):
    """Random coefficients with ``Im(C_n^0) = 0``.

    Uniform in ``[-1, 1]`` in the semi-normalized basis (the shape of a real
    multipole expansion); ``natural=False`` makes the raw coefficients uniform.
    """
    out = rng.uniform(-1.0, 1.0, (count, order * (order + 1)))
    out[:, [n * (n + 1) + 1 for n in range(order)]] = 0.0
    if natural:
        out /= natural_scale(order)
    return out.astype(dtype)


def random_shifts(rng, count, lo=0.5, hi=2.0):
    """Random directions with lengths uniform in ``[lo, hi]``."""
    v = rng.normal(size=(count, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.uniform(lo, hi, (count, 1))


def natural_weights(n):
    """``1 / sqrt((n-m)! (n+m)!)``, the size of row-``n`` harmonic coefficients."""
    return np.array(
        [1.0 / math.sqrt(math.factorial(n - m) * math.factorial(n + m)) for m in range(n + 1)]
    )


def suite_swap_involution(nmax=30, rng=None) -> SuiteResult:
    """Exact ``B_n B_n = I`` plus ``F F x = x`` and ``G G y = y`` on natural vectors."""
    rng = rng or np.random.default_rng(0)
    err = 0.0
    for n, N in enumerate(_b_numerators(nmax)):
        # exact integer check of (2^n B)^2 = 4^n I
        prod = N.dot(N)
        if not np.array_equal(prod, np.eye(2 * n + 1, dtype=object) * 4**n):
            err = max(err, 1.0)
        F, G = swap_matrices(n)
        w = natural_weights(n)
        x = rng.uniform(-1, 1, n + 1) * w
        y = rng.uniform(-1, 1, n + 1) * w
        y[0] = 0.0
        err = max(err, np.abs(F @ (F @ x) - x).max() / np.abs(x).max())
        if n > 0:
            err = max(err, np.abs(G @ (G @ y) - y).max() / np.abs(y).max())
    return SuiteResult("swap involution", err, 1e-12)


def suite_packed_dense(nmax=40, mu=6, nu=8, rng=None) -> SuiteResult:
    """Blocked products on packed panels against dense products."""
    rng = rng or np.random.default_rng(1)
    err = 0.0
    for n in range(nmax + 1):
        F, G = swap_matrices(n)
        for A, p in ((F, n % 2), (G, (n + 1) % 2)):
            stream = pack(A, n, mu, p)
            if not np.array_equal(unpack(stream, n, mu, p), A):
                err = max(err, 1.0)
            B = rng.uniform(-1, 1, (n + 1, nu))
            C = np.zeros((mu * (-(-(n + 1) // mu)), nu))
            swap_product(stream, 0, p, n, B, C, mu)
            ref = A @ B
            scale = np.abs(A).dot(np.abs(B)).max() or 1.0
            err = max(err, np.abs(C[: n + 1] - ref).max() / scale)
    return SuiteResult("packed/dense equivalence", err, 1e-13)


def suite_m2l_naive(pmax=20, cases=8, rng=None, config=None) -> SuiteResult:
    """Fast M2L against the double-height four-fold sum, ``P = 1..pmax``."""
    rng = rng or np.random.default_rng(2)
    ops = operator_data(pmax, config)
    ws = Workspace.for_operators(ops)
    err = 0.0
    for P in range(1, pmax + 1):
        src = random_solids(rng, cases, P)
        sh = random_shifts(rng, cases)
        fast = m2l_arrays(ops, src, sh, P, ws)
        ref = m2l_naive_arrays(src, sh, P)
        err = max(err, normalized_error(fast, ref, scale=m2l_term_scale(src, sh, P)))
    tol = 1e-12 if ops.config.precision == "double" else 1e-4
    return SuiteResult(f"m2l vs naive (P<={pmax})", err, tol)


@numba.njit(cache=True)
def _term_scale_kernel(src, shifts, p_in, p_out, dst):
    p_s = p_in + p_out - 1
    S = np.empty(p_s * (p_s + 1))
    for t in range(src.shape[0]):
        singular_into(shifts[t, 0], shifts[t, 1], shifts[t, 2], p_s, S)
        for n in range(p_out):
            for m in range(n + 1):
                acc = 0.0
                for k in range(p_in):
                    for l in range(-k, k + 1):
                        i = k * (k + 1) + 2 * abs(l)
                        q = abs(m + l)
                        j = (n + k) * (n + k + 1) + 2 * q
                        acc += math.hypot(src[t, i], src[t, i + 1]) * math.hypot(S[j], S[j + 1])
                base = n * (n + 1) + 2 * m
                dst[t, base] = acc
                dst[t, base + 1] = acc


def m2l_term_scale(src, shifts, order_out=None) -> np.ndarray:
    """``sum_{k,l} |M_k^l| |S_{n+k}^{m+l}(r)|`` for every M2L output coefficient.

    The size of the terms summed into ``L_n^m``; any summation order is
    accurate to a small multiple of the unit roundoff times this value.
    """
    src = np.atleast_2d(np.asarray(src, dtype=np.float64))
    p_in = order_of(src.shape[1])
    p_out = p_in if order_out is None else int(order_out)
    shifts = check_shifts(shifts)
    out = np.empty((src.shape[0], p_out * (p_out + 1)))
    _term_scale_kernel(np.ascontiguousarray(src), shifts, p_in, p_out, out)
    return out


def normalized_error(a, b, kind="L", scale=None) -> float:
    """Max coefficient error relative to the largest coefficient, per solid.

    Both solids are first taken to the semi-normalized basis (see
    :func:`natural_scale`); ``kind=None`` compares raw coefficients. With
    ``scale`` (same shape, e.g. from :func:`m2l_term_scale`) the largest
    normalized entry of ``scale`` replaces the largest coefficient of ``b``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    ref = b if scale is None else np.atleast_2d(np.asarray(scale, dtype=np.float64))
    if kind is not None:
        w = natural_scale(order_of(b.shape[1]))
        w = 1.0 / w if kind in ("L", "S") else w
        a, b, ref = a * w, b * w, ref * w
    denom = np.abs(ref).max(axis=1)
    denom[denom == 0] = 1.0
    return float((np.abs(a - b).max(axis=1) / denom).max())


def suite_m2m_l2l(pmax=20, rng=None) -> SuiteResult:
    """M2M against p2m at the new centre, L2L against field values."""
    rng = rng or np.random.default_rng(3)
    ops = operator_data(pmax)
    ws = Workspace.for_operators(ops)
    err = 0.0
    pos = rng.uniform(-0.5, 0.5, (10, 3))
    q = rng.uniform(-1, 1, 10)
    far = rng.uniform(-0.5, 0.5, (10, 3)) + np.array([5.0, 1.0, -1.0])
    for P in range(1, pmax + 1):
        d = random_shifts(rng, 1, 0.2, 0.6)[0]
        MA = p2m((pos, q), np.zeros(3), P)
        MB = p2m((pos, q), d, P)
        out = m2m_arrays(ops, MA.data, [d], P, ws)[0]
        err = max(err, normalized_error(out, MB.data, kind=None))

        LA = Solid(P, "L", sum(qj * singular(P, s).data for s, qj in zip(far, q)))
        LB = Solid(P, "L", l2l_arrays(ops, LA.data, [d], P, ws)[0])
        for x in rng.uniform(-0.5, 0.5, (5, 3)):
            a = eval_local(LA, np.zeros(3), x)
            b = eval_local(LB, d, x)
            err = max(err, abs(a - b) / max(abs(a), 1e-300))
    return SuiteResult("m2m/l2l exactness", err, 1e-12)


def suite_potential(orders=(2, 5, 10), rng=None) -> SuiteResult:
    """p2m, m2l, eval_local against direct summation for separated clusters."""
    rng = rng or np.random.default_rng(4)
    src = rng.uniform(-0.5, 0.5, (20, 3))
    q = rng.uniform(-1, 1, 20)
    cB = np.array([3.5, 0.5, 0.0])
    tgt = rng.uniform(-0.5, 0.5, (20, 3)) + cB
    exact = direct_potential(tgt, (src, q))
    ops = operator_data(max(orders))
    errs = []
    for P in orders:
        M = p2m((src, q), np.zeros(3), P)
        L = Solid(P, "L", m2l_arrays(ops, M.data, [cB], P)[0])
        approx = np.array([eval_local(L, cB, x) for x in tgt])
        errs.append(float(np.abs(approx - exact).max() / np.abs(exact).max()))
    # non-decreasing error marks a failure regardless of size
    err = errs[-1] if all(a > b for a, b in zip(errs, errs[1:])) else math.inf
    return SuiteResult(f"potential at P={orders[-1]}", err, 1e-6)


def run_all(pmax=20, config: KernelConfig | None = None, seed=0) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    cfg = config or KernelConfig.default()
    return [
        suite_swap_involution(min(pmax, 30), rng),
        suite_packed_dense(min(pmax, 40), cfg.mu, cfg.nu, rng),
        suite_m2l_naive(pmax, rng=rng, config=config),
        suite_m2m_l2l(pmax, rng),
        suite_potential(rng=rng),
    ]
