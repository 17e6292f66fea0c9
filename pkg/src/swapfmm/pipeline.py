"""Batched M2L, M2M and L2L translations.

Every translation runs the same four stages on batches of ``nu`` solids:

1. rotation/scaling tables for every shift (:mod:`swapfmm.geometry`),
2. per row ``n``: scale and rotate by ``alpha``, swap x and z, rotate by
   ``beta``, swap again; the result is scattered into per-column buffers,
3. per column ``m``: translation along the unit z-axis,
4. per row ``n``: the inverse of stage 2 for the output kind.

After stage 2 every shift points along ``+z`` with unit length, so stage 3
applies one matrix to the whole batch: the faculty Hankel matrix for M2L and
triangular Toeplitz matrices of ``sigma^d / d!`` for M2M and L2L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import WorkspaceMismatchError
from .geometry import check_shifts, decompose_batch
from .harmonics import singular_into
from .kernels import kernel_hankel, padded_rows, rotate_scale_rows, swap_product
from .operators import OperatorData
from .solids import Solid, solid_size

#: Sign of the unit z-shift in the M2M kernel ``sum_k SIGN^(n-k) M_k^m / (n-k)!``.
M2M_SIGN = -1.0
#: Sign of the unit z-shift in the L2L kernel ``sum_k SIGN^(k-n) L_k^m / (k-n)!``.
L2L_SIGN = 1.0

_M2L, _M2M, _L2L = 0, 1, 2


class Workspace:
    """Scratch buffers for one thread's translations.

    ``slabs`` holds the swap buffers as two ping-pong pairs
    ``(re0, im0, re1, im1)``; ``tin`` and ``tout`` are the translation
    buffers with the real part in ``[0]`` and the imaginary part in ``[1]``.
    """

    def __init__(self, order: int, config):
        mu, nu, dtype = config.mu, config.nu, config.dtype
        self.order = order
        self.config = config
        self.slabs = np.zeros((4, padded_rows(order, mu), nu), dtype=dtype)
        self.tin = np.zeros((2, order * (order + 1) // 2, nu), dtype=dtype)
        tout_rows = sum(padded_rows(order - m, mu) for m in range(order))
        self.tout = np.zeros((2, tout_rows, nu), dtype=dtype)
        self.tables = np.zeros((6, nu, order + 1), dtype=dtype)
        self.scale = np.zeros(nu, dtype=dtype)
        self.ones = np.ones(nu, dtype=dtype)
        self.tout_offsets = np.zeros(order + 1, dtype=np.int64)

    @classmethod
    def for_operators(cls, ops: OperatorData) -> "Workspace":
        return cls(ops.order, ops.config)

    def check(self, ops: OperatorData, *orders):
        if self.config != ops.config:
            raise WorkspaceMismatchError(
                f"workspace built for {self.config}, operators use {ops.config}"
            )
        if max(orders) > self.order:
            raise WorkspaceMismatchError(
                f"workspace of order {self.order} too small for order {max(orders)}"
            )


@dataclass
class TranslationRequest:
    """One translation: ``source`` shifted by ``shift``; ``shift`` points from
    the source centre to the target centre. ``out``, if given, receives the
    result in place and fixes the output order."""

    source: Solid
    shift: tuple
    order_out: int | None = None
    out: Solid | None = None

    def __post_init__(self):
        if self.order_out is None:
            self.order_out = self.out.order if self.out is not None else self.source.order
        if self.order_out < 1:
            raise ValueError("output order must be >= 1")
        if self.out is not None and self.out.order != self.order_out:
            raise ValueError("out solid order does not match order_out")


@numba.njit(cache=True, nogil=True)
def _translate(mode, src, shifts, p_in, p_out, dst, fac, sfac, offs,
               Fp, Gp, Ftp, Gtp, mu, slabs, tin, tout, tables, scale, ones, tout_off):
    n_total = src.shape[0]
    nu = slabs.shape[2]
    p_max = max(p_in, p_out)
    re0, im0, re1, im1 = slabs[0], slabs[1], slabs[2], slabs[3]
    pw, ipw, ca, sa, cb, sb = (tables[0], tables[1], tables[2],
                               tables[3], tables[4], tables[5])
    in_local = mode == 2
    out_local = mode != 1
    ncols = min(p_in, p_out)

    off = 0
    for m in range(ncols):
        tout_off[m] = off
        off += mu * ((p_out - m + mu - 1) // mu)

    for start in range(0, n_total, nu):
        cnt = min(nu, n_total - start)
        decompose_batch(shifts, start, cnt, p_max + 1, pw, ipw, ca, sa, cb, sb)

        # stage 2: rotate the source so the shift becomes the unit z-vector
        if in_local:
            A, Bm = Ftp, Gtp
        else:
            A, Bm = Fp, Gp
        for n in range(p_in):
            base = n * (n + 1)
            for m in range(n + 1):
                w = 2.0 if (in_local and m > 0) else 1.0
                for j in range(cnt):
                    re0[m, j] = w * src[start + j, base + 2 * m]
                    im0[m, j] = w * src[start + j, base + 2 * m + 1]
                for j in range(cnt, nu):
                    re0[m, j] = 0.0
                    im0[m, j] = 0.0
            for j in range(nu):
                scale[j] = pw[j, n] if in_local else ipw[j, n + 1]
            rotate_scale_rows(re0, im0, n, scale, ca, sa, False)
            swap_product(A, offs[n], n & 1, n, re0, re1, mu)
            swap_product(Bm, offs[n], (n + 1) & 1, n, im0, im1, mu)
            rotate_scale_rows(re1, im1, n, ones, cb, sb, False)
            swap_product(A, offs[n], n & 1, n, re1, re0, mu)
            swap_product(Bm, offs[n], (n + 1) & 1, n, im1, im0, mu)
            for m in range(min(n + 1, ncols)):
                r = m * p_in - (m * (m - 1)) // 2 + (n - m)
                for j in range(nu):
                    tin[0, r, j] = re0[m, j]
                    tin[1, r, j] = im0[m, j]

        # stage 3: column-wise translation along the unit z-axis
        for m in range(ncols):
            ti = m * p_in - (m * (m - 1)) // 2
            K = p_in - m
            rows = p_out - m
            to = tout_off[m]
            for part in range(2):
                B = tin[part, ti:ti + K]
                C = tout[part, to:to + mu * ((rows + mu - 1) // mu)]
                if mode == 0:
                    for c0 in range(0, rows, mu):
                        kernel_hankel(fac, 2 * m, B, K, C, c0, mu)
                elif mode == 1:
                    for i in range(rows):
                        for j in range(nu):
                            C[i, j] = 0.0
                        for k in range(min(i + 1, K)):
                            a = sfac[i - k]
                            for j in range(nu):
                                C[i, j] += a * B[k, j]
                else:
                    for i in range(rows):
                        for j in range(nu):
                            C[i, j] = 0.0
                        for k in range(i, K):
                            a = sfac[k - i]
                            for j in range(nu):
                                C[i, j] += a * B[k, j]

        # stage 4: rotate back into the original frame
        if out_local:
            A, Bm = Ftp, Gtp
        else:
            A, Bm = Fp, Gp
        for n in range(p_out):
            for m in range(n + 1):
                if m < ncols:
                    r = tout_off[m] + n - m
                    sgn = -1.0 if (mode == 0 and (n + m) & 1) else 1.0
                    if mode == 0 and m > 0:
                        sgn *= 2.0
                    for j in range(nu):
                        re0[m, j] = sgn * tout[0, r, j]
                        im0[m, j] = sgn * tout[1, r, j]
                else:
                    for j in range(nu):
                        re0[m, j] = 0.0
                        im0[m, j] = 0.0
            swap_product(A, offs[n], n & 1, n, re0, re1, mu)
            swap_product(Bm, offs[n], (n + 1) & 1, n, im0, im1, mu)
            rotate_scale_rows(re1, im1, n, ones, cb, sb, True)
            swap_product(A, offs[n], n & 1, n, re1, re0, mu)
            swap_product(Bm, offs[n], (n + 1) & 1, n, im1, im0, mu)
            for j in range(nu):
                scale[j] = ipw[j, n] if out_local else pw[j, n + 1]
            rotate_scale_rows(re0, im0, n, scale, ca, sa, True)
            base = n * (n + 1)
            w = 0.5 if out_local else 1.0
            for j in range(cnt):
                dst[start + j, base] = re0[0, j]
                dst[start + j, base + 1] = 0.0
                for m in range(1, n + 1):
                    dst[start + j, base + 2 * m] = w * re0[m, j]
                    dst[start + j, base + 2 * m + 1] = w * im0[m, j]


def order_of(size: int) -> int:
    """Order ``P`` of a solid array with ``P*(P+1)`` entries."""
    p = int((math.isqrt(4 * size + 1) - 1) // 2)
    if p < 1 or p * (p + 1) != size:
        raise ValueError(f"{size} is not a valid solid size")
    return p


def _run(mode, ops, src, shifts, order_out, ws, out):
    dtype = ops.dtype
    src = np.ascontiguousarray(src, dtype=dtype)
    if src.ndim == 1:
        src = src[None, :]
    p_in = order_of(src.shape[1])
    p_out = p_in if order_out is None else int(order_out)
    shifts = check_shifts(shifts)
    if shifts.shape[0] != src.shape[0]:
        raise ValueError(f"{src.shape[0]} solids but {shifts.shape[0]} shifts")
    ops.check_orders(p_in, p_out)
    if ws is None:
        ws = Workspace.for_operators(ops)
    ws.check(ops, p_in, p_out)
    if out is None:
        out = np.empty((src.shape[0], solid_size(p_out)), dtype=dtype)
    elif out.shape != (src.shape[0], solid_size(p_out)) or out.dtype != dtype:
        raise ValueError("output array has the wrong shape or dtype")
    if mode == _M2M:
        sfac = ops.inv_fac * (M2M_SIGN ** np.arange(ops.inv_fac.size)).astype(dtype)
    elif mode == _L2L:
        sfac = ops.inv_fac * (L2L_SIGN ** np.arange(ops.inv_fac.size)).astype(dtype)
    else:
        sfac = ops.inv_fac
    _translate(
        mode, src, shifts, p_in, p_out, out, ops.hankel_fac, sfac, ops.offsets,
        ops.F_packed, ops.G_packed, ops.Ft_packed, ops.Gt_packed, ops.config.mu,
        ws.slabs, ws.tin, ws.tout, ws.tables, ws.scale, ws.ones, ws.tout_offsets,
    )
    return out


def m2l_arrays(ops, src, shifts, order_out=None, ws=None, out=None) -> np.ndarray:
    """M2L on stacked solid arrays ``src`` of shape ``(N, P_in*(P_in+1))``.

    ``shifts[i]`` is target centre minus source centre. Returns
    ``(N, P_out*(P_out+1))`` local coefficients.
    """
    return _run(_M2L, ops, src, shifts, order_out, ws, out)


def m2m_arrays(ops, src, shifts, order_out=None, ws=None, out=None) -> np.ndarray:
    """M2M on stacked multipole arrays; ``shifts[i]`` is new centre minus old."""
    return _run(_M2M, ops, src, shifts, order_out, ws, out)


def l2l_arrays(ops, src, shifts, order_out=None, ws=None, out=None) -> np.ndarray:
    """L2L on stacked local arrays; ``shifts[i]`` is new centre minus old."""
    return _run(_L2L, ops, src, shifts, order_out, ws, out)


def _run_requests(fn, kind, ops, requests, ws):
    requests = list(requests)
    results = [None] * len(requests)
    groups: dict = {}
    for i, req in enumerate(requests):
        groups.setdefault((req.source.order, req.order_out), []).append(i)
    for (p_in, p_out), idx in groups.items():
        src = np.stack([requests[i].source.data for i in idx])
        shifts = np.array([requests[i].shift for i in idx], dtype=np.float64)
        res = fn(ops, src, shifts, p_out, ws)
        for row, i in zip(res, idx):
            target = requests[i].out
            if target is None:
                target = Solid(p_out, kind, row.copy())
            else:
                target.data[:] = row
            results[i] = target
    return results


def m2l(ops: OperatorData, requests, ws: Workspace | None = None) -> list[Solid]:
    """Convert multipole expansions into local expansions about shifted centres.

    Requests are grouped by ``(P_in, P_out)`` and processed in chunks of
    ``nu``; results come back in request order.
    """
    return _run_requests(m2l_arrays, "L", ops, requests, ws)


def m2m(ops: OperatorData, requests, ws: Workspace | None = None) -> list[Solid]:
    """Re-centre multipole expansions."""
    return _run_requests(m2m_arrays, "M", ops, requests, ws)


def l2l(ops: OperatorData, requests, ws: Workspace | None = None) -> list[Solid]:
    """Re-centre local expansions."""
    return _run_requests(l2l_arrays, "L", ops, requests, ws)


@numba.njit(cache=True, nogil=True)
def _m2l_naive_kernel(src, shifts, p_in, p_out, dst):
    p_s = p_in + p_out - 1
    S = np.empty(p_s * (p_s + 1))
    for t in range(src.shape[0]):
        M = src[t]
        singular_into(shifts[t, 0], shifts[t, 1], shifts[t, 2], p_s, S)
        for n in range(p_out):
            sgn = -1.0 if n & 1 else 1.0
            for m in range(n + 1):
                acc_re = 0.0
                acc_im = 0.0
                for k in range(p_in):
                    for l in range(-k, k + 1):
                        # conj(M_k^l), using M_k^{-l} = (-1)^l conj(M_k^l)
                        if l >= 0:
                            i = k * (k + 1) + 2 * l
                            mre = M[i]
                            mim = -M[i + 1]
                        else:
                            i = k * (k + 1) - 2 * l
                            mre = M[i]
                            mim = M[i + 1]
                            if l & 1:
                                mre = -mre
                                mim = -mim
                        N = n + k
                        q = m + l
                        if q >= 0:
                            i = N * (N + 1) + 2 * q
                            sre = S[i]
                            sim = S[i + 1]
                        else:
                            i = N * (N + 1) - 2 * q
                            sre = S[i]
                            sim = -S[i + 1]
                            if q & 1:
                                sre = -sre
                                sim = -sim
                        acc_re += mre * sre - mim * sim
                        acc_im += mre * sim + mim * sre
                base = n * (n + 1) + 2 * m
                dst[t, base] = sgn * acc_re
                dst[t, base + 1] = sgn * acc_im if m > 0 else 0.0


def m2l_naive_arrays(src, shifts, order_out=None) -> np.ndarray:
    """Reference M2L by the four-fold double-height sum, on stacked arrays."""
    src = np.asarray(src)
    dtype = src.dtype if src.dtype in (np.float32, np.float64) else np.float64
    src64 = np.ascontiguousarray(src, dtype=np.float64)
    if src64.ndim == 1:
        src64 = src64[None, :]
    p_in = order_of(src64.shape[1])
    p_out = p_in if order_out is None else int(order_out)
    if p_out < 1:
        raise ValueError("output order must be >= 1")
    shifts = check_shifts(shifts)
    if shifts.shape[0] != src64.shape[0]:
        raise ValueError(f"{src64.shape[0]} solids but {shifts.shape[0]} shifts")
    out = np.empty((src64.shape[0], solid_size(p_out)))
    _m2l_naive_kernel(src64, shifts, p_in, p_out, out)
    return out.astype(dtype, copy=False)


def m2l_naive(M: Solid, r, order_out: int | None = None) -> Solid:
    """Reference M2L ``L_n^m = (-1)^n sum_{k,l} conj(M_k^l) S_{n+k}^{m+l}(r)``.

    Summation runs over every source row (the double-height kernel), with
    ``S`` evaluated up to order ``P_in + P_out - 1``.
    """
    out = m2l_naive_arrays(M.data, r, order_out)
    return Solid(order_of(out.shape[1]), "L", out[0])
