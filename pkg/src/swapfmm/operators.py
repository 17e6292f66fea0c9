"""Shift-independent tables: faculties, axis-swap matrices and their packed panels.

The x/z axis swap acting on row ``n`` of a solid is given by Dehnen's
``(2n+1) x (2n+1)`` matrix ``B_n``. Because ``B_n`` is real and solids only
store ``m >= 0``, it splits into a matrix ``F_n`` acting on real parts and
``G_n`` acting on imaginary parts. Both are half zero in a chequerboard
pattern: ``F_n[m, l] != 0`` only if ``(m + l) % 2 == n % 2`` and
``G_n[m, l] != 0`` only if ``(m + l) % 2 == (n + 1) % 2``.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .errors import OrderTooLargeError
from .kernels import PRECISIONS, KernelConfig, padded_rows


def max_order(precision="double") -> int:
    """Largest ``P`` for which ``(2P - 2)!`` is finite in the given precision."""
    return (_largest_finite_faculty(PRECISIONS[precision]) + 2) // 2


def _largest_finite_faculty(dtype):
    big = float(np.finfo(dtype).max)
    k, f = 0, 1.0
    while f * (k + 1) <= big:
        k += 1
        f *= k
    return k


def faculties(count: int, dtype=np.float64) -> np.ndarray:
    """``[0!, 1!, ..., (count - 1)!]``."""
    out = np.ones(count, dtype=np.float64)
    with np.errstate(over="ignore"):
        for k in range(1, count):
            out[k] = out[k - 1] * k
        out = out.astype(dtype)
    if not np.all(np.isfinite(out)):
        raise OrderTooLargeError(f"{count - 1}! overflows {np.dtype(dtype).name}")
    return out


def _b_numerators(n_max: int):
    """Yield ``2^n B_n`` as integer object arrays for ``n = 0..n_max``.

    ``B_n`` has dyadic entries whose numerators outgrow 53 bits beyond
    ``n ~ 26``; integer arithmetic keeps them exact so every table is
    rounded only once.
    """
    N = np.array([[1]], dtype=object)
    yield N
    for k in range(n_max):
        # zero-extend columns so that B_k^{m, l} = 0 for |l| > k
        ext = np.zeros((2 * k + 1, 2 * k + 5), dtype=object)
        ext[:, 2:-2] = N
        # B_k^{m, l-1}, B_k^{m, l}, B_k^{m, l+1} for l = -(k+1)..(k+1)
        left, mid, right = ext[:, 0:-2], ext[:, 1:-1], ext[:, 2:]
        nxt = np.empty((2 * k + 3, 2 * k + 3), dtype=object)
        # 2 B_{k+1}^{m,l} = B_k^{m,l-1} - B_k^{m,l+1}
        nxt[1:-1] = left - right
        # 2 B_{k+1}^{m+-1,l} = B_k^{m,l-1} +- 2 B_k^{m,l} + B_k^{m,l+1}, from m = +-k
        nxt[-1] = left[-1] + 2 * mid[-1] + right[-1]
        nxt[0] = left[0] - 2 * mid[0] + right[0]
        N = nxt
        yield N


def _to_float(numerators, denominator):
    # int / int is correctly rounded
    return np.array(
        [[a / denominator for a in row] for row in numerators], dtype=np.float64
    ).reshape(numerators.shape)


def wigner_b(n: int, exact: bool = False) -> np.ndarray:
    """Swap matrix ``B_n`` as a dense array; ``B[m + n, l + n] = B_n^{m,l}``.

    Built from ``B_0 = [1]`` with the two-term recurrence for rows
    ``|m| <= n`` and the three-term one for the new outer rows ``m = +-(n+1)``.
    With ``exact=True`` the entries are :class:`fractions.Fraction`.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    for N in _b_numerators(n):
        pass
    if exact:
        den = 2**n
        return np.array([[Fraction(a, den) for a in row] for row in N], dtype=object)
    return _to_float(N, 2**n)


def _swap_from_b(n, b, zero):
    F = np.full((n + 1, n + 1), zero, dtype=object)
    G = np.full((n + 1, n + 1), zero, dtype=object)
    for m in range(n + 1):
        F[m, 0] = b(0, m)
        for l in range(1, n + 1):
            if l % 2:
                F[m, l] = b(l, m) - b(-l, m)
                if m > 0:
                    G[m, l] = b(l, m) + b(-l, m)
            else:
                F[m, l] = b(l, m) + b(-l, m)
                if m > 0:
                    G[m, l] = b(l, m) - b(-l, m)
    return F, G


def swap_matrices(n: int, B: np.ndarray | None = None):
    """Real-part and imaginary-part swap matrices ``(F_n, G_n)``.

    ``F[m, l] = B^{0,m}`` for ``l = 0`` and ``B^{l,m} + (-1)^l B^{-l,m}``
    otherwise; ``G[m, l] = B^{l,m} - (-1)^l B^{-l,m}`` with its first row and
    column zero. Without ``B`` the matrices are formed exactly and rounded
    once to float64.
    """
    if B is None:
        for N in _b_numerators(n):
            pass
        F, G = _swap_from_b(n, lambda m, l: N[m + n, l + n], 0)
        F, G = _to_float(F, 2**n), _to_float(G, 2**n)
    else:
        B = np.asarray(B, dtype=np.float64)
        F, G = _swap_from_b(n, lambda m, l: B[m + n, l + n], 0.0)
        F, G = F.astype(np.float64), G.astype(np.float64)
    # the excluded parity is exactly zero already; make it structural anyway
    mask = (np.add.outer(np.arange(n + 1), np.arange(n + 1)) % 2) == n % 2
    F[~mask] = 0.0
    G[mask] = 0.0
    return F, G


def _all_swap_matrices(order):
    """``swap_matrices(n)`` for ``n < order`` from one pass of the recurrence."""
    out = []
    for n, N in enumerate(_b_numerators(order - 1)):
        F, G = _swap_from_b(n, lambda m, l: N[m + n, l + n], 0)
        F, G = _to_float(F, 2**n), _to_float(G, 2**n)
        mask = (np.add.outer(np.arange(n + 1), np.arange(n + 1)) % 2) == n % 2
        F[~mask] = 0.0
        G[mask] = 0.0
        out.append((F, G))
    return out


def packed_length(n: int, mu: int) -> int:
    return padded_rows(n + 1, mu) // mu * (n + 1) * (mu // 2)


def pack(A: np.ndarray, n: int, mu: int, parity: int) -> np.ndarray:
    """Pack a chequerboard ``(n+1) x (n+1)`` matrix into ``mu``-row panels.

    Rows are zero-padded to a multiple of ``mu``. Each panel is stored
    column by column, keeping only rows ``r`` with ``(r + l) % 2 == parity``.
    """
    if mu < 2 or mu % 2:
        raise ValueError(f"mu must be even and >= 2, got {mu}")
    A = np.asarray(A)
    rows = padded_rows(n + 1, mu)
    padded = np.zeros((rows, n + 1), dtype=A.dtype)
    padded[: n + 1] = A
    out = np.empty(packed_length(n, mu), dtype=A.dtype)
    pos = 0
    half = mu // 2
    for r0 in range(0, rows, mu):
        for l in range(n + 1):
            first = r0 + ((parity + l) & 1)
            out[pos : pos + half] = padded[first : r0 + mu : 2, l]
            pos += half
    return out


def unpack(stream: np.ndarray, n: int, mu: int, parity: int) -> np.ndarray:
    """Inverse of :func:`pack`; excluded slots come back as zeros."""
    rows = padded_rows(n + 1, mu)
    A = np.zeros((rows, n + 1), dtype=np.asarray(stream).dtype)
    pos = 0
    for r0 in range(0, rows, mu):
        for l in range(n + 1):
            for r in range(r0, r0 + mu):
                if (r + l) % 2 == parity:
                    A[r, l] = stream[pos]
                    pos += 1
    return A[: n + 1]


@dataclass(frozen=True, eq=False)
class OperatorData:
    """Precomputed tables for all rows ``n < order``.

    ``F_packed`` (and the other three streams) concatenate the packed
    panels of every row; row ``n`` starts at ``offsets[n]``. ``hankel_fac``
    is the faculty table followed by ``mu`` zeros so that padded tile rows
    of the Hankel product stay in bounds.
    """

    order: int
    config: KernelConfig
    fac: np.ndarray
    hankel_fac: np.ndarray
    F: tuple
    G: tuple
    offsets: np.ndarray
    F_packed: np.ndarray
    G_packed: np.ndarray
    Ft_packed: np.ndarray
    Gt_packed: np.ndarray
    inv_fac: np.ndarray = field(repr=False)

    @property
    def dtype(self):
        return self.config.dtype

    def check_orders(self, *orders):
        for p in orders:
            if not 1 <= p <= self.order:
                raise OrderTooLargeError(
                    f"order {p} outside operator data of order {self.order}"
                )


def _build(order: int, cfg: KernelConfig) -> OperatorData:
    if order < 1:
        raise ValueError("order must be >= 1")
    cap = max_order(cfg.precision)
    if order > cap:
        raise OrderTooLargeError(
            f"order {order} exceeds the {cfg.precision} precision limit of {cap}"
        )
    dtype = cfg.dtype
    mu = cfg.mu
    fac = faculties(2 * order - 1, dtype)
    hankel_fac = np.concatenate([fac, np.zeros(mu, dtype=dtype)])
    inv_fac = (1.0 / faculties(order + 1)).astype(dtype)

    Fs, Gs, streams = [], [], {"F": [], "G": [], "Ft": [], "Gt": []}
    offsets = np.zeros(order + 1, dtype=np.int64)
    for n, (F, G) in enumerate(_all_swap_matrices(order)):
        F = F.astype(dtype)
        G = G.astype(dtype)
        F.setflags(write=False)
        G.setflags(write=False)
        Fs.append(F)
        Gs.append(G)
        pf, pg = n % 2, (n + 1) % 2
        streams["F"].append(pack(F, n, mu, pf))
        streams["G"].append(pack(G, n, mu, pg))
        streams["Ft"].append(pack(F.T, n, mu, pf))
        streams["Gt"].append(pack(G.T, n, mu, pg))
        offsets[n + 1] = offsets[n] + packed_length(n, mu)

    def frozen(a):
        a.setflags(write=False)
        return a

    return OperatorData(
        order=order,
        config=cfg,
        fac=frozen(fac),
        hankel_fac=frozen(hankel_fac),
        F=tuple(Fs),
        G=tuple(Gs),
        offsets=frozen(offsets),
        F_packed=frozen(np.concatenate(streams["F"])),
        G_packed=frozen(np.concatenate(streams["G"])),
        Ft_packed=frozen(np.concatenate(streams["Ft"])),
        Gt_packed=frozen(np.concatenate(streams["Gt"])),
        inv_fac=frozen(inv_fac),
    )


_cache: dict = {}
_cache_lock = threading.Lock()


def operator_data(order: int, config: KernelConfig | None = None) -> OperatorData:
    """Shared, immutable operator tables for ``(order, config)``.

    Built once per key; concurrent callers block until the first build is
    published and then all receive the same object.
    """
    cfg = config or KernelConfig.default()
    key = (order, cfg)
    ops = _cache.get(key)
    if ops is None:
        with _cache_lock:
            ops = _cache.get(key)
            if ops is None:
                ops = _build(order, cfg)
                _cache[key] = ops
    return ops
