"""Compute kernels and their block-size configuration.

The three kernels below are the only places where the bulk of the
arithmetic happens:

* :func:`kernel_swap` multiplies one packed ``mu``-row panel of a swap
  matrix with a ``K x nu`` slab,
* :func:`kernel_hankel` multiplies one ``mu``-row tile of the faculty
  Hankel matrix with a ``K x nu`` slab,
* :func:`rotate_scale_rows` applies per-solid z-rotations and scalings.

Slabs are row-major ``(rows, nu)`` arrays; column ``j`` belongs to the
``j``-th solid of a batch. The portable implementations are plain loops
compiled with numba; an optimised variant only has to keep the signatures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

PRECISIONS = {"double": np.float64, "single": np.float32}

_DEFAULT_BLOCKS = {"double": (6, 8), "single": (6, 16)}


@dataclass(frozen=True)
class KernelConfig:
    """Block height ``mu``, batch width ``nu`` and floating point precision."""

    mu: int = 6
    nu: int = 8
    precision: str = "double"

    def __post_init__(self):
        if self.precision not in PRECISIONS:
            raise ValueError(f"precision must be 'single' or 'double', got {self.precision!r}")
        if self.mu < 2 or self.mu % 2:
            raise ValueError(f"mu must be even and >= 2, got {self.mu}")
        if self.nu < 1:
            raise ValueError(f"nu must be >= 1, got {self.nu}")

    @classmethod
    def default(cls, precision="double"):
        mu, nu = _DEFAULT_BLOCKS[precision]
        return cls(mu, nu, precision)

    @property
    def dtype(self):
        return np.dtype(PRECISIONS[self.precision])


def padded_rows(rows: int, mu: int) -> int:
    """``rows`` rounded up to a multiple of ``mu``."""
    return mu * (-(-rows // mu))


@numba.njit(cache=True, nogil=True)
def kernel_swap(packed, pos, parity, K, B, C, c0, mu, accumulate):
    """``C[c0:c0+mu] (+)= A_panel @ B[:K]`` for one packed panel.

    ``packed[pos:]`` holds the panel in packing order: for every column
    ``k`` the ``mu/2`` entries of rows ``i`` with ``(i + k) % 2 == parity``.
    Returns the stream position after the panel.
    """
    nu = B.shape[1]
    if not accumulate:
        for i in range(mu):
            for j in range(nu):
                C[c0 + i, j] = 0.0
    half = mu // 2
    for k in range(K):
        i = (parity + k) & 1
        for t in range(half):
            a = packed[pos]
            pos += 1
            if a != 0.0:
                for j in range(nu):
                    C[c0 + i, j] += a * B[k, j]
            i += 2
    return pos


@numba.njit(cache=True, nogil=True)
def swap_product(packed, start, parity, n, B, C, mu):
    """``C = A @ B`` for a packed ``(n+1) x (n+1)`` swap matrix, all panels.

    ``C`` must have at least ``padded_rows(n + 1, mu)`` rows.
    """
    K = n + 1
    pos = start
    for c0 in range(0, K, mu):
        pos = kernel_swap(packed, pos, parity, K, B, C, c0, mu, False)
    return pos


@numba.njit(cache=True, nogil=True)
def kernel_hankel(fac, offset, B, K, C, c0, mu):
    """``C[c0+i] = sum_k fac[offset + c0 + i + k] * B[k]`` for ``i < mu``.

    The matrix ``(offset + i + k)!`` is never formed; ``fac`` must extend to
    index ``offset + c0 + mu + K - 2``.
    """
    nu = B.shape[1]
    for i in range(mu):
        for j in range(nu):
            C[c0 + i, j] = 0.0
    for k in range(K):
        base = offset + c0 + k
        for i in range(mu):
            a = fac[base + i]
            for j in range(nu):
                C[c0 + i, j] += a * B[k, j]


@numba.njit(cache=True, nogil=True)
def rotate_scale_rows(Re, Im, n, scale, cos_tab, sin_tab, conj):
    """Multiply row ``m <= n`` of solid ``j`` by ``scale[j] * exp(+-i m angle_j)``.

    ``cos_tab[j, m]``, ``sin_tab[j, m]`` hold ``cos(m angle)``, ``sin(m angle)``;
    ``conj`` selects the negative angle.
    """
    nu = Re.shape[1]
    sgn = -1.0 if conj else 1.0
    for m in range(n + 1):
        for j in range(nu):
            c = cos_tab[j, m] * scale[j]
            s = sgn * sin_tab[j, m] * scale[j]
            re = Re[m, j]
            im = Im[m, j]
            Re[m, j] = re * c - im * s
            Im[m, j] = re * s + im * c
