"""Rotation angles and scale powers of shift vectors, without trigonometric calls.

For ``r = (x, y, z)`` with ``rho = hypot(x, y)``::

    cos(alpha) = y / rho        sin(alpha) = x / rho
    cos(beta)  = z / |r|        sin(beta)  = -rho / |r|

and ``alpha = 0`` when ``x = y = 0``. Multiples ``exp(i m alpha)`` are built
by repeated complex multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ZeroShiftError

_TINY = float(np.finfo(np.float64).tiny)


@numba.njit(cache=True, nogil=True)
def decompose_into(x, y, z, count, j, pw, ipw, ca, sa, cb, sb):
    """Fill row ``j`` of the tables with entries ``0..count-1`` for shift ``(x, y, z)``."""
    rho = math.hypot(x, y)
    r = math.hypot(rho, z)
    if rho > 0.0:
        c_a = y / rho
        s_a = x / rho
    else:
        c_a = 1.0
        s_a = 0.0
    c_b = z / r
    s_b = -rho / r
    inv_r = 1.0 / r
    pw[j, 0] = 1.0
    ipw[j, 0] = 1.0
    ca[j, 0] = 1.0
    sa[j, 0] = 0.0
    cb[j, 0] = 1.0
    sb[j, 0] = 0.0
    p = 1.0
    ip = 1.0
    are = 1.0
    aim = 0.0
    bre = 1.0
    bim = 0.0
    for n in range(1, count):
        p *= r
        ip *= inv_r
        are, aim = are * c_a - aim * s_a, are * s_a + aim * c_a
        bre, bim = bre * c_b - bim * s_b, bre * s_b + bim * c_b
        pw[j, n] = p
        ipw[j, n] = ip
        ca[j, n] = are
        sa[j, n] = aim
        cb[j, n] = bre
        sb[j, n] = bim


@numba.njit(cache=True, nogil=True)
def decompose_batch(shifts, start, cnt, count, pw, ipw, ca, sa, cb, sb):
    """Tables for ``shifts[start:start+cnt]``; remaining rows get the unit z-shift."""
    for j in range(pw.shape[0]):
        if j < cnt:
            s = shifts[start + j]
            decompose_into(s[0], s[1], s[2], count, j, pw, ipw, ca, sa, cb, sb)
        else:
            decompose_into(0.0, 0.0, 1.0, count, j, pw, ipw, ca, sa, cb, sb)


@dataclass(frozen=True)
class ShiftGeometry:
    """Per-shift tables; index ``n`` runs over ``0..order``."""

    r_norm: float
    cos_alpha: float
    sin_alpha: float
    cos_beta: float
    sin_beta: float
    pow: np.ndarray
    inv_pow: np.ndarray
    cos_m_alpha: np.ndarray
    sin_m_alpha: np.ndarray
    cos_m_beta: np.ndarray
    sin_m_beta: np.ndarray


def check_shifts(shifts) -> np.ndarray:
    """Validate shift vectors as an ``(N, 3)`` float64 array."""
    s = np.ascontiguousarray(shifts, dtype=np.float64).reshape(-1, 3)
    if not np.all(np.isfinite(s)):
        raise ValueError("shift vectors must be finite")
    if np.any(np.einsum("ij,ij->i", s, s) < _TINY):
        raise ZeroShiftError("translation with zero shift vector")
    return s


def decompose(r, order: int) -> ShiftGeometry:
    """Rotation and scaling tables of shift ``r`` for ``n = 0..order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    s = check_shifts(r)[0]
    tabs = [np.empty((1, order + 1)) for _ in range(6)]
    decompose_into(s[0], s[1], s[2], order + 1, 0, *tabs)
    pw, ipw, ca, sa, cb, sb = (t[0] for t in tabs)
    for t in (pw, ipw, ca, sa, cb, sb):
        t.setflags(write=False)
    return ShiftGeometry(
        r_norm=float(pw[1]),
        cos_alpha=float(ca[1]),
        sin_alpha=float(sa[1]),
        cos_beta=float(cb[1]),
        sin_beta=float(sb[1]),
        pow=pw,
        inv_pow=ipw,
        cos_m_alpha=ca,
        sin_m_alpha=sa,
        cos_m_beta=cb,
        sin_m_beta=sb,
    )
