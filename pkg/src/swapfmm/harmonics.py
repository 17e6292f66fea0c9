"""Regular and singular solid harmonics, expansions of point charges.

Harmonics are evaluated in Cartesian coordinates with the recurrences of
Dehnen (2014), which need only elementary arithmetic and one square root.
Multipole expansions are formed without conjugating ``R``::

    M_n^m = sum_j q_j R_n^m(x_j - c)

and evaluated as ``sum M_n^m conj(S_n^m(x - c))``; local expansions as
``sum L_n^m conj(R_n^m(x - c))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numba
import numpy as np

from .errors import SingularPointError, SolidFormatError
from .solids import Solid, solid_size

#: ``p2m`` uses ``R_n^m`` as is; the conjugate appears only in evaluation.
P2M_CONJUGATES_R = False

_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class PointCharge:
    position: tuple
    charge: float

    def __post_init__(self):
        pos = tuple(float(c) for c in self.position)
        if len(pos) != 3 or not all(math.isfinite(c) for c in pos):
            raise ValueError(f"position must be a finite 3-vector, got {self.position}")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "charge", float(self.charge))


@numba.njit(cache=True, nogil=True)
def regular_into(x, y, z, order, out):
    """Write ``R_n^m(x, y, z)`` for ``n < order`` into the solid array ``out``."""
    out[:] = 0.0
    r2 = x * x + y * y + z * z
    out[0] = 1.0
    if r2 < 2.2250738585072014e-308:
        return
    # diagonal: R_n^n = (x + iy) / (2n) * R_{n-1}^{n-1}
    dre = 1.0
    dim = 0.0
    for n in range(1, order):
        s = 1.0 / (2 * n)
        dre, dim = s * (x * dre - y * dim), s * (x * dim + y * dre)
        i = n * (n + 1) + 2 * n
        out[i] = dre
        out[i + 1] = dim
    # (n^2 - m^2) R_n^m = (2n-1) z R_{n-1}^m - |r|^2 R_{n-2}^m
    for m in range(order):
        for n in range(m + 1, order):
            i = n * (n + 1) + 2 * m
            i1 = (n - 1) * n + 2 * m
            c = 1.0 / ((n - m) * (n + m))
            a = (2 * n - 1) * z
            re = a * out[i1]
            im = a * out[i1 + 1]
            if n - 2 >= m:
                i2 = (n - 2) * (n - 1) + 2 * m
                re -= r2 * out[i2]
                im -= r2 * out[i2 + 1]
            out[i] = c * re
            out[i + 1] = c * im


@numba.njit(cache=True, nogil=True)
def singular_into(x, y, z, order, out):
    """Write ``S_n^m(x, y, z)`` for ``n < order`` into ``out``; ``r`` must be nonzero."""
    out[:] = 0.0
    r2 = x * x + y * y + z * z
    inv_r2 = 1.0 / r2
    out[0] = math.sqrt(inv_r2)
    # diagonal: S_n^n = (2n - 1) (x + iy) / |r|^2 * S_{n-1}^{n-1}
    dre = out[0]
    dim = 0.0
    for n in range(1, order):
        s = (2 * n - 1) * inv_r2
        dre, dim = s * (x * dre - y * dim), s * (x * dim + y * dre)
        i = n * (n + 1) + 2 * n
        out[i] = dre
        out[i + 1] = dim
    # |r|^2 S_n^m = (2n-1) z S_{n-1}^m - ((n-1)^2 - m^2) S_{n-2}^m
    for m in range(order):
        for n in range(m + 1, order):
            i = n * (n + 1) + 2 * m
            i1 = (n - 1) * n + 2 * m
            a = (2 * n - 1) * z
            re = a * out[i1]
            im = a * out[i1 + 1]
            if n - 2 >= m:
                i2 = (n - 2) * (n - 1) + 2 * m
                b = (n - 1) * (n - 1) - m * m
                re -= b * out[i2]
                im -= b * out[i2 + 1]
            out[i] = inv_r2 * re
            out[i + 1] = inv_r2 * im


def _vec3(r):
    v = np.asarray(r, dtype=np.float64).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {np.shape(r)}")
    return v


def _is_zero(v):
    # |r| subnormal or zero counts as the origin
    return float(np.dot(v, v)) < _TINY


def regular(order: int, r, dtype=np.float64) -> Solid:
    """Regular harmonics ``R_n^m(r)``, ``0 <= m <= n < order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    x, y, z = _vec3(r)
    out = np.empty(solid_size(order))
    if _is_zero(np.array([x, y, z])):
        x = y = z = 0.0
    regular_into(x, y, z, order, out)
    return Solid(order, "R", out.astype(dtype, copy=False))


def singular(order: int, r, dtype=np.float64) -> Solid:
    """Singular harmonics ``S_n^m(r)``; raises :class:`SingularPointError` at ``r = 0``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    v = _vec3(r)
    if _is_zero(v):
        raise SingularPointError("singular harmonics evaluated at r = 0")
    out = np.empty(solid_size(order))
    singular_into(v[0], v[1], v[2], order, out)
    return Solid(order, "S", out.astype(dtype, copy=False))


def _charges(sources):
    """Split sources into ``(positions (N, 3), charges (N,))`` arrays."""
    if isinstance(sources, tuple) and len(sources) == 2 and not isinstance(
        sources[0], PointCharge
    ):
        pos, q = sources
        return np.asarray(pos, dtype=np.float64).reshape(-1, 3), np.asarray(
            q, dtype=np.float64
        ).reshape(-1)
    sources = list(sources)
    pos = np.array([s.position for s in sources], dtype=np.float64).reshape(-1, 3)
    q = np.array([s.charge for s in sources], dtype=np.float64)
    return pos, q


def direct_potential(targets, sources) -> np.ndarray:
    """Sum ``q_j / |x_i - x_j|`` at every target.

    ``sources`` is a sequence of :class:`PointCharge` or a ``(positions, charges)``
    pair of arrays.
    """
    tgt = np.asarray(targets, dtype=np.float64).reshape(-1, 3)
    pos, q = _charges(sources)
    d = np.linalg.norm(tgt[:, None, :] - pos[None, :, :], axis=-1)
    if np.any(d == 0.0):
        raise SingularPointError("a target coincides with a source position")
    return (q[None, :] / d).sum(axis=1)


@numba.njit(cache=True)
def _p2m_kernel(pos, q, cx, cy, cz, order, out):
    buf = np.empty_like(out)
    out[:] = 0.0
    for j in range(pos.shape[0]):
        regular_into(pos[j, 0] - cx, pos[j, 1] - cy, pos[j, 2] - cz, order, buf)
        for i in range(out.size):
            out[i] += q[j] * buf[i]


def p2m(sources, center, order: int, dtype=np.float64) -> Solid:
    """Multipole expansion of point charges about ``center``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    pos, q = _charges(sources)
    c = _vec3(center)
    out = np.zeros(solid_size(order))
    if len(q):
        _p2m_kernel(pos, q, c[0], c[1], c[2], order, out)
    return Solid(order, "M", out.astype(dtype, copy=False))


def _pair_sum(coeffs, harmonics, order):
    """Real part of ``sum_{n, |m| <= n} C_n^m conj(H_n^m)`` from ``m >= 0`` data."""
    c = coeffs.astype(np.float64).reshape(-1, 2)
    h = harmonics.reshape(-1, 2)
    prod = c[:, 0] * h[:, 0] + c[:, 1] * h[:, 1]
    weights = np.full(prod.size, 2.0)
    weights[[n * (n + 1) // 2 for n in range(order)]] = 1.0
    return float(np.dot(weights, prod))


def eval_multipole(M: Solid, center, x) -> float:
    """Value of the multipole expansion ``M`` about ``center`` at ``x``."""
    d = _vec3(x) - _vec3(center)
    if _is_zero(d):
        raise SingularPointError("multipole expansion evaluated at its center")
    S = np.empty(solid_size(M.order))
    singular_into(d[0], d[1], d[2], M.order, S)
    return _pair_sum(M.data, S, M.order)


def eval_local(L: Solid, center, x) -> float:
    """Value of the local expansion ``L`` about ``center`` at ``x``."""
    d = _vec3(x) - _vec3(center)
    R = np.empty(solid_size(L.order))
    if _is_zero(d):
        d = np.zeros(3)
    regular_into(d[0], d[1], d[2], L.order, R)
    return _pair_sum(L.data, R, L.order)


def read_charges(fh: TextIO) -> list[PointCharge]:
    """Parse ``x y z q`` lines; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(fh, start=1):
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        if len(fields) != 4:
            raise SolidFormatError(f"expected 'x y z q', got {len(fields)} fields", lineno)
        try:
            x, y, z, q = (float(f) for f in fields)
            out.append(PointCharge((x, y, z), q))
        except ValueError as exc:
            raise SolidFormatError(str(exc), lineno) from None
    return out


def write_charges(charges: Sequence[PointCharge], fh: TextIO) -> None:
    for c in charges:
        fh.write(" ".join(repr(v) for v in (*c.position, c.charge)) + "\n")
