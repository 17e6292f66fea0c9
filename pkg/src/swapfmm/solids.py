"""Triangular storage of expansion coefficients.

A *solid* of order ``P`` holds the complex coefficients ``C_n^m`` for
``0 <= m <= n < P`` as ``P*(P+1)`` interleaved reals::

    pos = n*(n+1) + 2*m      real part
    pos = n*(n+1) + 2*m + 1  imaginary part

Rows are contiguous and ordered by increasing ``n``. Coefficients with
negative ``m`` are implied by ``C_n^{-m} = (-1)^m conj(C_n^m)``. The
imaginary slot of every ``m = 0`` coefficient is stored and kept at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

import numpy as np

from .errors import SolidFormatError

KINDS = ("M", "L", "R", "S")


def solid_size(order: int) -> int:
    """Number of reals needed for a solid of the given order."""
    return order * (order + 1)


def index_re(n: int, m: int) -> int:
    return n * (n + 1) + 2 * m


def index_im(n: int, m: int) -> int:
    return n * (n + 1) + 2 * m + 1


def _check_nm(order, n, m, signed=False):
    lo = -n if signed else 0
    if not (0 <= n < order and lo <= m <= n):
        raise IndexError(f"coefficient ({n}, {m}) outside solid of order {order}")


@dataclass
class Solid:
    """One expansion (``M``, ``L``) or one set of harmonic values (``R``, ``S``).

    ``data`` is the flat real array described in the module docstring; its
    dtype selects the precision (float32 or float64).
    """

    order: int
    kind: str = "M"
    data: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.data is None:
            self.data = np.zeros(solid_size(self.order))
        else:
            self.data = np.asarray(self.data)
            if self.data.dtype not in (np.float32, np.float64):
                self.data = self.data.astype(np.float64)
        if self.data.shape != (solid_size(self.order),):
            raise ValueError(
                f"data must have shape ({solid_size(self.order)},), got {self.data.shape}"
            )

    @classmethod
    def zeros(cls, order, kind="M", dtype=np.float64):
        return cls(order, kind, np.zeros(solid_size(order), dtype=dtype))

    @classmethod
    def from_complex(cls, values, kind="M", dtype=np.float64):
        """Build a solid from a triangular ``(P, P)`` complex array.

        Only entries with ``0 <= m <= n`` are read. Imaginary parts of the
        ``m = 0`` entries are discarded.
        """
        values = np.asarray(values)
        order = values.shape[0]
        s = cls.zeros(order, kind, dtype)
        for n in range(order):
            for m in range(n + 1):
                s[n, m] = values[n, m]
        return s

    @property
    def dtype(self):
        return self.data.dtype

    def coeff(self, n: int, m: int) -> complex:
        """Coefficient ``C_n^m`` for any ``-n <= m <= n``."""
        _check_nm(self.order, n, m, signed=True)
        if m >= 0:
            i = index_re(n, m)
            return complex(self.data[i], self.data[i + 1])
        i = index_re(n, -m)
        c = complex(self.data[i], -self.data[i + 1])
        return -c if m % 2 else c

    def __getitem__(self, nm):
        return self.coeff(*nm)

    def __setitem__(self, nm, value):
        n, m = nm
        _check_nm(self.order, n, m)
        value = complex(value)
        i = index_re(n, m)
        self.data[i] = value.real
        self.data[i + 1] = value.imag if m > 0 else 0.0

    def row(self, n: int) -> np.ndarray:
        """Complex row ``C_n^m`` for ``m = -n..n``."""
        return np.array([self.coeff(n, m) for m in range(-n, n + 1)])

    def to_triangle(self) -> np.ndarray:
        """Dense ``(P, P)`` complex array with ``out[n, m] = C_n^m`` for ``m <= n``."""
        out = np.zeros((self.order, self.order), dtype=complex)
        pairs = self.data.astype(np.float64).reshape(-1, 2)
        z = pairs[:, 0] + 1j * pairs[:, 1]
        for n in range(self.order):
            out[n, : n + 1] = z[n * (n + 1) // 2 : (n + 1) * (n + 2) // 2]
        return out

    def copy(self) -> "Solid":
        return Solid(self.order, self.kind, self.data.copy())

    def truncated(self, order: int) -> "Solid":
        """Copy restricted (or zero-extended) to another order."""
        out = Solid.zeros(order, self.kind, self.dtype)
        k = solid_size(min(order, self.order))
        out.data[:k] = self.data[:k]
        return out


def coeff(s: Solid, n: int, m: int) -> complex:
    return s.coeff(n, m)


def write_solids(solids: Iterable[Solid], fh: TextIO) -> None:
    """Write solids in the ``SOLID <kind> <P>`` text format."""
    for s in solids:
        fh.write(f"SOLID {s.kind} {s.order}\n")
        values = s.data.astype(np.float64)
        for n in range(s.order):
            row = values[n * (n + 1) : (n + 1) * (n + 2)]
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _tokens(fh):
    for lineno, line in enumerate(fh, start=1):
        for tok in line.split("#", 1)[0].split():
            yield lineno, tok


def read_solids(fh: TextIO, dtype=np.float64) -> list[Solid]:
    """Parse every solid in a text stream.

    Raises :class:`SolidFormatError` carrying the offending line number.
    """
    out = []
    toks: Iterator = _tokens(fh)
    lineno = 0
    for lineno, tok in toks:
        if tok != "SOLID":
            raise SolidFormatError(f"expected 'SOLID' header, got {tok!r}", lineno)
        try:
            lineno, kind = next(toks)
            lineno, order_tok = next(toks)
        except StopIteration:
            raise SolidFormatError("truncated SOLID header", lineno) from None
        if kind not in KINDS:
            raise SolidFormatError(f"unknown solid kind {kind!r}", lineno)
        try:
            order = int(order_tok)
        except ValueError:
            raise SolidFormatError(f"invalid order {order_tok!r}", lineno) from None
        if order < 1:
            raise SolidFormatError(f"order must be >= 1, got {order}", lineno)
        data = np.empty(solid_size(order), dtype=dtype)
        for i in range(data.size):
            try:
                lineno, tok = next(toks)
            except StopIteration:
                raise SolidFormatError(
                    f"expected {data.size} values for order {order}, got {i}", lineno
                ) from None
            try:
                data[i] = float(tok)
            except ValueError:
                raise SolidFormatError(f"invalid number {tok!r}", lineno) from None
        out.append(Solid(order, kind, data))
    return out
