import io
import math

import numpy as np
from numpy.polynomial import Legendre
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapfmm import (
    PointCharge,
    SingularPointError,
    Solid,
    direct_potential,
    eval_local,
    eval_multipole,
    p2m,
    read_charges,
    regular,
    singular,
    write_charges,
)

coord = st.floats(-3, 3, allow_nan=False)
vec = st.tuples(coord, coord, coord).filter(lambda v: sum(c * c for c in v) > 1e-2)
off_axis = vec.filter(lambda v: v[0] * v[0] + v[1] * v[1] > 1e-4)


def _spherical(r):
    x, y, z = r
    rad = math.sqrt(x * x + y * y + z * z)
    return rad, z / rad, math.atan2(y, x)


def _legendre(n, m, c):
    # Rodrigues form (1 - c^2)^{m/2} d^m/dc^m P_n(c), no Condon-Shortley phase
    return (1 - c * c) ** (m / 2) * Legendre.basis(n).deriv(m)(c)


def regular_ref(n, m, r):
    rad, c, phi = _spherical(r)
    return rad**n * _legendre(n, m, c) * np.exp(1j * m * phi) / math.factorial(n + m)


def singular_ref(n, m, r):
    rad, c, phi = _spherical(r)
    return math.factorial(n - m) * _legendre(n, m, c) * np.exp(1j * m * phi) / rad ** (n + 1)


def test_regular_examples():
    R = regular(2, (1, 2, 3))
    assert R[1, 1] == pytest.approx(0.5 + 1.0j)
    R = regular(12, (0, 0, 1))
    for n in range(12):
        assert R[n, 0].real == pytest.approx(1 / math.factorial(n), rel=1e-15)
    R = regular(3, (0, 0, 0))
    assert R.data[0] == 1 and not R.data[1:].any()


def test_singular_examples():
    assert singular(1, (0, 0, 2))[0, 0] == pytest.approx(0.5)
    assert singular(2, (0, 0, 2))[1, 0] == pytest.approx(0.25)
    S = singular(10, (0, 0, 1.7))
    for n in range(10):
        assert all(S[n, m] == 0 for m in range(1, n + 1))
    with pytest.raises(SingularPointError):
        singular(3, (0, 0, 0))


@settings(max_examples=50, deadline=None)
@given(off_axis)
def test_harmonics_match_legendre_form(r):
    P = 8
    R, S = regular(P, r), singular(P, r)
    for n in range(P):
        Rref = np.array([regular_ref(n, m, r) for m in range(n + 1)])
        Sref = np.array([singular_ref(n, m, r) for m in range(n + 1)])
        got_R = np.array([R[n, m] for m in range(n + 1)])
        got_S = np.array([S[n, m] for m in range(n + 1)])
        assert np.abs(got_R - Rref).max() <= 1e-12 * np.abs(Rref).max()
        assert np.abs(got_S - Sref).max() <= 1e-12 * np.abs(Sref).max()


@settings(max_examples=30, deadline=None)
@given(vec, st.floats(0.05, 0.3))
def test_addition_theorem(x, frac):
    # 1/|x - y| = sum_n sum_m R_n^m(y) conj(S_n^m(x)) for |y| < |x|
    x = np.array(x)
    rng = np.random.default_rng(int(1e6 * frac))
    y = rng.normal(size=3)
    y *= frac * np.linalg.norm(x) / np.linalg.norm(y)
    M = regular(40, y)
    approx = eval_multipole(Solid(40, "M", M.data), (0, 0, 0), x)
    assert approx == pytest.approx(1 / np.linalg.norm(x - y), rel=1e-12)


def test_direct_potential_examples():
    assert direct_potential([(0, 0, 2)], [PointCharge((0, 0, 0), 1)])[0] == 0.5
    two = [PointCharge((1, 0, 0), 1), PointCharge((-1, 0, 0), 1)]
    assert direct_potential([(0, 0, 0)], two)[0] == 2.0
    rng = np.random.default_rng(3)
    pos, q = rng.normal(size=(10, 3)), rng.normal(size=10)
    tgt = rng.normal(size=(4, 3)) + 10
    ref = [math.fsum(qj / math.dist(t, p) for p, qj in zip(pos, q)) for t in tgt]
    assert np.allclose(direct_potential(tgt, (pos, q)), ref, rtol=1e-14, atol=0)
    with pytest.raises(SingularPointError):
        direct_potential([(1, 0, 0)], two)


def test_p2m_examples():
    M = p2m([PointCharge((1, 2, 3), 2.5)], (1, 2, 3), 4)
    assert M.data[0] == 2.5 and not M.data[1:].any()
    d = 0.7
    M = p2m([PointCharge((0, 0, d), 1)], (0, 0, 0), 10)
    for n in range(10):
        assert M[n, 0].real == pytest.approx(d**n / math.factorial(n), rel=1e-14)
        assert all(M[n, m] == 0 for m in range(1, n + 1))


def test_no_conjugation_convention():
    # a charge off the z-axis in y pins the sign of Im(M_n^m)
    a, X = 0.4, 1.5
    errs = [
        abs(eval_multipole(p2m([PointCharge((0, a, 0), 1)], (0, 0, 0), P), (0, 0, 0), (0, X, 0))
            - 1 / (X - a))
        for P in (2, 6, 12, 24)
    ]
    assert all(e1 > e2 for e1, e2 in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12


def test_eval_examples():
    M = Solid.zeros(3)
    M[0, 0] = 1
    assert eval_multipole(M, (1, 1, 1), (1, 1, 3)) == pytest.approx(0.5)
    M = p2m([PointCharge((0, 0, 0.25), 1)], (0, 0, 0), 10)
    assert eval_multipole(M, (0, 0, 0), (0, 0, 2)) == pytest.approx(1 / 1.75, abs=1e-8)
    L = Solid.zeros(2, "L")
    L[1, 1] = 1
    assert eval_local(L, (0, 0, 0), (0.3, -2, 5)) == pytest.approx(0.3)
    with pytest.raises(SingularPointError):
        eval_multipole(M, (0, 0, 0), (0, 0, 0))


def test_charges_round_trip():
    charges = [PointCharge((0.1, -2, 3e-5), 1.5), PointCharge((1, 1, 1), -2)]
    buf = io.StringIO()
    write_charges(charges, buf)
    assert read_charges(io.StringIO("# header\n\n" + buf.getvalue())) == charges
    with pytest.raises(ValueError, match="line 2"):
        read_charges(io.StringIO("1 2 3 4\n1 2 3\n"))
