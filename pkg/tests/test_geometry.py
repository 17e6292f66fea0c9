import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapfmm import ZeroShiftError, decompose

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
shift = st.tuples(coord, coord, coord).filter(lambda v: math.hypot(*v) > 1e-6)


def test_z_axis_shift():
    g = decompose((0, 0, 5), 4)
    assert (g.cos_alpha, g.sin_alpha, g.cos_beta, g.sin_beta) == (1, 0, 1, 0)
    g = decompose((0, 0, -5), 4)
    assert (g.cos_alpha, g.sin_alpha, g.cos_beta) == (1, 0, -1)
    assert g.sin_beta == 0


def test_planar_shift():
    g = decompose((3, 4, 0), 4)
    assert g.r_norm == 5
    assert g.cos_alpha == pytest.approx(0.8)
    assert g.sin_alpha == pytest.approx(0.6)
    assert g.cos_beta == 0 and g.sin_beta == -1


def test_powers():
    g = decompose((1, 1, 1), 3)
    s = math.sqrt(3)
    assert np.allclose(g.pow, [1, s, 3, 3 * s], rtol=1e-15)
    assert np.allclose(g.inv_pow * g.pow, 1, rtol=1e-13)


def test_zero_shift():
    with pytest.raises(ZeroShiftError):
        decompose((0, 0, 0), 3)
    with pytest.raises(ZeroShiftError):
        decompose((1e-160, 0, 0), 3)


def test_extreme_coordinates():
    g = decompose((3e200, 4e200, 0), 1)
    assert g.cos_alpha == pytest.approx(0.8) and g.sin_beta == pytest.approx(-1)
    g = decompose((3e-150, 4e-150, 0), 1)
    assert g.cos_alpha == pytest.approx(0.8)


@settings(max_examples=200)
@given(shift)
def test_unit_circle_and_forward_rotation(r):
    g = decompose(r, 2)
    assert abs(g.cos_alpha**2 + g.sin_alpha**2 - 1) <= 1e-14
    assert abs(g.cos_beta**2 + g.sin_beta**2 - 1) <= 1e-14
    assert g.cos_m_alpha[0] == 1 and g.sin_m_alpha[0] == 0
    assert g.cos_m_beta[0] == 1 and g.sin_m_beta[0] == 0
    # the angles reproduce r from its length
    x, y, z = r
    rho = -g.sin_beta * g.r_norm
    assert math.isclose(g.sin_alpha * rho, x, rel_tol=1e-12, abs_tol=1e-12 * g.r_norm)
    assert math.isclose(g.cos_alpha * rho, y, rel_tol=1e-12, abs_tol=1e-12 * g.r_norm)
    assert math.isclose(g.cos_beta * g.r_norm, z, rel_tol=1e-12, abs_tol=1e-12 * g.r_norm)


@settings(max_examples=100)
@given(shift)
def test_multiples_match_powers(r):
    g = decompose(r, 60)
    m = np.arange(61)
    ea = (g.cos_alpha + 1j * g.sin_alpha) ** m
    eb = (g.cos_beta + 1j * g.sin_beta) ** m
    assert np.abs(g.cos_m_alpha + 1j * g.sin_m_alpha - ea).max() <= 1e-12
    assert np.abs(g.cos_m_beta + 1j * g.sin_m_beta - eb).max() <= 1e-12


def test_no_trigonometric_calls():
    import inspect

    from swapfmm import geometry

    src = inspect.getsource(geometry)
    for name in ("sin(", "cos(", "atan", "arctan", "acos"):
        assert f"math.{name}" not in src and f"np.{name}" not in src
