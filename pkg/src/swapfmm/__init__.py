"""Batched M2L, M2M and L2L translations of solid-harmonic expansions.

The fast translations factor each operator into z-rotations, x/z axis
swaps with precomputed packed matrices, and a translation along the unit
z-axis, giving O(P^3) work per translation instead of O(P^4).

    >>> from swapfmm import PointCharge, operator_data, m2l_arrays, p2m
    >>> ops = operator_data(10)
    >>> M = p2m([PointCharge((0.1, 0.0, 0.0), 1.0)], (0, 0, 0), 10)
    >>> L = m2l_arrays(ops, M.data, [(0.0, 0.0, 4.0)])
"""

from .errors import (
    OrderTooLargeError,
    SingularPointError,
    SolidFormatError,
    SwapFMMError,
    WorkspaceMismatchError,
    ZeroShiftError,
)
from .geometry import ShiftGeometry, decompose
from .harmonics import (
    PointCharge,
    direct_potential,
    eval_local,
    eval_multipole,
    p2m,
    read_charges,
    regular,
    singular,
    write_charges,
)
from .kernels import KernelConfig, kernel_hankel, kernel_swap, rotate_scale_rows
from .operators import (
    OperatorData,
    faculties,
    max_order,
    operator_data,
    pack,
    swap_matrices,
    unpack,
    wigner_b,
)
from .pipeline import (
    L2L_SIGN,
    M2M_SIGN,
    TranslationRequest,
    Workspace,
    l2l,
    l2l_arrays,
    m2l,
    m2l_arrays,
    m2l_naive,
    m2l_naive_arrays,
    m2m,
    m2m_arrays,
)
from .solids import Solid, coeff, index_im, index_re, read_solids, solid_size, write_solids

__version__ = "0.1.0"
