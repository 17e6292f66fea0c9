"""How accurate is the O(P^3) M2L compared with the O(P^4) double sum?

Both compute the same local expansion. The fast path rotates the source so
that the shift points along +z, translates along z with a matrix of
factorials, and rotates back. The naive path sums every pair of
coefficients directly.
"""

import numpy as np

from swapfmm import Solid, direct_potential, eval_local, m2l_arrays, m2l_naive_arrays, operator_data, p2m
from swapfmm.verify import m2l_term_scale, normalized_error, random_shifts, random_solids

rng = np.random.default_rng(0)
ops = operator_data(30)

# Random multipole coefficients are drawn at the size a real expansion has,
# |M_n^m| ~ 1 / sqrt((n-m)! (n+m)!). Errors are measured in the matching
# normalized basis, relative to the largest term that enters the sums.
print(" P   fast vs naive   (relative to largest coefficient)   raw coefficients, uniform input")
for P in (2, 5, 10, 15, 20, 25, 30):
    src, sh = random_solids(rng, 100, P), random_shifts(rng, 100)
    fast, ref = m2l_arrays(ops, src, sh), m2l_naive_arrays(src, sh)
    err = normalized_error(fast, ref, scale=m2l_term_scale(src, sh))
    plain = normalized_error(fast, ref)
    uni = random_solids(rng, 100, P, natural=False)
    raw = normalized_error(m2l_arrays(ops, uni, sh), m2l_naive_arrays(uni, sh), kind=None)
    print(f"{P:2d}   {err:12.1e}   {plain:12.1e}                         {raw:12.1e}")

# The last column shows the price of the rotation route: the axis swaps are
# orthogonal only for naturally scaled coefficients. Fed coefficients that no
# physical expansion produces, they amplify rounding by roughly 2^n.

# --- End to end ---------------------------------------------------------------
# Twenty charges around the origin, twenty targets around c; the local
# expansion converges geometrically with the order.
src = rng.uniform(-0.5, 0.5, (20, 3))
q = rng.uniform(-1, 1, 20)
c = np.array([3.0, 1.5, -1.0])
tgt = rng.uniform(-0.5, 0.5, (20, 3)) + c
exact = direct_potential(tgt, (src, q))
print("\n P   potential error")
for P in (2, 4, 6, 8, 10, 14, 18):
    M = p2m((src, q), np.zeros(3), P)
    L = Solid(P, "L", m2l_arrays(ops, M.data, [c], P)[0])
    approx = np.array([eval_local(L, c, x) for x in tgt])
    print(f"{P:2d}   {np.abs(approx - exact).max() / np.abs(exact).max():.2e}")
