"""A tour of the precomputed tables behind the fast translations.

Rotating an expansion about the y-axis by 90 degrees exchanges the x- and
z-axes. Dehnen's matrices B_n do exactly that for row n of a solid, and
because the swap is its own inverse, B_n B_n = I. The library splits B_n
into a real-part matrix F_n and an imaginary-part matrix G_n acting on the
m >= 0 half of a row, then packs them into the order the blocked kernel
reads them.
"""

import numpy as np

from swapfmm import pack, regular, swap_matrices, wigner_b
from swapfmm.operators import _b_numerators

np.set_printoptions(linewidth=110, suppress=True)

# --- B_n, built exactly -----------------------------------------------------
print("B_1 (rows m = -1..1, columns l = -1..1):")
print(wigner_b(1))

# The entries are dyadic rationals. Their numerators outgrow a double around
# n = 29, so the recurrence runs on Python integers and rounds once at the end.
for n, N in enumerate(_b_numerators(30)):
    if n in (5, 20, 30):
        ok = (N.dot(N) == np.eye(2 * n + 1, dtype=object) * 4**n).all()
        print(f"n = {n:2d}: largest |B| entry {float(np.abs(N).max()) / 2**n:10.3e}, "
              f"exact B.B = I: {ok}")

# --- F and G ----------------------------------------------------------------
F, G = swap_matrices(4)
print("\nF_4 (only entries with m + l even survive):")
print(F)
print("G_4 (first row and column are zero, odd chequerboard):")
print(G)

# F and G really swap x and z: feed them the harmonics of a point.
x, y, z = 0.3, -0.7, 1.1
a = regular(5, (x, y, z)).to_triangle()[4]
b = regular(5, (z, y, x)).to_triangle()[4]
print("\nrow 4 of R(x, y, z) through F, G vs row 4 of R(z, y, x):")
print("  real:", F @ a.real, "\n       ", b.real)
print("  imag:", G @ a.imag, "\n       ", b.imag)

# --- Packing ----------------------------------------------------------------
# A mu-row panel is stored column by column, keeping only the rows whose
# parity matches the chequerboard, so half of each panel column is skipped.
F1, _ = swap_matrices(1)
print("\nF_1 =", F1.tolist())
print("packed with mu = 6, parity 1:", pack(F1, 1, 6, 1).tolist())
F9, _ = swap_matrices(9)
print(f"F_9: {F9.size} dense entries, {pack(F9, 9, 6, 1).size} packed (rows padded to 12)")
