"""The three translations inside a tiny two-level FMM.

The library does not build trees; it is meant to sit inside one. This script
plays the tree's part by hand: charges fill eight child boxes in each of two
distant parents. Child expansions are merged upward with M2M, converted
across with M2L, and pushed down to the target children with L2L.
"""

import itertools

import numpy as np

from swapfmm import Solid, TranslationRequest, direct_potential, eval_local, l2l, m2l, m2m, operator_data, p2m

P = 14
ops = operator_data(P)
rng = np.random.default_rng(1)

offsets = np.array(list(itertools.product((-0.25, 0.25), repeat=3)))
src_parent, tgt_parent = np.zeros(3), np.array([3.0, 0.5, 1.0])


def fill(parent):
    return [(parent + o, parent + o + rng.uniform(-0.25, 0.25, (15, 3))) for o in offsets]


sources = fill(src_parent)
charges = [rng.uniform(-1, 1, 15) for _ in sources]

# upward pass: leaves to parent
leaf_M = [p2m((pts, q), c, P) for (c, pts), q in zip(sources, charges)]
moved = m2m(ops, [TranslationRequest(M, src_parent - c) for M, (c, _) in zip(leaf_M, sources)])
M_parent = Solid(P, "M", sum(M.data for M in moved))

# across: one M2L between the parents
(L_parent,) = m2l(ops, [TranslationRequest(M_parent, tgt_parent - src_parent)])

# downward pass: parent local expansion to every target child
targets = fill(tgt_parent)
L_children = l2l(ops, [TranslationRequest(L_parent, c - tgt_parent) for c, _ in targets])

all_src = np.concatenate([pts for _, pts in sources])
all_q = np.concatenate(charges)
worst = 0.0
for L, (c, pts) in zip(L_children, targets):
    approx = np.array([eval_local(L, c, x) for x in pts])
    exact = direct_potential(pts, (all_src, all_q))
    worst = max(worst, np.abs(approx - exact).max() / np.abs(exact).max())
print(f"{len(all_q)} charges, {sum(len(p) for _, p in targets)} targets, order {P}")
print(f"largest relative error after M2M, M2L, L2L: {worst:.2e}")
