"""Two equations in two unknowns, step by step.

    x1^2 + x1*x2^2 - 1 = 0
    x1^2*x2 + x1       = 0
"""
import numpy as np

from bezout.bezmat import build_family, symbolic_family
from bezout.poly import PolySystem
from bezout.reduce import reduce_family
from bezout.solve import companions, joint_eigen, log_error_histogram, verify

np.set_printoptions(precision=4, suppress=True)
f = PolySystem.from_strings(["x1^2 + x1*x2^2 - 1", "x1^2*x2 + x1"])

fam = build_family(f)            # Fourier evaluation + interpolation
exact = symbolic_family(f)       # determinant expansion, for comparison
print("rows:", fam.row_label_strings())
print("cols:", fam.col_label_strings())
print("B(1) =\n", fam.B1.real)
print("largest gap to the exact matrices:",
      max(np.abs(a - b).max() for a, b in zip(fam.mats, exact.mats)))

rf = reduce_family(fam)
print(f"\nrank B(1) = {rf.initial_rank.rank}, dim A = {rf.dimA}, steps = {rf.iterations}")
for rel in rf.relations:
    print("  relation:", rel)
print("basis of A:", [str(p) for p in rf.family.row_labels])

cs = companions(rf)
for j, X in enumerate(cs.X, 1):
    print(f"X{j} =\n", X)
print("commutator error:", cs.commutator_error())

roots = verify(joint_eigen(cs, seed=0), f)
for r in roots:
    print("root", np.round(r.coords, 6), "residual", f"{r.max_residual:.1e}")
print(log_error_histogram(roots, bins=8).to_csv())
