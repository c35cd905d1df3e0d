"""Univariate Bezout matrices and the Barnett formula.

For f = x^2 - 3x + 2 the Bezout matrix B(g) of f and g encodes the quotient
(f(x) g(y) - f(y) g(x)) / (x - y). Dividing by B(1) turns B(g) into the
matrix of multiplication by g modulo f.
"""
import numpy as np

from bezout.bezout1d import (barnett, bezout_matrix_1d, companion, family_1d,
                             generalized_barnett, horner_basis)
from bezout.reduce import reduce_family

np.set_printoptions(precision=4, suppress=True)
f = (1, -3, 2)

print("B(1) =\n", bezout_matrix_1d(f, 1).real)
print("B(x) =\n", bezout_matrix_1d(f, (1, 0)).real)
print("columns of B(1) as polynomials:", [p.coeffs for p in horner_basis(f)])

X = barnett(f)
print("\nB(x) B(1)^-1 =\n", X.real)
print("companion(f) =\n", companion(f).real)
print("eigenvalues:", np.sort(np.linalg.eigvals(X).real))

print("\nx^2 acting on C[x]/(f):\n", generalized_barnett(f, (1, 0, 0)).real)

# g = x^3 has higher degree than f: the 3x3 pair (B(1), B(g)) is reduced first
rf = reduce_family(family_1d(f, (1, 0, 0, 0), 3))
print("\nreduction of the 3x3 family: steps =", rf.iterations,
      "relation found:", rf.relations[0])
print("x^3 acting on C[x]/(f):\n", generalized_barnett(f, (1, 0, 0, 0)).real)
