"""Univariate Bezout matrices, companion matrices and Barnett formulas.

``f = a_0 x^d + ... + a_d`` with ``a_0 != 0``. Coefficient vectors are stored
highest degree first, as in :func:`numpy.polyval`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bezmat import BezoutFamily
from .poly import MultiPoly, _telescope

__all__ = [
    "UniPoly",
    "DegenerateLeadingCoefficient",
    "companion",
    "bezout_matrix_1d",
    "barnett",
    "generalized_barnett",
    "horner_basis",
    "roots_1d",
    "family_1d",
]


class DegenerateLeadingCoefficient(ValueError):
    pass


@dataclass(frozen=True)
class UniPoly:
    coeffs: tuple   # a_0 (leading) ... a_d (constant)

    def __post_init__(self):
        c = tuple(complex(v) for v in np.atleast_1d(self.coeffs))
        object.__setattr__(self, "coeffs", c if c else (0j,))

    @classmethod
    def from_low(cls, low: Sequence) -> "UniPoly":
        return cls(tuple(low)[::-1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def low(self) -> np.ndarray:
        """Coefficients lowest degree first."""
        return np.array(self.coeffs[::-1])

    def trimmed(self) -> "UniPoly":
        c = np.trim_zeros(np.array(self.coeffs), "f")
        return UniPoly(tuple(c) if c.size else (0,))

    def __call__(self, x):
        return np.polyval(np.array(self.coeffs), x)

    def to_multipoly(self) -> MultiPoly:
        return MultiPoly(1, {(k,): c for k, c in enumerate(self.low)})


def _as_uni(p) -> UniPoly:
    if isinstance(p, UniPoly):
        return p
    if isinstance(p, MultiPoly):
        if p.nvars != 1:
            raise ValueError("expected a univariate polynomial")
        deg = max(p.degree(), 0)
        low = [p.terms.get((k,), 0) for k in range(deg + 1)]
        return UniPoly.from_low(low)
    if np.isscalar(p):
        return UniPoly((p,))
    return UniPoly(tuple(p))


def _check_leading(f: UniPoly):
    if f.coeffs[0] == 0:
        raise DegenerateLeadingCoefficient("leading coefficient a_0 is zero")
    if f.degree < 1:
        raise ValueError("f must have degree >= 1")


def companion(f) -> np.ndarray:
    """Matrix of multiplication by ``x`` in the monomial basis ``1, x, ..., x^(d-1)``."""
    f = _as_uni(f)
    _check_leading(f)
    a = np.array(f.coeffs)
    d = f.degree
    X = np.zeros((d, d), dtype=complex)
    X[np.arange(1, d), np.arange(d - 1)] = 1
    X[:, -1] = -a[:0:-1] / a[0]
    return X


def bezout_matrix_1d(f, g, m: int = None) -> np.ndarray:
    """``B(g)`` with ``(f(x) g(y) - f(y) g(x)) / (x - y) = sum b_ab x^a y^b``.

    Built term by term from the exact telescoping quotient, so integer
    inputs give integer (and symmetric) output.
    """
    f, g = _as_uni(f), _as_uni(g)
    need = max(f.degree, g.degree)
    m = need if m is None else m
    if m < need:
        raise ValueError(f"m = {m} is smaller than max(deg f, deg g) = {need}")
    B = np.zeros((m, m), dtype=complex)
    for p, fp in enumerate(f.low):
        if fp == 0:
            continue
        for q, gq in enumerate(g.low):
            if gq == 0:
                continue
            sign, pairs = _telescope(p, q)
            for a, b in pairs:
                B[a, b] += sign * fp * gq
    return B


def family_1d(f, g, m: int = None) -> BezoutFamily:
    """``(B(1), B(g))`` at size ``m`` as a co-indexed family with monomial labels."""
    f, g = _as_uni(f), _as_uni(g)
    m = max(f.degree, g.degree) if m is None else m
    mats = [bezout_matrix_1d(f, 1, m), bezout_matrix_1d(f, g, m)]
    monos = np.arange(m).reshape(-1, 1)
    return BezoutFamily.from_monomials(1, mats, monos, monos)


def barnett(f) -> np.ndarray:
    """``B(x) B(1)^{-1}``, which equals :func:`companion` of ``f``."""
    f = _as_uni(f)
    _check_leading(f)
    B1 = bezout_matrix_1d(f, 1, f.degree)
    Bx = bezout_matrix_1d(f, (1, 0), f.degree)
    return np.linalg.solve(B1.T, Bx.T).T


def _remainder_matrix(labels: np.ndarray, f: UniPoly) -> np.ndarray:
    """Columns of ``labels`` (low-first coefficient vectors) reduced modulo ``f``."""
    d = f.degree
    fa = np.array(f.coeffs)
    T = np.zeros((d, labels.shape[1]), dtype=complex)
    for i in range(labels.shape[1]):
        _, r = np.polydiv(labels[::-1, i], fa)
        r = r[::-1]
        T[:len(r), i] = r[:d]
    return T


def generalized_barnett(f, g) -> np.ndarray:
    """``g(X)`` in the monomial basis, computed as ``B(g) B(1)^{-1}``.

    When ``deg g > deg f`` the two matrices are built at size ``deg g`` and the
    family is reduced until ``B(1)`` is invertible of size ``deg f``; the result
    is then expressed back in the monomial basis.
    """
    from .reduce import reduce_family

    f, g = _as_uni(f).trimmed(), _as_uni(g).trimmed()
    _check_leading(f)
    d = f.degree
    if g.degree <= d:
        B1 = bezout_matrix_1d(f, 1, d)
        Bg = bezout_matrix_1d(f, g, d)
        return np.linalg.solve(B1.T, Bg.T).T
    rf = reduce_family(family_1d(f, g, g.degree))
    if rf.dimA != d:
        raise ArithmeticError(f"reduction ended at size {rf.dimA}, expected {d}")
    fam = rf.family
    M = np.linalg.solve(fam.B1.T, fam.mats[1].T).T
    # final row labels b satisfy g b = b M; with b = (1, x, ..) T this is T M T^{-1}
    labels = np.zeros((g.degree, d), dtype=complex)
    labels[fam.row_monos[:, 0]] = fam.row_coeffs
    T = _remainder_matrix(labels, f)
    return T @ M @ np.linalg.inv(T)


def horner_basis(f) -> list:
    """Columns of ``B(1)`` read as polynomials: ``a_{d-1-k} + ... + a_0 x^{d-1-k}``."""
    f = _as_uni(f)
    _check_leading(f)
    B1 = bezout_matrix_1d(f, 1, f.degree)
    return [UniPoly.from_low(np.trim_zeros(B1[:, k], "b")) for k in range(f.degree)]


def roots_1d(f) -> np.ndarray:
    """Eigenvalues of the companion matrix (unsorted)."""
    return np.linalg.eigvals(companion(f))
