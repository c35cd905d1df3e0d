"""Multivariate Bezout matrices by evaluation and interpolation on Fourier grids.

For a system ``f = (f_1, ..., f_n)`` and ``k = 0..n`` (with ``x_0 = 1``) the
Bezout polynomial ``delta(x_k)`` is the determinant of the ``n x n`` matrix of
divided differences. Its coefficient matrix ``B(x_k)`` is recovered from the
values of ``delta(x_k)`` on a product grid ``U x V`` of scaled roots of unity:
``C = F_u B F_v^T`` with ``F_u``, ``F_v`` unitary up to a factor ``sqrt(D)``.

Monomial and grid enumeration is mixed radix with the first variable varying
slowest; the same order is used for grid points, exponent boxes and the
rows/columns of every matrix.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from .poly import (MultiPoly, PolySystem, box_monomials, divided_difference,
                   format_poly, parse)

__all__ = [
    "FourierGrid",
    "EvalMatrix",
    "BezoutFamily",
    "OracleSizeError",
    "fourier_points",
    "delta_matrix_at",
    "evaluation_matrix",
    "interpolate",
    "build_family",
    "symbolic_delta",
    "symbolic_bezout_polys",
    "symbolic_family",
    "dump_family",
    "load_family",
]

PRUNE_TOL = 1e-8


class OracleSizeError(ValueError):
    """The symbolic determinant path refuses instances above its size guard."""


@dataclass(frozen=True)
class FourierGrid:
    """Evaluation points ``U``, ``V`` and their normalised Vandermonde matrices.

    ``U_axes[j]`` holds the ``(j+1) d_j`` roots of ``X^m - 1``; ``V_axes[j]`` the
    ``(n-j) d_j`` roots of ``X^m - exp(i pi / (j+1))`` (``j`` zero-based).
    """

    d: tuple
    U_axes: tuple
    V_axes: tuple

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def D(self) -> int:
        return int(np.prod([len(a) for a in self.U_axes]))

    @property
    def x_extents(self) -> tuple:
        return tuple(len(a) for a in self.U_axes)

    @property
    def y_extents(self) -> tuple:
        return tuple(len(a) for a in self.V_axes)

    @cached_property
    def U(self) -> np.ndarray:
        return np.array(list(product(*self.U_axes)), dtype=complex)

    @cached_property
    def V(self) -> np.ndarray:
        return np.array(list(product(*self.V_axes)), dtype=complex)

    @cached_property
    def x_box(self) -> np.ndarray:
        return box_monomials(self.x_extents)

    @cached_property
    def y_box(self) -> np.ndarray:
        return box_monomials(self.y_extents)

    @cached_property
    def F_u(self) -> np.ndarray:
        """``[u^alpha] / sqrt(D)``, rows indexed by ``U``, columns by the x box."""
        return _kron_vandermonde(self.U_axes)

    @cached_property
    def F_v(self) -> np.ndarray:
        return _kron_vandermonde(self.V_axes)


def _kron_vandermonde(axes) -> np.ndarray:
    F = np.ones((1, 1), dtype=complex)
    for pts in axes:
        m = len(pts)
        F = np.kron(F, np.vander(pts, m, increasing=True) / np.sqrt(m))
    return F


def fourier_points(d: Sequence[int]) -> FourierGrid:
    d = tuple(int(v) for v in d)
    if not d or any(v < 1 for v in d):
        raise ValueError(f"multidegree entries must be >= 1, got {d}")
    n = len(d)
    U_axes, V_axes = [], []
    for j in range(1, n + 1):
        mu = j * d[j - 1]
        mv = (n - j + 1) * d[j - 1]
        U_axes.append(np.exp(2j * np.pi * np.arange(mu) / mu))
        # roots of X^mv = exp(i pi / j)
        V_axes.append(np.exp(1j * (np.pi / j + 2 * np.pi * np.arange(mv)) / mv))
    return FourierGrid(d, tuple(U_axes), tuple(V_axes))


# ---------------------------------------------------------------------------
# numeric evaluation of the divided-difference matrix


def _mixed(u: np.ndarray, v: np.ndarray, j: int) -> tuple:
    """Points ``(v_<j, u_>=j)`` and ``(v_<=j, u_>j)`` broadcast together."""
    u, v = np.broadcast_arrays(u, v)
    p1 = np.concatenate([v[..., :j], u[..., j:]], axis=-1)
    p2 = np.concatenate([v[..., :j + 1], u[..., j + 1:]], axis=-1)
    return p1, p2


def _numerators(f: PolySystem, u: np.ndarray, v: np.ndarray) -> tuple:
    """Values of ``f_i`` at the two mixed points of every column ``j``."""
    n = f.nvars
    first = np.empty((n, n) + np.broadcast_shapes(u.shape, v.shape)[:-1], dtype=complex)
    second = np.empty_like(first)
    for j in range(n):
        p1, p2 = _mixed(u, v, j)
        for i, fi in enumerate(f.polys):
            first[i, j] = fi.evaluate(p1)
            second[i, j] = fi.evaluate(p2)
    return first, second


def _delta_stack(first, second, u, v, k: int) -> np.ndarray:
    """Stack of finite-difference matrices, shape ``(..., n, n)``."""
    n = first.shape[0]
    u, v = np.broadcast_arrays(u, v)
    diff = u - v
    if np.any(diff == 0):
        raise ZeroDivisionError("u_j == v_j: divided difference undefined on the diagonal")
    out = np.empty(u.shape[:-1] + (n, n), dtype=complex)
    for j in range(n):
        a, b = first[:, j], second[:, j]
        if k == j + 1:
            num = v[..., j] * a - u[..., j] * b
        else:
            num = a - b
        out[..., :, j] = np.moveaxis(num / diff[..., j], 0, -1)
    return out


def _as_system(f) -> PolySystem:
    return f if isinstance(f, PolySystem) else PolySystem(tuple(f))


def delta_matrix_at(f, k: int, u, v) -> np.ndarray:
    """Finite-difference matrix of ``x_k`` evaluated at ``x = u``, ``y = v``."""
    f = _as_system(f)
    if not 0 <= k <= f.nvars:
        raise IndexError(f"k must be in 0..{f.nvars}")
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    first, second = _numerators(f, u, v)
    return _delta_stack(first, second, u, v, k)


@dataclass(frozen=True)
class EvalMatrix:
    k: int
    C: np.ndarray


def _grid_numerators(f: PolySystem, grid: FourierGrid):
    u = grid.U[:, None, :]
    v = grid.V[None, :, :]
    first, second = _numerators(f, u, v)
    return first, second, u, v


def evaluation_matrix(f, k: int, grid: FourierGrid = None, _cache=None) -> EvalMatrix:
    """``C[u, v] = det Delta(x_k)(u, v)`` over the whole grid (LU determinants)."""
    f = _as_system(f)
    if not 0 <= k <= f.nvars:
        raise IndexError(f"k must be in 0..{f.nvars}")
    grid = grid or fourier_points(f.multidegree)
    first, second, u, v = _cache or _grid_numerators(f, grid)
    deltas = _delta_stack(first, second, u, v, k)
    return EvalMatrix(k, np.linalg.det(deltas))


def interpolate(C, grid: FourierGrid) -> np.ndarray:
    """Recover ``B`` from ``C = F_u B F_v^T`` (unnormalised Vandermonde factors)."""
    C = C.C if isinstance(C, EvalMatrix) else np.asarray(C)
    return grid.F_u.conj().T @ C @ grid.F_v.conj() / grid.D


# ---------------------------------------------------------------------------
# co-indexed family


@dataclass
class BezoutFamily:
    """Matrices ``B(1), B(x_1), ..., B(x_n)`` sharing row and column labels.

    Row labels are polynomials in ``x`` stored as ``row_monos @ row_coeffs``:
    label ``i`` is ``sum_a row_coeffs[a, i] * x^row_monos[a]``. Column labels are
    polynomials in ``y`` stored the same way. With these conventions the formal
    product ``row_labels . B(x_k) . col_labels^T`` is ``delta(x_k)``.
    """

    n: int
    mats: list
    row_monos: np.ndarray
    row_coeffs: np.ndarray
    col_monos: np.ndarray
    col_coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mats = [np.asarray(M, dtype=complex) for M in self.mats]
        shape = self.mats[0].shape
        if any(M.shape != shape for M in self.mats):
            raise ValueError("all matrices of a family must share one shape")
        if self.row_coeffs.shape[1] != shape[0] or self.col_coeffs.shape[1] != shape[1]:
            raise ValueError("label count does not match matrix shape")

    @classmethod
    def from_monomials(cls, n, mats, row_monos, col_monos, meta=None) -> "BezoutFamily":
        row_monos = np.asarray(row_monos, dtype=int).reshape(-1, n)
        col_monos = np.asarray(col_monos, dtype=int).reshape(-1, n)
        return cls(n, list(mats), row_monos, np.eye(len(row_monos), dtype=complex),
                   col_monos, np.eye(len(col_monos), dtype=complex), dict(meta or {}))

    @property
    def shape(self) -> tuple:
        return self.mats[0].shape

    @property
    def B1(self) -> np.ndarray:
        return self.mats[0]

    @property
    def row_labels(self) -> list:
        return [MultiPoly.from_coeffs(self.row_monos, self.row_coeffs[:, i])
                for i in range(self.row_coeffs.shape[1])]

    @property
    def col_labels(self) -> list:
        return [MultiPoly.from_coeffs(self.col_monos, self.col_coeffs[:, i])
                for i in range(self.col_coeffs.shape[1])]

    def row_label_strings(self) -> list:
        names = [f"x{j + 1}" for j in range(self.n)]
        return [format_poly(p, names) for p in self.row_labels]

    def col_label_strings(self) -> list:
        names = [f"y{j + 1}" for j in range(self.n)]
        return [format_poly(p, names) for p in self.col_labels]

    def copy(self) -> "BezoutFamily":
        return BezoutFamily(self.n, [M.copy() for M in self.mats], self.row_monos.copy(),
                            self.row_coeffs.copy(), self.col_monos.copy(),
                            self.col_coeffs.copy(), dict(self.meta))

    def transpose(self) -> "BezoutFamily":
        """Swap the roles of rows (x side) and columns (y side)."""
        return BezoutFamily(self.n, [M.T.copy() for M in self.mats], self.col_monos.copy(),
                            self.col_coeffs.copy(), self.row_monos.copy(),
                            self.row_coeffs.copy(), dict(self.meta))

    def prune(self, tol: float = PRUNE_TOL) -> "BezoutFamily":
        """Drop rows and columns that vanish in every matrix of the family."""
        scale = max(np.abs(M).max(initial=0.0) for M in self.mats)
        if scale == 0:
            return BezoutFamily(self.n, [M[:0, :0] for M in self.mats], self.row_monos,
                                self.row_coeffs[:, :0], self.col_monos,
                                self.col_coeffs[:, :0], dict(self.meta))
        mag = np.max([np.abs(M) for M in self.mats], axis=0)
        keep_r = mag.max(axis=1) > tol * scale
        keep_c = mag.max(axis=0) > tol * scale
        return BezoutFamily(self.n, [M[np.ix_(keep_r, keep_c)] for M in self.mats],
                            self.row_monos, self.row_coeffs[:, keep_r], self.col_monos,
                            self.col_coeffs[:, keep_c], dict(self.meta))

    def formal_product(self, k: int, x, y) -> complex:
        """Value of ``row_labels(x) . B(x_k) . col_labels(y)^T``."""
        rx = _monomial_values(self.row_monos, x) @ self.row_coeffs
        cy = _monomial_values(self.col_monos, y) @ self.col_coeffs
        return complex(rx @ self.mats[k] @ cy)


def _monomial_values(monos: np.ndarray, point) -> np.ndarray:
    point = np.asarray(point, dtype=complex)
    return np.prod(point[None, :] ** monos, axis=1)


def build_family(f, prune: bool = True, grid: FourierGrid = None) -> BezoutFamily:
    """All ``n + 1`` Bezout matrices of ``f`` by evaluation-interpolation."""
    f = _as_system(f)
    grid = grid or fourier_points(f.multidegree)
    cache = _grid_numerators(f, grid)
    mats = [interpolate(evaluation_matrix(f, k, grid, cache), grid) for k in range(f.nvars + 1)]
    fam = BezoutFamily.from_monomials(f.nvars, mats, grid.x_box, grid.y_box,
                                      meta={"D": grid.D, "multidegree": list(grid.d)})
    return fam.prune() if prune else fam


# ---------------------------------------------------------------------------
# symbolic oracle


def symbolic_delta(f, k: int) -> list:
    """The ``n x n`` matrix of :class:`MultiPoly` divided differences for ``x_k``."""
    f = _as_system(f)
    n = f.nvars
    return [[divided_difference(f.polys[i], i, j, 1 if k == j + 1 else 0) for j in range(n)]
            for i in range(n)]


def _det(M: list) -> MultiPoly:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = MultiPoly.zero(M[0][0].nvars)
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def symbolic_bezout_polys(f, max_D: int = 1024) -> list:
    """Exact ``delta(x_k)`` for ``k = 0..n`` by cofactor expansion."""
    f = _as_system(f)
    D = int(np.prod([(j + 1) * dj for j, dj in enumerate(f.multidegree)]))
    if f.nvars > 3 or D > max_D:
        raise OracleSizeError(f"symbolic oracle limited to n <= 3 and D <= {max_D} "
                              f"(got n={f.nvars}, D={D})")
    return [_det(symbolic_delta(f, k)) for k in range(f.nvars + 1)]


def symbolic_family(f, prune: bool = True, max_D: int = 1024) -> BezoutFamily:
    """Bezout family from exact symbolic determinants, indexed like :func:`build_family`."""
    f = _as_system(f)
    n = f.nvars
    grid = fourier_points(f.multidegree)
    polys = symbolic_bezout_polys(f, max_D)
    xe, ye = grid.x_extents, grid.y_extents
    mats = []
    for p in polys:
        B = np.zeros((grid.D, grid.D), dtype=complex)
        for e, c in p.terms.items():
            ex, ey = e[:n], e[n:]
            if any(a >= m for a, m in zip(ex, xe)) or any(b >= m for b, m in zip(ey, ye)):
                raise ValueError(f"monomial {e} outside the exponent boxes {xe}, {ye}")
            B[np.ravel_multi_index(ex, xe), np.ravel_multi_index(ey, ye)] += c
        mats.append(B)
    fam = BezoutFamily.from_monomials(n, mats, grid.x_box, grid.y_box,
                                      meta={"D": grid.D, "multidegree": list(grid.d),
                                            "oracle": True})
    return fam.prune() if prune else fam


# ---------------------------------------------------------------------------
# serialisation


def _encode_matrix(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _decode_matrix(rows, shape) -> np.ndarray:
    arr = np.asarray(rows, dtype=float).reshape(shape + (2,))
    return arr[..., 0] + 1j * arr[..., 1]


def dump_family(fam: BezoutFamily, path=None) -> dict:
    """JSON dump with formatted labels and dense ``[re, im]`` matrices."""
    doc = {
        "n": fam.n,
        "shape": list(fam.shape),
        "row_labels": fam.row_label_strings(),
        "col_labels": fam.col_label_strings(),
        "mats": [_encode_matrix(M) for M in fam.mats],
        "meta": fam.meta,
    }
    if path is not None:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
    return doc


def _labels_to_coeffs(labels: list, n: int) -> tuple:
    monos = sorted({e for p in labels for e in p.terms}, key=lambda e: e)
    monos_arr = np.array(monos, dtype=int).reshape(-1, n)
    index = {e: a for a, e in enumerate(monos)}
    coeffs = np.zeros((len(monos), len(labels)), dtype=complex)
    for i, p in enumerate(labels):
        for e, c in p.terms.items():
            coeffs[index[e], i] = c
    return monos_arr, coeffs


def load_family(src) -> BezoutFamily:
    """Inverse of :func:`dump_family`; accepts a path or an already-parsed dict."""
    if not isinstance(src, dict):
        with open(src) as fh:
            src = json.load(fh)
    n = src["n"]
    shape = tuple(src["shape"])
    rows = [parse(s, [f"x{j + 1}" for j in range(n)]) for s in src["row_labels"]]
    cols = [parse(s, [f"y{j + 1}" for j in range(n)]) for s in src["col_labels"]]
    rm, rc = _labels_to_coeffs(rows, n)
    cm, cc = _labels_to_coeffs(cols, n)
    mats = [_decode_matrix(M, shape) for M in src["mats"]]
    return BezoutFamily(n, mats, rm, rc, cm, cc, dict(src.get("meta", {})))
