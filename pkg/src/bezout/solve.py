"""Companion matrices from a reduced family, joint eigenvectors and roots."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .bezmat import BezoutFamily, build_family, symbolic_family
from .poly import MultiPoly, PolySystem
from .reduce import ReducedFamily, default_tau, reduce_family

__all__ = [
    "ConditioningError",
    "CompanionSet",
    "Root",
    "RootSet",
    "Histogram",
    "companions",
    "joint_eigen",
    "verify",
    "log_error_histogram",
    "solve_system",
    "SolveResult",
]

log = logging.getLogger(__name__)

CLUSTER_TOL = 1e-8
MAX_ATTEMPTS = 4


class ConditioningError(ArithmeticError):
    """``B(1)`` could not be inverted, or the companion matrices do not commute."""


@dataclass
class CompanionSet:
    n: int
    dimA: int
    X: list
    basis_labels: list
    cond: float = 1.0
    ill_conditioned: bool = False

    def commutator_error(self) -> float:
        """Largest ``|X_j X_k - X_k X_j|_max`` relative to ``max_l |X_l|^2`` (2-norms)."""
        if self.dimA == 0 or self.n < 2:
            return 0.0
        scale = max(np.linalg.norm(X, 2) for X in self.X) ** 2
        if scale == 0:
            return 0.0
        worst = 0.0
        for j in range(self.n):
            for k in range(j + 1, self.n):
                A, B = self.X[j], self.X[k]
                worst = max(worst, np.abs(A @ B - B @ A).max() / scale)
        return worst


def companions(rf, tau: float = None) -> CompanionSet:
    """``X_j`` from ``X_j B(1) = B(x_j)``.

    Accepts a :class:`ReducedFamily` or a square :class:`BezoutFamily`.
    A condition number of ``B(1)`` above ``1/tau`` is flagged, not fatal.
    """
    fam = rf.family if isinstance(rf, ReducedFamily) else rf
    if tau is None:
        tau = rf.tau if isinstance(rf, ReducedFamily) else default_tau(fam.shape[0])
    m = fam.shape[0]
    n = len(fam.mats) - 1
    labels = fam.row_labels
    if m == 0:
        return CompanionSet(n, 0, [np.zeros((0, 0), complex) for _ in range(n)], labels)
    B1 = fam.B1
    cond = float(np.linalg.cond(B1))
    if not np.isfinite(cond):
        raise ConditioningError("B(1) is singular")
    X = [np.linalg.solve(B1.T, Bk.T).T for Bk in fam.mats[1:]]
    if not all(np.isfinite(Xj).all() for Xj in X):
        raise ConditioningError("non-finite companion matrix")
    ill = cond * tau > 1.0
    if ill:
        log.warning("B(1) condition number %.3g exceeds 1/tau = %.3g", cond, 1 / tau)
    return CompanionSet(n, m, X, labels, cond, ill)


@dataclass
class Root:
    coords: np.ndarray
    residuals: np.ndarray = None
    eigvec_index: int = 0
    multiplicity: int = 1

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals, initial=0.0)) if self.residuals is not None else np.nan


@dataclass
class RootSet:
    roots: list
    seed: int = 0
    combination: np.ndarray = None
    eigvecs: np.ndarray = None
    attempts: int = 1
    clustered: bool = False

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def coords(self) -> np.ndarray:
        n = len(self.combination) if self.combination is not None else 0
        if not self.roots:
            return np.zeros((0, n), complex)
        return np.array([r.coords for r in self.roots])

    def max_residuals(self) -> np.ndarray:
        return np.array([r.max_residual for r in self.roots])

    def sorted_lex(self, decimals: int = 6) -> list:
        """Coordinates rounded and sorted by (real, imag) of each coordinate in turn."""
        rows = [tuple(c for z in np.round(r.coords, decimals) for c in (z.real + 0.0, z.imag + 0.0))
                for r in self.roots]
        return sorted(rows)

    def to_records(self) -> list:
        out = []
        for r in self.roots:
            out.append({
                "x": [[float(z.real), float(z.imag)] for z in r.coords],
                "residuals": None if r.residuals is None else [float(v) for v in r.residuals],
                "multiplicity": int(r.multiplicity),
            })
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_records(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RootSet":
        roots = []
        for i, rec in enumerate(json.loads(text)):
            coords = np.array([complex(a, b) for a, b in rec["x"]])
            res = None if rec.get("residuals") is None else np.array(rec["residuals"], float)
            roots.append(Root(coords, res, i, rec.get("multiplicity", 1)))
        return cls(roots)


def _clusters(vals: np.ndarray, tol: float) -> np.ndarray:
    """Label eigenvalues so that values within ``tol`` (transitively) share a label."""
    m = len(vals)
    labels = np.arange(m)
    for a in range(m):
        for b in range(a + 1, m):
            if abs(vals[a] - vals[b]) <= tol and labels[b] != labels[a]:
                labels[labels == labels[b]] = labels[a]
    return labels


def joint_eigen(cs: CompanionSet, seed: int = 0, max_attempts: int = MAX_ATTEMPTS) -> RootSet:
    """Pair the coordinates of each root through a common eigenvector.

    A random real combination ``X_c = sum c_j X_j`` is diagonalized; for an
    eigenvector ``v`` with dominant entry ``i`` the j-th coordinate is
    ``(X_j v)_i / v_i``. (A Rayleigh quotient ``v^H X_j v / v^H v`` would
    also do; the ratio is cheaper and exact for true eigenpairs.)
    Coinciding eigenvalues of ``X_c`` trigger a retry with the next seed.
    """
    n, m = cs.n, cs.dimA
    if m == 0:
        return RootSet([], seed, np.zeros(n))
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        c = rng.uniform(-1.0, 1.0, n)
        Xc = sum(cj * Xj for cj, Xj in zip(c, cs.X))
        vals, vecs = np.linalg.eig(Xc)
        tol = CLUSTER_TOL * max(np.linalg.norm(Xc, 2), 1.0)
        labels = _clusters(vals, tol)
        if len(np.unique(labels)) == m:
            break
        log.info("joint_eigen: clustered eigenvalues on attempt %d", attempt)
    mult = np.array([np.count_nonzero(labels == lb) for lb in labels])
    roots = []
    for t in range(m):
        v = vecs[:, t]
        i = int(np.argmax(np.abs(v)))
        coords = np.array([(Xj[i] @ v) / v[i] for Xj in cs.X])
        roots.append(Root(coords, None, t, int(mult[t])))
    return RootSet(roots, seed, c, vecs, attempt, bool((mult > 1).any()))


def verify(roots: RootSet, f) -> RootSet:
    """Fill ``|f_i(root)|`` and sort by largest residual."""
    f = f if isinstance(f, PolySystem) else PolySystem(tuple(f))
    filled = [replace(r, residuals=np.abs(f.residuals(r.coords))) for r in roots.roots]
    filled.sort(key=lambda r: r.max_residual)
    return replace(roots, roots=filled)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_left", "bin_right", "count"])
        for a, b, k in zip(self.edges[:-1], self.edges[1:], self.counts):
            w.writerow([f"{a:g}", f"{b:g}", int(k)])
        return buf.getvalue()


def log_error_histogram(roots: RootSet, bins: int = 16, lo: float = -16.0,
                        hi: float = 0.0) -> Histogram:
    """Counts of ``log10(max residual)`` over ``[lo, hi]``; out-of-range values go to the end bins."""
    edges = np.linspace(lo, hi, bins + 1)
    counts = np.zeros(bins, dtype=int)
    for r in roots.roots:
        e = r.max_residual
        x = lo if e == 0 else np.log10(e)
        k = int(np.clip(np.searchsorted(edges, x, side="right") - 1, 0, bins - 1))
        counts[k] += 1
    return Histogram(edges, counts)


@dataclass
class SolveResult:
    system: PolySystem
    family: BezoutFamily
    reduced: ReducedFamily
    companions: CompanionSet
    roots: RootSet
    meta: dict = field(default_factory=dict)


def solve_system(f: PolySystem, tau: float = None, seed: int = 0, use_blocks: bool = False,
                 oracle: bool = False) -> SolveResult:
    """Full pipeline: family, reduction, companion matrices, roots, residuals."""
    fam = symbolic_family(f) if oracle else build_family(f)
    rf = reduce_family(fam, tau=tau, use_blocks=use_blocks)
    cs = companions(rf)
    roots = verify(joint_eigen(cs, seed), f)
    return SolveResult(f, fam, rf, cs, roots)
