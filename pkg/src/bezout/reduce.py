"""Reduction of a Bezout family to bases of the quotient algebra.

While ``B(1)`` is singular, a kernel direction ``v`` is moved onto a single
column ``c`` by a unitary column transform. Column ``c`` of some ``B(x_k)``,
read against the row labels, is then a polynomial that vanishes in the
quotient; a Householder row transform concentrates it on one row ``r`` whose
label becomes that relation. Row ``r`` and column ``c`` are dropped from every
matrix and the loop repeats. The labels left at the end are bases of ``A``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_bipartite_matching

from .bezmat import BezoutFamily
from .poly import MultiPoly

__all__ = [
    "NonZeroDimensional",
    "RankReport",
    "ReducedFamily",
    "default_tau",
    "numerical_rank",
    "block_triangularize",
    "block_qrp",
    "compress_family",
    "kernel_vector",
    "reduce_family",
    "householder_vector",
]

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps
LABEL_TOL = 1e-13   # relative; smaller label coefficients are rounding noise


class NonZeroDimensional(ArithmeticError):
    """A kernel direction of ``B(1)`` produced no relation: the ideal is not zero-dimensional."""


def default_tau(size: int) -> float:
    """Default relative threshold ``size * eps``."""
    return max(size, 1) * EPS


@dataclass
class RankReport:
    diag: np.ndarray
    rank: int
    threshold: float
    tau: float
    perm: np.ndarray = None
    block_structure: list = None

    def span_decades(self) -> float:
        """``log10(max / min)`` over the diagonal entries counted in the rank."""
        kept = self.diag[self.diag > self.threshold]
        if kept.size == 0:
            return 0.0
        return float(np.log10(kept.max() / kept.min()))

    def to_dict(self) -> dict:
        return {
            "size": int(self.diag.size),
            "rank": int(self.rank),
            "tau": float(self.tau),
            "threshold": float(self.threshold),
            "diag": [float(v) for v in self.diag],
            "block_structure": self.block_structure,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "abs_rii", "block", "above_threshold"])
        block_of = np.zeros(self.diag.size, dtype=int)
        for b, (lo, hi) in enumerate(self.block_structure or [(0, self.diag.size)]):
            block_of[lo:hi] = b
        for i, v in enumerate(self.diag):
            w.writerow([i, repr(float(v)), int(block_of[i]), int(v > self.threshold)])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# block triangular form


def _topological(ncomp: int, edges: set) -> list:
    indeg = [0] * ncomp
    succ = [[] for _ in range(ncomp)]
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    import heapq
    ready = [c for c in range(ncomp) if indeg[c] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        c = heapq.heappop(ready)
        order.append(c)
        for s in succ[c]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(ready, s)
    return order


def _upper_block_form(pattern: np.ndarray):
    """Dulmage-Mendelsohn style block *upper* triangular form of a 0/1 pattern.

    Returns row order, column order and ``[(r0, r1, c0, c1), ...]`` in that
    order. The underdetermined part (reachable from unmatched columns) comes
    first, then the strongly connected square blocks, then the overdetermined
    part (reachable from unmatched rows).
    """
    m, n = pattern.shape
    S = csr_matrix(pattern.astype(np.int8))
    row_match = maximum_bipartite_matching(S, perm_type="column")   # row -> col
    col_match = -np.ones(n, dtype=int)
    for r, c in enumerate(row_match):
        if c >= 0:
            col_match[c] = r
    rows_of_col = [np.flatnonzero(pattern[:, c]) for c in range(n)]
    cols_of_row = [np.flatnonzero(pattern[r, :]) for r in range(m)]

    # underdetermined: alternating paths from unmatched columns
    h_cols, h_rows = set(), set()
    stack = [c for c in range(n) if col_match[c] < 0]
    h_cols.update(stack)
    while stack:
        c = stack.pop()
        for r in rows_of_col[c]:
            if r not in h_rows:
                h_rows.add(r)
                c2 = row_match[r]
                if c2 >= 0 and c2 not in h_cols:
                    h_cols.add(c2)
                    stack.append(c2)
    # overdetermined: alternating paths from unmatched rows
    v_rows, v_cols = set(), set()
    stack = [r for r in range(m) if row_match[r] < 0 and r not in h_rows]
    v_rows.update(stack)
    while stack:
        r = stack.pop()
        for c in cols_of_row[r]:
            if c not in v_cols and c not in h_cols:
                v_cols.add(c)
                r2 = col_match[c]
                if r2 >= 0 and r2 not in v_rows:
                    v_rows.add(r2)
                    stack.append(r2)

    sq_rows = [r for r in range(m) if r not in h_rows and r not in v_rows and row_match[r] >= 0]
    blocks = []
    row_order, col_order = [], []

    def push(rs, cs):
        if not rs and not cs:
            return
        r0, c0 = len(row_order), len(col_order)
        row_order.extend(rs)
        col_order.extend(cs)
        blocks.append((r0, len(row_order), c0, len(col_order)))

    def push_components(rs, cs):
        # the rectangular parts split further into independent connected pieces
        rs, cs = sorted(rs), sorted(cs)
        if not rs or not cs:
            push(rs, cs)
            return
        sub = pattern[np.ix_(rs, cs)]
        G = csr_matrix(np.block([[np.zeros((len(rs),) * 2), sub],
                                 [sub.T, np.zeros((len(cs),) * 2)]]))
        ncomp, labels = connected_components(G, directed=False)
        for comp in range(ncomp):
            members = np.flatnonzero(labels == comp)
            push([rs[a] for a in members if a < len(rs)],
                 [cs[a - len(rs)] for a in members if a >= len(rs)])

    push_components(h_rows, h_cols)
    if sq_rows:
        idx = {r: a for a, r in enumerate(sq_rows)}
        # edge a -> b when row a touches the column matched to row b
        src, dst = [], []
        for r in sq_rows:
            for c in cols_of_row[r]:
                r2 = col_match[c]
                if r2 in idx and r2 != r:
                    src.append(idx[r])
                    dst.append(idx[r2])
        G = csr_matrix((np.ones(len(src)), (src, dst)), shape=(len(sq_rows),) * 2)
        ncomp, labels = connected_components(G, directed=True, connection="strong")
        # renumber components by smallest member so tie-breaks are deterministic
        first = {}
        for a, lab in enumerate(labels):
            first.setdefault(lab, a)
        rename = {lab: k for k, lab in enumerate(sorted(first, key=first.get))}
        labels = np.array([rename[l] for l in labels])
        edges = {(labels[a], labels[b]) for a, b in zip(src, dst) if labels[a] != labels[b]}
        for comp in _topological(ncomp, edges):
            rs = [sq_rows[a] for a in np.flatnonzero(labels == comp)]
            push(rs, [int(row_match[r]) for r in rs])
    push_components(v_rows, v_cols)
    return np.array(row_order, dtype=int), np.array(col_order, dtype=int), blocks


def block_triangularize(M: np.ndarray, tol: float = 0.0):
    """Permutations putting ``M`` in block lower triangular form.

    Returns ``(row_perm, col_perm, blocks)`` such that ``M[row_perm][:, col_perm]``
    is block lower triangular with diagonal blocks
    ``blocks[b] = (r0, r1, c0, c1)`` listed from the top-left corner down.
    Entries with ``|M_ij| <= tol * max|M|`` count as structural zeros. A
    structurally singular remainder ends up in the first or last block.
    """
    M = np.asarray(M)
    scale = np.abs(M).max(initial=0.0)
    pattern = np.abs(M) > tol * scale if scale > 0 else np.zeros(M.shape, bool)
    # M is block lower triangular exactly when M^T is block upper triangular
    cols, rows, tblocks = _upper_block_form(pattern.T)
    blocks = [(c0, c1, r0, r1) for (r0, r1, c0, c1) in tblocks]
    for r0, r1, c0, c1 in blocks:
        rows[r0:r1] = np.sort(rows[r0:r1])
        cols[c0:c1] = np.sort(cols[c0:c1])
    return rows, cols, blocks


def block_qrp(M: np.ndarray, tol: float = 0.0, threshold: float = 0.0):
    """Householder QR with column pivoting restricted to one diagonal block at a time.

    Entries below ``tol * max|M|`` are treated as exact zeros. Inside a block,
    pivoting stops once the best remaining column norm drops to ``threshold``;
    the leftover columns are deferred and pivoted together at the end, so a
    weak column never takes a row that a later block could use.
    Returns ``(R, perm, col_blocks)`` with ``M[:, perm] = Q R``; ``col_blocks``
    are the ``[lo, hi)`` ranges of pivot positions belonging to each block,
    the deferred columns forming the last range.
    """
    M = np.asarray(M, dtype=complex)
    m, n = M.shape
    scale = np.abs(M).max(initial=0.0)
    pattern = np.abs(M) > tol * scale if scale > 0 else np.zeros(M.shape, bool)
    rows, cols, blocks = _upper_block_form(pattern)
    A = np.where(pattern, M, 0)[np.ix_(rows, cols)]
    perm = cols.copy()
    col_blocks = []
    i = 0

    def step(candidates, cut):
        nonlocal i
        norms = np.linalg.norm(A[i:, candidates], axis=0)
        best = int(np.argmax(norms))
        if norms[best] <= cut:
            return None
        p = candidates[best]
        if p != i:
            A[:, [i, p]] = A[:, [p, i]]
            perm[[i, p]] = perm[[p, i]]
        w, alpha = householder_vector(A[i:, i])
        if w is not None:
            A[i:, i:] -= 2.0 * np.outer(w, w.conj() @ A[i:, i:])
            A[i + 1:, i] = 0
            A[i, i] = alpha
        i += 1
        return p

    deferred = []   # original column ids
    for _, _, c0, c1 in blocks:
        ids = [int(c) for c in cols[c0:c1]]
        lo = i
        while ids and i < m:
            pos = [int(np.flatnonzero(perm == c)[0]) for c in ids]
            p = step(pos, threshold)
            if p is None:
                break
            ids.remove(int(perm[i - 1]))
        deferred.extend(ids)
        if i > lo:
            col_blocks.append((lo, i))
    lo = i
    while deferred and i < m:
        pos = [int(np.flatnonzero(perm == c)[0]) for c in deferred]
        if step(pos, 0.0) is None:
            break
        deferred.remove(int(perm[i - 1]))
    if n > lo:
        col_blocks.append((lo, n))
    return np.triu(A), perm, col_blocks


def _diag(R: np.ndarray, n: int) -> np.ndarray:
    d = np.zeros(n)
    k = min(R.shape)
    d[:k] = np.abs(np.diag(R)[:k])
    return d


def numerical_rank(M: np.ndarray, tau: float = None, use_blocks: bool = False,
                   block_tol: float = 1e-10) -> RankReport:
    """Rank from QR with column pivoting: ``#{i : |R_ii| > tau * |R_00|}``.

    ``|R_00|`` of the global QRP is the largest column norm of ``M``; the block
    path uses that same absolute cut so both paths count against one threshold.
    """
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return RankReport(np.zeros(0), 0, 0.0, tau or 0.0, np.zeros(0, int), [])
    n = M.shape[1]
    tau = default_tau(max(M.shape)) if tau is None else tau
    threshold = tau * np.linalg.norm(M, axis=0).max()
    if use_blocks:
        R, perm, col_blocks = block_qrp(M, block_tol, threshold)
    else:
        R, perm = sla.qr(M, mode="r", pivoting=True)
        col_blocks = None
    diag = _diag(R, n)
    rank = int(np.count_nonzero(diag > threshold))
    report = RankReport(diag, rank, threshold, tau, np.asarray(perm), col_blocks)
    report._R = R
    return report


def kernel_vector(M: np.ndarray, report: RankReport = None, tau: float = None,
                  use_blocks: bool = False):
    """Unit vector ``v`` with ``M v ~ 0``, or ``None`` when ``M`` has full column rank.

    Among the below-threshold pivot columns the one whose back-substituted
    null vector leaves the smallest residual is used.
    """
    if report is None:
        report = numerical_rank(M, tau, use_blocks)
    R = report._R
    n = M.shape[1]
    strong = np.flatnonzero(report.diag > report.threshold)
    weak = np.flatnonzero(report.diag <= report.threshold)
    if weak.size == 0:
        return None
    Rs = R[:, strong] if R.shape[0] >= n else np.vstack([R, np.zeros((n - R.shape[0], n))])[:, strong]
    Rw = R[:, weak] if R.shape[0] >= n else np.vstack([R, np.zeros((n - R.shape[0], n))])[:, weak]
    if strong.size:
        Z = np.linalg.lstsq(Rs, -Rw, rcond=None)[0]
        resid = np.linalg.norm(Rs @ Z + Rw, axis=0) / np.sqrt(1 + np.linalg.norm(Z, axis=0) ** 2)
    else:
        Z = np.zeros((0, weak.size))
        resid = np.linalg.norm(Rw, axis=0)
    t = int(np.argmin(resid))
    v = np.zeros(n, dtype=complex)
    perm = report.perm
    v[perm[strong]] = Z[:, t]
    v[perm[weak[t]]] = 1.0
    return v / np.linalg.norm(v)


def householder_vector(x: np.ndarray):
    """``(w, alpha)`` with ``(I - 2 w w^H) x = alpha e_0``; ``w`` is ``None`` if ``x == 0``."""
    x = np.asarray(x, dtype=complex)
    nx = np.linalg.norm(x)
    if nx == 0:
        return None, 0.0
    phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
    alpha = -phase * nx
    w = x.copy()
    w[0] -= alpha
    nw = np.linalg.norm(w)
    if nw == 0:
        return None, x[0]
    return w / nw, alpha


def _reflector_to(x: np.ndarray, p: int):
    """Householder vector sending ``x`` to a multiple of ``e_p``."""
    order = np.r_[p, np.delete(np.arange(x.size), p)]
    w, alpha = householder_vector(x[order])
    if w is None:
        return None, alpha
    out = np.empty_like(w)
    out[order] = w
    return out, alpha


# ---------------------------------------------------------------------------
# family compression and reduction


def _common_null_dims(fam: BezoutFamily, tau: float = None) -> tuple:
    r, c = fam.shape
    if r == 0 or c == 0:
        return r, c
    left = r - numerical_rank(np.hstack(fam.mats).conj().T, tau).rank
    right = c - numerical_rank(np.vstack(fam.mats), tau).rank
    return left, right


def compress_family(fam: BezoutFamily, tau: float = None) -> BezoutFamily:
    """Remove the common left and right null spaces of the family.

    Rows ``w`` with ``w^T B(x_k) = 0`` for every ``k`` (and dually for
    columns) carry nothing: after a unitary change of labels they are zero
    rows of every matrix and are dropped. All-zero rows and columns are the
    special case ``w = e_i``. The polynomial identity
    ``row_labels . B(x_k) . col_labels^T = delta(x_k)`` is kept exactly.
    """
    fam = fam.copy()
    r, c = fam.shape
    if r == 0 or c == 0:
        return _delete_all(fam)
    H = np.hstack(fam.mats)
    rep = numerical_rank(H.conj().T, tau)
    if rep.rank < r:
        Q, _, _ = sla.qr(H, pivoting=True)
        keep = slice(0, rep.rank)
        fam.mats = [(Q.conj().T @ M)[keep] for M in fam.mats]
        fam.row_coeffs = (fam.row_coeffs @ Q)[:, keep]
    if fam.shape[0] == 0:
        return _delete_all(fam)
    V = np.vstack(fam.mats)
    rep = numerical_rank(V, tau)
    if rep.rank < c:
        Q, _, _ = sla.qr(V.T, pivoting=True)
        keep = slice(0, rep.rank)
        # B -> B conj(Q); the trailing columns of conj(Q) span the null space of V
        fam.mats = [(M @ Q.conj())[:, keep] for M in fam.mats]
        fam.col_coeffs = (fam.col_coeffs @ Q)[:, keep]
    return fam


def _delete_all(fam: BezoutFamily) -> BezoutFamily:
    fam.mats = [M[:0, :0] for M in fam.mats]
    fam.row_coeffs = fam.row_coeffs[:, :0]
    fam.col_coeffs = fam.col_coeffs[:, :0]
    return fam


@dataclass
class ReducedFamily:
    family: BezoutFamily
    dimA: int
    relations: list
    transform_log: list
    initial_rank: RankReport
    final_rank: RankReport
    tau: float
    side: str = "x"
    compressed_size: int = None
    meta: dict = field(default_factory=dict)
    mirror_relations: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return sum(1 for t in self.transform_log if t["side"] == "delete")


def _column_transform(fam: BezoutFamily, w: np.ndarray):
    # B <- B H with H = I - 2 w w^H; column labels y' = y H^{-T} = y conj(H)
    for M in fam.mats:
        M -= 2.0 * np.outer(M @ w, w.conj())
    fam.col_coeffs -= 2.0 * np.outer(fam.col_coeffs @ w.conj(), w)


def _row_transform(fam: BezoutFamily, w: np.ndarray):
    # B <- G B, row labels x' = x G^{-1} = x G
    for M in fam.mats:
        M -= 2.0 * np.outer(w, w.conj() @ M)
    fam.row_coeffs -= 2.0 * np.outer(fam.row_coeffs @ w, w.conj())


def _gauss_row_transform(fam: BezoutFamily, col: np.ndarray, r: int):
    # P e_r = col / col_r; B <- P^{-1} B; x' = x P
    u = col / col[r]
    u[r] = 0.0
    for M in fam.mats:
        M -= np.outer(u, M[r])
    fam.row_coeffs[:, r] += fam.row_coeffs @ u


def _delete(fam: BezoutFamily, r: int, c: int):
    fam.mats = [np.delete(np.delete(M, r, axis=0), c, axis=1) for M in fam.mats]
    fam.row_coeffs = np.delete(fam.row_coeffs, r, axis=1)
    fam.col_coeffs = np.delete(fam.col_coeffs, c, axis=1)


def _clean_label(monos: np.ndarray, coeffs: np.ndarray) -> MultiPoly:
    t = LABEL_TOL * np.abs(coeffs).max(initial=0.0)
    c = np.where(np.abs(coeffs.real) > t, coeffs.real, 0) \
        + 1j * np.where(np.abs(coeffs.imag) > t, coeffs.imag, 0)
    return MultiPoly.from_coeffs(monos, c)


def _relation_step(fam: BezoutFamily, report: RankReport, tlog: list, transform: str,
                   side: str, prescribed=None) -> MultiPoly:
    """One deletion driven by a right kernel vector of ``B(1)``; returns the relation."""
    if prescribed is not None:
        c, k, r = prescribed
        if np.abs(fam.B1[:, c]).max() > 1e-12 * max(np.abs(fam.B1).max(), 1.0):
            raise ValueError(f"prescribed column {c} is not a zero column of B(1)")
    else:
        v = kernel_vector(fam.B1, report)
        c = int(np.argmax(np.abs(v)))
        w, _ = _reflector_to(v, c)
        if w is not None and not np.allclose(np.abs(v), np.eye(v.size)[c]):
            _column_transform(fam, w)
            tlog.append({"side": "col" if side == "x" else "row", "pivot": c, "reflector": w})
        norms = [np.linalg.norm(M[:, c]) for M in fam.mats[1:]]
        k = 1 + int(np.argmax(norms))
        zero_tol = max(report.threshold, EPS * max(np.abs(M).max() for M in fam.mats))
        if norms[k - 1] <= zero_tol:
            raise NonZeroDimensional(
                f"kernel direction of B(1) at size {fam.shape} gives no relation "
                f"(largest image norm {norms[k - 1]:.3g} <= {zero_tol:.3g})")
        r = None
    col = fam.mats[k][:, c].copy()
    if r is None:
        r = int(np.argmax(np.abs(col)))
    other = "row" if side == "x" else "col"
    if transform == "gauss":
        _gauss_row_transform(fam, col, r)
        tlog.append({"side": other, "pivot": r, "k": k, "gauss": col})
    else:
        w, _ = _reflector_to(col, r)
        if w is not None:
            _row_transform(fam, w)
        tlog.append({"side": other, "pivot": r, "k": k, "reflector": w})
    rel = _clean_label(fam.row_monos, fam.row_coeffs[:, r])
    _delete(fam, r, c)
    rc = (r, c) if side == "x" else (c, r)
    tlog.append({"side": "delete", "row": rc[0], "col": rc[1], "relation_side": side})
    return rel


def reduce_family(family: BezoutFamily, tau: float = None, use_blocks: bool = False,
                  side: str = "x", pivots=None, transform: str = "householder",
                  max_iter: int = None) -> ReducedFamily:
    """Run the reduction loop until ``B(1)`` is square and numerically invertible.

    Each pass first drops the common left/right null space of the family
    (exact: the formal products do not change). A right kernel vector of
    ``B(1)`` then yields a relation in ``x``; when ``B(1)`` has full column
    rank but more rows than its rank, a left kernel vector yields the mirror
    relation in ``y``.

    Parameters
    ----------
    family : BezoutFamily
        Co-indexed family, e.g. from :func:`bezout.bezmat.build_family`.
    tau : float, optional
        Relative rank threshold; defaults to ``size * eps``.
    use_blocks : bool
        Compute ranks and kernel directions with block-restricted pivoting.
    side : {"x", "y"}
        Preferred side for relations. ``"y"`` runs the mirror process on the
        transposed family; labels of the result are then swapped back.
    pivots : list of (c, k, r), optional
        Prescribed steps: column ``c`` of ``B(1)`` must already be zero,
        ``B(x_k)`` supplies the relation and ``r`` is the pivot row. Used to
        replay a hand-worked reduction.
    transform : {"householder", "gauss"}
        Row elimination used to isolate the relation.
    """
    fam = family.transpose() if side == "y" else family.copy()
    other = "x" if side == "y" else "y"
    if min(fam.shape) == 0 or max(np.abs(M).max() for M in fam.mats) == 0:
        raise NonZeroDimensional("the Bezout family vanishes identically")
    fam = compress_family(fam, tau)
    if min(fam.shape) == 0:
        raise NonZeroDimensional("the Bezout family has no part outside its common null spaces")
    size0 = max(fam.shape)
    tau = default_tau(size0) if tau is None else tau
    initial = numerical_rank(fam.B1, tau, use_blocks) if fam.B1.size else \
        RankReport(np.zeros(0), 0, 0.0, tau, np.zeros(0, int), [])
    log.info("reduce: shape %s, rank(B(1)) = %d, tau = %.3g", fam.shape, initial.rank, tau)
    relations, mirror, tlog = [], [], []
    steps = list(pivots) if pivots is not None else None
    it = 0
    report = initial
    while min(fam.shape) > 0:
        if steps is not None:
            if not steps:
                break
            relations.append(_relation_step(fam, None, tlog, transform, side, steps.pop(0)))
        else:
            if it:
                left, right = _common_null_dims(fam, tau)
                if left or right:
                    fam = compress_family(fam, tau)
                    tlog.append({"side": "compress", "rows": left, "cols": right})
                    if min(fam.shape) == 0:
                        break
                report = numerical_rank(fam.B1, tau, use_blocks)
            r, c = fam.shape
            if report.rank < c:
                relations.append(_relation_step(fam, report, tlog, transform, side))
            elif report.rank < r:
                t = fam.transpose()
                sub = []
                mirror.append(_relation_step(t, numerical_rank(t.B1, tau, use_blocks),
                                             sub, transform, other))
                tlog.extend(sub)
                fam = t.transpose()
            else:
                break
        it += 1
        if max_iter is not None and it >= max_iter:
            break
    if min(fam.shape) == 0:
        fam = _delete_all(fam)
    final = numerical_rank(fam.B1, tau, use_blocks) if fam.B1.size else \
        RankReport(np.zeros(0), 0, 0.0, tau, np.zeros(0, int), [])
    if side == "y":
        fam = fam.transpose()
    log.info("reduce: %d iterations, dim A = %d", it, fam.shape[0])
    return ReducedFamily(fam, fam.shape[0], relations, tlog, initial, final, tau, side,
                         size0, mirror_relations=mirror)
