import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bezout.bezmat import build_family, symbolic_family
from bezout.bezout1d import family_1d
from bezout.poly import MultiPoly, PolySystem
from bezout.reduce import (NonZeroDimensional, block_qrp, block_triangularize, compress_family,
                           householder_vector, kernel_vector, numerical_rank, reduce_family)
from bezout.solve import companions, joint_eigen, verify

from systems import ex22, random_system

REF_PIVOTS = [(0, 2, 4), (1, 2, 4), (0, 2, 3)]


def _mono_coeffs(p: MultiPoly, monos):
    return np.array([p.terms.get(tuple(m), 0) for m in monos])


def test_rank_identity():
    rep = numerical_rank(np.eye(3))
    assert rep.rank == 3 and np.allclose(rep.diag, 1)


def test_rank_example_b1():
    assert numerical_rank(build_family(ex22()).B1).rank == 5


def test_rank_report_serializations():
    rep = numerical_rank(build_family(ex22()).B1)
    assert rep.to_csv().count("\n") == 1 + 6
    assert '"rank": 5' in rep.to_json()


def test_rank_diag_non_increasing_global():
    M = np.random.default_rng(1).normal(size=(7, 7))
    M[:, 3] = M[:, 0] + M[:, 1]
    rep = numerical_rank(M)
    assert rep.rank == 6
    assert np.all(np.diff(rep.diag) <= 1e-12)


def test_block_triangularize_block_diagonal_is_identity():
    A = np.kron(np.eye(3), np.ones((2, 2)))
    rows, cols, blocks = block_triangularize(A)
    assert rows.tolist() == list(range(6)) and cols.tolist() == list(range(6))
    assert blocks == [(0, 2, 0, 2), (2, 4, 2, 4), (4, 6, 4, 6)]


def test_block_triangularize_recovers_shuffled_blocks():
    rng = np.random.default_rng(5)
    L = np.zeros((7, 7))
    L[:3, :3] = rng.normal(size=(3, 3))
    L[3:, 3:] = rng.normal(size=(4, 4))
    L[4, 1] = L[6, 0] = 1.0
    r, c = rng.permutation(7), rng.permutation(7)
    P = L[r][:, c]
    rows, cols, blocks = block_triangularize(P)
    assert [(b[1] - b[0], b[3] - b[2]) for b in blocks] == [(3, 3), (4, 4)]
    Q = P[rows][:, cols]
    assert not Q[:3, 3:].any()


def test_block_triangularize_structurally_singular():
    M = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    rows, cols, blocks = block_triangularize(M)
    assert sorted(rows.tolist()) == [0, 1, 2] and sorted(cols.tolist()) == [0, 1, 2]
    assert sum(b[1] - b[0] for b in blocks) == 3


def test_block_qrp_factorization():
    rng = np.random.default_rng(2)
    L = np.zeros((6, 6))
    L[:2, :2] = rng.normal(size=(2, 2))
    L[2:, 2:] = rng.normal(size=(4, 4))
    L[3, 0] = 2.0
    R, perm, _ = block_qrp(L)
    # M[:, perm] = Q R with Q unitary: compare Gram matrices
    A = L[:, perm]
    assert np.allclose(A.conj().T @ A, R.conj().T @ R)


def test_householder_orthogonality():
    x = np.array([3.0, 1j, -2.0, 0.5])
    w, alpha = householder_vector(x)
    H = np.eye(4) - 2 * np.outer(w, w.conj())
    assert np.abs(H.conj().T @ H - np.eye(4)).max() <= 1e-12
    assert np.allclose(H @ x, alpha * np.eye(4)[0])


def test_kernel_vector():
    M = np.random.default_rng(3).normal(size=(5, 5))
    M[:, 4] = 2 * M[:, 1] - M[:, 2]
    v = kernel_vector(M)
    assert np.linalg.norm(M @ v) < 1e-12 and abs(np.linalg.norm(v) - 1) < 1e-12
    assert kernel_vector(np.eye(3)) is None


# -- reduction ---------------------------------------------------------------

def test_example_dimA_and_bases():
    rf = reduce_family(build_family(ex22()))
    assert rf.dimA == 3 and rf.initial_rank.rank == 5
    assert rf.iterations == 6 - 3
    # the x-labels must be a basis of A: their values at the 3 roots are independent
    roots = verify(joint_eigen(companions(rf)), ex22())
    vals = np.array([[p.eval(r.coords) for p in rf.family.row_labels] for r in roots])
    assert np.linalg.matrix_rank(vals, tol=1e-8) == 3


def test_reference_pivot_replay():
    rf = reduce_family(build_family(ex22()), pivots=REF_PIVOTS, transform="gauss")
    assert rf.family.row_label_strings() == ["1", "x2", "x2^2"]
    assert rf.family.col_label_strings() == ["y1^2", "y1^2*y2", "y1^3"]
    ref = [[[0, 0, 1], [-1, -1, 0], [-1, 0, 0]],
           [[1, 1, 0], [1, 0, -1], [0, 0, -1]],
           [[-1, 0, 0], [0, 0, 1], [0, -1, 0]]]
    for M, R in zip(rf.family.mats, ref):
        assert np.abs(M - np.array(R)).max() < 1e-10
    assert [str(r) for r in rf.relations] == ["x1*x2 + 1", "x1*x2^2 + x2", "x2^2 + x1 + x2"]


def test_univariate_cubic_g_relation_is_f():
    rf = reduce_family(family_1d((1, -3, 2), (1, 0, 0, 0), 3))
    assert rf.iterations == 1
    c = _mono_coeffs(rf.relations[0], [(0,), (1,), (2,)])
    assert np.allclose(c / c[2], [2, -3, 1])


def test_invertible_b1_is_untouched():
    fam = build_family(PolySystem.from_strings(["x1^2 - 3*x1 + 2"]))
    rf = reduce_family(fam)
    assert rf.iterations == 0 and rf.relations == []
    for a, b in zip(rf.family.mats, fam.mats):
        assert np.array_equal(a, b)


def test_nonzero_dimensional_raises():
    f = PolySystem.from_strings(["x1*x2 - 1", "2*x1*x2 - 2"])
    with pytest.raises(NonZeroDimensional):
        reduce_family(build_family(f))


def test_compress_keeps_formal_product():
    fam = build_family(PolySystem.from_strings(
        ["2*x1^2*x2^2 + 3*x1^2 - x1*x2 + 3*x2^2 + 3", "-2*x1*x2 + 3*x1 - 3*x2"]))
    small = compress_family(fam)
    assert small.shape[0] < fam.shape[0]
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=2), rng.normal(size=2)
    for k in range(3):
        assert abs(small.formal_product(k, x, y) - fam.formal_product(k, x, y)) < 1e-10


def test_label_consistency_on_oracle_path():
    # formal product x . B(x_k) . y^T changes only by multiples of f: compare at roots
    f = ex22()
    fam = symbolic_family(f)
    rf = reduce_family(fam)
    roots = verify(joint_eigen(companions(rf)), f)
    for r in roots:
        for s in roots:
            for k in range(3):
                a = fam.formal_product(k, r.coords, s.coords)
                b = rf.family.formal_product(k, r.coords, s.coords)
                assert abs(a - b) < 1e-8


def test_transform_log_reflectors_orthogonal():
    rf = reduce_family(build_family(ex22()))
    ws = [t["reflector"] for t in rf.transform_log if t.get("reflector") is not None]
    assert ws
    for w in ws:
        H = np.eye(w.size) - 2 * np.outer(w, w.conj())
        assert np.abs(H.T.conj() @ H - np.eye(w.size)).max() <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_reduction_invariants_random(seed):
    f = random_system(seed)
    fam = build_family(f)
    rf = reduce_family(fam)
    assert all(M.shape == (rf.dimA, rf.dimA) for M in rf.family.mats)
    assert rf.final_rank.rank == rf.dimA
    assert rf.iterations == rf.compressed_size - rf.dimA or rf.transform_log
    assert reduce_family(fam, use_blocks=True).dimA == rf.dimA
    cs = companions(rf)
    roots = verify(joint_eigen(cs), f)
    good = [r for r in roots if r.max_residual < 1e-6]
    for rel in rf.relations:
        scale = rel.coefficient_norm()
        for r in good:
            assert abs(rel.eval(r.coords)) <= 1e-6 * scale * max(1.0, np.abs(r.coords).max()) ** f.multidegree[0] * 10


@pytest.mark.parametrize("name", ["quadratic", "example22"])
def test_blocks_do_not_change_dimA(name):
    from bezout.cli import fixture_path, load_system
    fam = build_family(load_system(fixture_path(name)))
    assert reduce_family(fam).dimA == reduce_family(fam, use_blocks=True).dimA
