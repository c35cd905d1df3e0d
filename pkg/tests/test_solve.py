import itertools
import json

import numpy as np
import pytest

from bezout.bezmat import build_family
from bezout.bezout1d import companion
from bezout.poly import PolySystem
from bezout.reduce import reduce_family
from bezout.solve import (CompanionSet, Root, RootSet, companions, joint_eigen,
                          log_error_histogram, solve_system, verify)

from systems import EX22_ROOTS, EX22_X1, EX22_X2, cubic_roots, ex22, lex_rows, random_system, same_multiset

REF_PIVOTS = [(0, 2, 4), (1, 2, 4), (0, 2, 3)]


def _reference_cs():
    rf = reduce_family(build_family(ex22()), pivots=REF_PIVOTS, transform="gauss")
    return companions(rf)


def test_companions_forced_pivots_match_table():
    cs = _reference_cs()
    assert np.abs(cs.X[0] - EX22_X1).max() < 1e-10
    assert np.abs(cs.X[1] - EX22_X2).max() < 1e-10
    assert [str(p) for p in cs.basis_labels] == ["1", "x2", "x2^2"]


def test_companions_default_path_commute_and_are_similar():
    cs = companions(reduce_family(build_family(ex22())))
    assert cs.dimA == 3 and not cs.ill_conditioned
    assert cs.commutator_error() < 1e-12
    for X, ref in zip(cs.X, (EX22_X1, EX22_X2)):
        assert same_multiset(np.linalg.eigvals(X), np.linalg.eigvals(ref), 1e-10)


def test_companions_univariate_is_companion_matrix():
    f = PolySystem.from_strings(["2*x1^3 - x1 + 5"])
    cs = companions(reduce_family(build_family(f)))
    # same operator, basis may differ: compare spectra and characteristic polynomial
    assert np.allclose(np.poly(cs.X[0]), np.poly(companion((2, 0, -1, 5))), atol=1e-10)


def test_companions_identity_system():
    cs = companions(reduce_family(build_family(PolySystem.from_strings(["x1", "x2"]))))
    assert cs.dimA == 1
    for X in cs.X:
        assert X.shape == (1, 1) and abs(X[0, 0]) < 1e-14


def test_joint_eigen_example_roots_match_table():
    roots = verify(joint_eigen(companions(reduce_family(build_family(ex22())))), ex22())
    assert len(roots) == 3
    assert np.abs(lex_rows(roots.coords(), 5) - lex_rows(EX22_ROOTS, 5)).max() < 1e-4
    assert roots.max_residuals().max() < 1e-6


def test_joint_eigen_against_cardano():
    # x1 solves x^3 - x + 1 = 0 and x2 = -1/x1 on the variety
    roots = solve_system(ex22()).roots
    ref = [(r, -1 / r) for r in cubic_roots()]
    assert same_multiset(roots.coords(), ref, 1e-10)


def test_joint_eigen_univariate_quadratic():
    roots = solve_system(PolySystem.from_strings(["x1^2 - 3*x1 + 2"])).roots
    assert same_multiset(roots.coords(), [[1], [2]], 1e-12)


def test_joint_eigen_all_zero_gives_origin():
    cs = CompanionSet(2, 1, [np.zeros((1, 1)), np.zeros((1, 1))], [])
    rs = joint_eigen(cs)
    assert len(rs) == 1 and np.array_equal(rs.roots[0].coords, [0, 0])


def test_joint_eigen_reports_multiplicity():
    X1, X2 = np.diag([1.0, 1.0, 2.0]), np.diag([3.0, 3.0, 4.0])
    rs = joint_eigen(CompanionSet(2, 3, [X1, X2], []))
    assert rs.clustered and rs.attempts > 1
    assert sorted(r.multiplicity for r in rs) == [1, 2, 2]


def test_double_root_count():
    # x1^2 = 0, x2 = 0: a double root at the origin (defective, so it splits by ~sqrt(eps))
    rs = solve_system(PolySystem.from_strings(["x1^2", "x2"])).roots
    assert len(rs) == 2
    assert np.abs(rs.coords()).max() < 1e-6


def test_eigen_identity():
    cs = companions(reduce_family(build_family(ex22())))
    rs = joint_eigen(cs, seed=3)
    for r in rs:
        v = rs.eigvecs[:, r.eigvec_index]
        for j, X in enumerate(cs.X):
            assert np.linalg.norm(X @ v - r.coords[j] * v) <= 1e-6 * np.linalg.norm(v)


@pytest.mark.parametrize("i", [0, 4, 7, 11])
def test_seed_invariance(i):
    f = random_system(i)
    cs = companions(reduce_family(build_family(f)))
    a, b = joint_eigen(cs, 0), joint_eigen(cs, 12345)
    assert same_multiset(a.coords(), b.coords(), 1e-6)


def test_verify_exact_root_zero_residual():
    f = PolySystem.from_strings(["x1^2 - 3*x1 + 2", "x2 - x1"])
    rs = verify(RootSet([Root(np.array([2.0, 2.0])), Root(np.array([0.5, 0.0]))]), f)
    assert rs.roots[0].max_residual == 0.0
    assert rs.roots[1].max_residual == pytest.approx(0.75)


def test_verify_example_residuals():
    rs = solve_system(ex22()).roots
    assert np.all(rs.max_residuals() < 1e-4)
    assert np.all(np.diff(rs.max_residuals()) >= 0)


def _with_residuals(values):
    return RootSet([Root(np.zeros(1), np.array([v])) for v in values])


def test_histogram_single_bin():
    h = log_error_histogram(_with_residuals([1e-6] * 5), bins=10)
    assert np.count_nonzero(h.counts) == 1 and h.counts.sum() == 5


def test_histogram_empty():
    h = log_error_histogram(RootSet([]), bins=8)
    assert h.counts.tolist() == [0] * 8


def test_histogram_zero_goes_left():
    h = log_error_histogram(_with_residuals([0.0, 1e-30, 0.5]))
    assert h.counts[0] == 2 and h.counts[-1] == 1


def test_histogram_example_bins():
    h = log_error_histogram(solve_system(ex22()).roots)
    occupied = h.edges[:-1][h.counts > 0]
    assert h.counts.sum() == 3 and occupied.max() <= -4


def test_histogram_csv():
    text = log_error_histogram(_with_residuals([1e-3]), bins=2, lo=-4, hi=0).to_csv()
    assert text.splitlines() == ["bin_left,bin_right,count", "-4,-2,1", "-2,0,0"]


def test_rootset_json_roundtrip():
    rs = solve_system(ex22()).roots
    back = RootSet.from_json(rs.to_json())
    assert np.array_equal(back.coords(), rs.coords())
    assert np.allclose(back.max_residuals(), rs.max_residuals())
    rec = json.loads(rs.to_json())[0]
    assert set(rec) == {"x", "residuals", "multiplicity"}


sympy = pytest.importorskip("sympy")


GROEBNER_SEEDS = [1, 6, 9, 11, 12, 14, 16, 19, 21, 23, 24, 25, 27, 28, 30, 31]


@pytest.mark.parametrize("i", GROEBNER_SEEDS)
def test_dimA_matches_groebner(i):
    f = random_system(i)
    assert f.nvars <= 2
    xs = sympy.symbols(f"x1:{f.nvars + 1}")
    exprs = []
    for p in f.polys:
        exprs.append(sum(sympy.Integer(int(c.real)) * sympy.prod([x ** e for x, e in zip(xs, m)])
                         for m, c in p.terms.items()))
    G = sympy.groebner(exprs, *xs, order="grevlex")
    if not G.is_zero_dimensional:
        pytest.skip("not zero-dimensional")
    # count standard monomials of the leading-term ideal
    lead = [sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs]
    # zero-dimensional: every variable has a pure-power leading monomial
    bound = [min(m[j] for m in lead if sum(m) == m[j]) for j in range(f.nvars)]
    std = sum(1 for e in itertools.product(*[range(b) for b in bound])
              if not any(all(e[j] >= m[j] for j in range(f.nvars)) for m in lead))
    rf = reduce_family(build_family(f))
    assert rf.dimA == std
