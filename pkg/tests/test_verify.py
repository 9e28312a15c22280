"""Fuzz verdicts: multiplicativity, pointwise equality, commutator depth."""

import pytest

from multmap.errors import DimensionMismatch
from multmap.field import RATIONAL, quadratic
from multmap.mapexpr import Cof, MapExpr
from multmap.matrix import identity
from multmap.verify import FuzzConfig, Verdict, check_equal, check_multiplicative, lcs_depth_check

from helpers import int_matrix

Q2 = quadratic(2)


def test_cofactor_is_multiplicative():
    expr = MapExpr(3, RATIONAL, (Cof(),))
    verdict = check_multiplicative(expr.evaluate, RATIONAL, 3, FuzzConfig(seed=5))
    assert verdict.passed
    assert verdict.samples == 50
    assert verdict.counterexample is None


def test_adjugate_transpose_fails_with_counterexample():
    def adj_t(a):
        return a.cofactor().transpose()

    verdict = check_multiplicative(adj_t, RATIONAL, 2, FuzzConfig(seed=5))
    assert not verdict.passed
    a, b = verdict.counterexample
    # the witness itself must still violate the law after shrinking
    assert adj_t(a * b) != adj_t(a) * adj_t(b)
    # shrinking reached a local fixpoint: every nonzero entry is needed
    for which, m in ((0, a), (1, b)):
        for i in range(2):
            for j in range(2):
                if m[i, j].is_zero:
                    continue
                rows = [list(r) for r in m.rows]
                rows[i][j] = rows[i][j] - rows[i][j]
                from multmap.matrix import Matrix

                smaller = Matrix(RATIONAL, rows)
                sa = smaller if which == 0 else a
                sb = b if which == 0 else smaller
                assert adj_t(sa * sb) == adj_t(sa) * adj_t(sb)


def test_check_equal_reports_a_slot():
    f = lambda a: a
    g = lambda a: a + identity(RATIONAL, 2)
    verdict = check_equal(f, g, RATIONAL, 2, FuzzConfig(seed=1))
    assert not verdict.passed
    a, b = verdict.counterexample
    assert b is None
    assert f(a) != g(a)
    same = check_equal(f, f, RATIONAL, 2, FuzzConfig(seed=1))
    assert same.passed


def test_verdicts_are_reproducible():
    def adj_t(a):
        return a.cofactor().transpose()

    v1 = check_multiplicative(adj_t, Q2, 2, FuzzConfig(seed=77))
    v2 = check_multiplicative(adj_t, Q2, 2, FuzzConfig(seed=77))
    assert v1 == v2


def test_verdict_doc():
    v = Verdict(False, (int_matrix(RATIONAL, [[1, 0], [0, 0]]), None), 3, 9)
    doc = v.to_doc()
    assert doc["pass"] is False
    assert doc["counterexample"]["B"] is None
    assert doc["samples"] == 3 and doc["seed"] == 9
    assert Verdict(True, None, 50, 0).to_doc()["counterexample"] is None


@pytest.mark.parametrize("n", [3, 4])
def test_lcs_depths(n):
    for depth in range(n + 1):
        verdict = lcs_depth_check(RATIONAL, n, depth, FuzzConfig(seed=4, pair_count=25))
        assert verdict.passed, (n, depth)


def test_lcs_depth_validation():
    with pytest.raises(DimensionMismatch):
        lcs_depth_check(RATIONAL, 3, -1)
