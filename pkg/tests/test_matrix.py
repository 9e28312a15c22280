"""Exact matrix layer: elimination, cofactor identities, structural splits."""

import random
from fractions import Fraction

import pytest

from multmap.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotCommutingIdempotents,
    NotMatrixUnits,
    ParseError,
    SingularMatrix,
)
from multmap.field import RATIONAL, FieldElem, as_elem, one, quadratic, zero
from multmap.matrix import (
    DiagUnit,
    Matrix,
    Swap,
    Transvection,
    coidempotent,
    conjugator_from_units,
    from_columns,
    from_values,
    gen_matrix,
    identity,
    normalize_scale,
    rank_idempotent,
    solve_exact,
    split_idempotent_pair,
    unit_matrix,
    zeros,
)

from helpers import (
    int_matrix,
    laplace_cofactor,
    laplace_det,
    rand_invertible,
    rand_matrix,
    rand_singular,
)

Q2 = quadratic(2)


def test_frozen_two_by_two():
    a = int_matrix(RATIONAL, [[1, 2], [3, 4]])
    assert a.det == as_elem(RATIONAL, -2)
    c = a.cofactor()
    assert c == int_matrix(RATIONAL, [[4, -3], [-2, 1]])
    # A C(A)^T = det(A) I
    assert a * c.transpose() == a.det * identity(RATIONAL, 2)


def test_product_and_inverse_frozen():
    a = int_matrix(RATIONAL, [[2, 1, 0], [0, 1, -1], [1, 0, 3]])
    assert a.det == as_elem(RATIONAL, 5)
    assert a * a.inverse() == identity(RATIONAL, 3)
    assert a.inverse() * a == identity(RATIONAL, 3)


def test_singular_inverse_raises():
    a = int_matrix(RATIONAL, [[1, 2], [2, 4]])
    assert a.rank == 1
    assert a.det == zero(RATIONAL)
    with pytest.raises(SingularMatrix):
        a.inverse()


def test_kernel_and_image_frozen():
    a = int_matrix(RATIONAL, [[1, 2, 3], [2, 4, 6], [1, 2, 3]])
    assert a.rank == 1
    ker = a.kernel_basis()
    assert len(ker) == 2
    for v in ker:
        assert (a * from_columns(RATIONAL, [v])).is_zero
    img = a.image_basis()
    assert img == [a.column(0)]


def test_image_basis_of_identity_is_standard_order():
    i3 = identity(RATIONAL, 3)
    assert i3.image_basis() == [i3.column(0), i3.column(1), i3.column(2)]
    assert i3.kernel_basis() == []


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cofactor_multiplicative_and_dual_route(n):
    rng = random.Random(100 + n)
    for _ in range(8):
        a = rand_matrix(rng, RATIONAL, n, span=3)
        b = rand_matrix(rng, RATIONAL, n, span=3)
        ca, cb = a.cofactor(), b.cofactor()
        assert (a * b).cofactor() == ca * cb
        assert ca == laplace_cofactor(a)
        assert a.det == laplace_det(a)
        assert a * ca.transpose() == a.det * identity(RATIONAL, n)


def test_cofactor_of_cofactor_law():
    rng = random.Random(7)
    for n in (2, 3, 4):
        for _ in range(4):
            a = rand_matrix(rng, RATIONAL, n, span=3)
            cc = a.cofactor().cofactor()
            assert cc == (a.det ** (n - 2)) * a


def test_cofactor_on_singular_quadratic():
    rng = random.Random(11)
    for _ in range(5):
        a = rand_singular(rng, Q2, 3)
        b = rand_matrix(rng, Q2, 3, span=2)
        assert (a * b).cofactor() == a.cofactor() * b.cofactor()


def test_cofactor_size_guard():
    with pytest.raises(DimensionMismatch):
        int_matrix(RATIONAL, [[5]]).cofactor()


def test_pow_and_unipotence():
    u = int_matrix(RATIONAL, [[1, 2, 5], [0, 1, -3], [0, 0, 1]])
    assert u.is_unipotent()
    assert u**0 == identity(RATIONAL, 3)
    assert u**3 == u * u * u
    assert u**-1 == u.inverse()
    assert not int_matrix(RATIONAL, [[2, 0], [0, 1]]).is_unipotent()


def test_scalar_multiplication_dispatch():
    a = int_matrix(RATIONAL, [[1, 2], [3, 4]])
    c = as_elem(RATIONAL, Fraction(1, 2))
    assert c * a == from_values(RATIONAL, [[Fraction(1, 2), 1], [Fraction(3, 2), 2]])


def test_elementary_generators():
    k = as_elem(RATIONAL, 5)
    p = gen_matrix(Transvection(1, 2, k), RATIONAL, 3)
    assert p == int_matrix(RATIONAL, [[1, 5, 0], [0, 1, 0], [0, 0, 1]])
    assert p.det == one(RATIONAL)
    d = gen_matrix(DiagUnit(2, k), RATIONAL, 3)
    assert d == int_matrix(RATIONAL, [[1, 0, 0], [0, 5, 0], [0, 0, 1]])
    s = gen_matrix(Swap(1, 3), RATIONAL, 3)
    assert s == int_matrix(RATIONAL, [[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    assert s.det == as_elem(RATIONAL, -1)
    assert gen_matrix(Transvection(1, 2, k).inv(), RATIONAL, 3) == p.inverse()
    assert gen_matrix(DiagUnit(2, k).inv(), RATIONAL, 3) == d.inverse()


def test_generator_validation():
    with pytest.raises(IndexOutOfRange):
        Transvection(2, 2, one(RATIONAL))
    with pytest.raises(SingularMatrix):
        DiagUnit(1, zero(RATIONAL))
    with pytest.raises(IndexOutOfRange):
        Swap(1, 1)
    with pytest.raises(IndexOutOfRange):
        gen_matrix(Transvection(1, 4, one(RATIONAL)), RATIONAL, 3)


def test_unit_and_idempotent_constructors():
    e12 = unit_matrix(RATIONAL, 3, 1, 2)
    assert e12 == int_matrix(RATIONAL, [[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    assert rank_idempotent(RATIONAL, 3, 2) == int_matrix(
        RATIONAL, [[1, 0, 0], [0, 1, 0], [0, 0, 0]]
    )
    assert coidempotent(RATIONAL, 3, 2) == int_matrix(
        RATIONAL, [[1, 0, 0], [0, 0, 0], [0, 0, 1]]
    )
    assert coidempotent(RATIONAL, 3, 2).cofactor() == unit_matrix(RATIONAL, 3, 2, 2)


def test_split_identity_pair_is_trivial_basis():
    k = 4
    s_mat, s, l = split_idempotent_pair(zeros(RATIONAL, k), identity(RATIONAL, k))
    assert (s, l) == (0, k)
    assert s_mat == identity(RATIONAL, k)


def test_split_conjugated_pair():
    rng = random.Random(3)
    fd = RATIONAL
    k = 4
    for _ in range(6):
        t = rand_invertible(rng, fd, k)
        l, s = 2, 1
        p1_model = from_values(
            fd, [[1 if i == j and (i < l or i >= k - s) else 0 for j in range(k)] for i in range(k)]
        )
        p0_model = from_values(
            fd, [[1 if i == j and i >= k - s else 0 for j in range(k)] for i in range(k)]
        )
        p0 = t * p0_model * t.inverse()
        p1 = t * p1_model * t.inverse()
        s_mat, got_s, got_l = split_idempotent_pair(p0, p1)
        assert (got_s, got_l) == (s, l)
        assert s_mat.inverse() * p0 * s_mat == p0_model
        assert s_mat.inverse() * p1 * s_mat == p1_model


def test_split_rejects_non_nested_pair():
    p0 = unit_matrix(RATIONAL, 2, 1, 1)
    p1 = unit_matrix(RATIONAL, 2, 2, 2)
    # both idempotent, but p0 p1 = 0 != p0
    with pytest.raises(NotCommutingIdempotents):
        split_idempotent_pair(p0, p1)


def test_split_rejects_non_idempotent():
    with pytest.raises(NotCommutingIdempotents):
        split_idempotent_pair(int_matrix(RATIONAL, [[0, 1], [0, 0]]), identity(RATIONAL, 2))


def test_conjugator_from_units_roundtrip():
    rng = random.Random(5)
    n = 3
    for _ in range(10):
        s = rand_invertible(rng, RATIONAL, n)
        s_inv = s.inverse()
        units = [
            [s_inv * unit_matrix(RATIONAL, n, i + 1, j + 1) * s for j in range(n)]
            for i in range(n)
        ]
        r = conjugator_from_units(units)
        for i in range(n):
            for j in range(n):
                assert r * units[i][j] * r.inverse() == unit_matrix(RATIONAL, n, i + 1, j + 1)
        # r must agree with s up to a scalar
        ratio = r * s.inverse()
        base = next(x for row in ratio.rows for x in row if not x.is_zero)
        assert ratio == base * identity(RATIONAL, n)


def test_conjugator_rejects_corrupted_units():
    n = 2
    units = [[unit_matrix(RATIONAL, n, i + 1, j + 1) for j in range(n)] for i in range(n)]
    units[0][1] = int_matrix(RATIONAL, [[0, 1], [1, 0]])
    with pytest.raises(NotMatrixUnits):
        conjugator_from_units(units)


def test_normalize_scale():
    m = int_matrix(RATIONAL, [[0, 0], [3, 6]])
    assert normalize_scale(m) == int_matrix(RATIONAL, [[0, 0], [1, 2]])
    assert normalize_scale(zeros(RATIONAL, 2)) == zeros(RATIONAL, 2)


def test_doc_round_trip():
    a = from_values(Q2, [[Fraction(1, 2), 2], [0, 1]])
    doc = a.to_doc()
    assert doc["n"] == 2
    assert doc["entries"][0][0] == "1/2"
    assert Matrix.from_doc(doc) == a


@pytest.mark.parametrize(
    "doc",
    [
        {"field": {"kind": "rational"}, "n": 2, "entries": [["1", "0"]]},
        {"field": {"kind": "rational"}, "n": 0, "entries": []},
        {"field": {"kind": "rational"}, "n": 1, "entries": [["1/0"]]},
        {"field": {"kind": "nope"}, "n": 1, "entries": [["1"]]},
        "not an object",
    ],
)
def test_doc_rejects_malformed(doc):
    with pytest.raises(ParseError):
        Matrix.from_doc(doc)


def test_shape_guards():
    with pytest.raises(DimensionMismatch):
        int_matrix(RATIONAL, [[1, 2], [3]])
    with pytest.raises(DimensionMismatch):
        int_matrix(RATIONAL, [[1, 2]]) * int_matrix(RATIONAL, [[1, 2]])
    with pytest.raises(DimensionMismatch):
        int_matrix(RATIONAL, [[1, 2]]).det


def test_solve_exact_square_and_tall():
    a = int_matrix(RATIONAL, [[2, 1], [1, 1]])
    b = int_matrix(RATIONAL, [[1, 0], [0, 1]])
    x = solve_exact(a, b)
    assert a * x == b
    # tall system: columns of a are independent, b lies in their span
    tall = int_matrix(RATIONAL, [[1, 0], [0, 1], [1, 1]])
    rhs = tall * int_matrix(RATIONAL, [[3], [4]])
    assert solve_exact(tall, rhs) == int_matrix(RATIONAL, [[3], [4]])


def test_solve_exact_rejects_bad_systems():
    tall = int_matrix(RATIONAL, [[1, 0], [0, 1], [1, 1]])
    off_span = int_matrix(RATIONAL, [[1], [0], [0]])
    with pytest.raises(SingularMatrix):
        solve_exact(tall, off_span)
    dependent = int_matrix(RATIONAL, [[1, 2], [2, 4]])
    with pytest.raises(SingularMatrix):
        solve_exact(dependent, int_matrix(RATIONAL, [[1], [2]]))
    with pytest.raises(DimensionMismatch):
        solve_exact(tall, int_matrix(RATIONAL, [[1], [2]]))
