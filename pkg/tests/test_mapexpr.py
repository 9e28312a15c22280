"""Map expressions: atom semantics, exact simplification, canonical forms."""

import random

import pytest

from multmap.errors import (
    DimensionMismatch,
    FieldMismatch,
    ParseError,
    SingularConjugator,
)
from multmap.field import (
    CONJUGATION_HOM,
    IDENTITY_HOM,
    RATIONAL,
    as_elem,
    quadratic,
    sqrt_gen,
)
from multmap.mapexpr import (
    Cof,
    Conj,
    DegenerateForm,
    DetScale,
    Hom,
    MapExpr,
    NonDegenerateForm,
    ScalarCharacter,
    TrivialDet,
    TrivialForm,
    canonical_eq,
    char_of_hom,
    compose,
    identity_expr,
    simplify,
)
from multmap.matrix import identity, unit_matrix, zeros

from helpers import (
    int_matrix,
    rand_invertible,
    rand_matrix,
    rand_singular,
    random_mapexpr,
)

Q2 = quadratic(2)
X = ScalarCharacter((("id", 1),))


def test_character_normalization_and_ops():
    c = ScalarCharacter((("id", 2), ("id", -2), ("conj", 3)))
    assert c.factors == (("conj", 3),)
    assert c.power(0).is_empty
    assert c.multiply(ScalarCharacter((("conj", -3),))).is_empty
    two = as_elem(Q2, 2)
    assert X.evaluate(two) == two
    assert ScalarCharacter((("id", -2),)).evaluate(two) == as_elem(Q2, 2) ** -2


def test_character_composition():
    # (id^2 conj) o (conj^3) = conj^6 id^3
    outer = ScalarCharacter((("id", 2), ("conj", 1)))
    inner = ScalarCharacter((("conj", 3),))
    composed = outer.compose_char(inner)
    assert composed == ScalarCharacter((("conj", 6), ("id", 3)))
    x = as_elem(Q2, 1) + as_elem(Q2, 2) * sqrt_gen(Q2)
    assert composed.evaluate(x) == outer.evaluate(inner.evaluate(x))


def test_conj_atom_evaluation():
    r = int_matrix(RATIONAL, [[1, 1], [0, 1]])
    expr = MapExpr(2, RATIONAL, (Conj(r),))
    e12 = unit_matrix(RATIONAL, 2, 1, 2)
    assert expr.evaluate(e12) == r.inverse() * e12 * r


def test_detscale_zero_on_singular():
    expr = MapExpr(2, RATIONAL, (DetScale(X),))
    a = int_matrix(RATIONAL, [[1, 2], [3, 4]])
    assert expr.evaluate(a) == a.det * a
    assert expr.evaluate(int_matrix(RATIONAL, [[1, 1], [1, 1]])) == zeros(RATIONAL, 2)


def test_trivialdet_evaluation():
    t = TrivialDet((X, X.power(2)), 1, 1)
    expr = MapExpr(2, RATIONAL, (t,))
    assert expr.k == 4
    a = int_matrix(RATIONAL, [[2, 0], [0, 3]])
    assert expr.evaluate(a) == int_matrix(
        RATIONAL,
        [[6, 0, 0, 0], [0, 36, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]],
    )
    singular = int_matrix(RATIONAL, [[1, 1], [1, 1]])
    assert expr.evaluate(singular) == int_matrix(
        RATIONAL,
        [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]],
    )


def test_hom_atom_entrywise():
    s = sqrt_gen(Q2)
    expr = MapExpr(2, Q2, (Hom(CONJUGATION_HOM),))
    a = identity(Q2, 2).scale(as_elem(Q2, 1) + s)
    assert expr.evaluate(a) == identity(Q2, 2).scale(as_elem(Q2, 1) - s)


def test_expressions_are_multiplicative():
    rng = random.Random(42)
    r = rand_invertible(rng, Q2, 3)
    expr = MapExpr(3, Q2, (DetScale(X), Conj(r), Cof(), Hom(CONJUGATION_HOM)))
    for _ in range(6):
        a = rand_matrix(rng, Q2, 3, span=2)
        b = rand_matrix(rng, Q2, 3, span=2)
        assert expr.evaluate(a * b) == expr.evaluate(a) * expr.evaluate(b)


def test_validation_rules():
    with pytest.raises(DimensionMismatch):
        MapExpr(2, RATIONAL, (TrivialDet((X,), 0, 0), Cof()))
    with pytest.raises(SingularConjugator):
        MapExpr(2, RATIONAL, (Conj(int_matrix(RATIONAL, [[1, 1], [1, 1]])),))
    with pytest.raises(FieldMismatch):
        MapExpr(2, RATIONAL, (Hom(CONJUGATION_HOM),))
    with pytest.raises(DimensionMismatch):
        MapExpr(1, RATIONAL, (Cof(),))
    with pytest.raises(FieldMismatch):
        MapExpr(2, RATIONAL, (DetScale(ScalarCharacter((("conj", 1),))),))
    with pytest.raises(DimensionMismatch):
        MapExpr(3, RATIONAL, (Conj(identity(RATIONAL, 2)),))


def test_simplify_identity():
    form = simplify(identity_expr(RATIONAL, 3))
    assert isinstance(form, NonDegenerateForm)
    assert form.phi == IDENTITY_HOM
    assert form.eps == 0
    assert form.R == identity(RATIONAL, 3)


def test_simplify_cof_cof_n2_is_identity():
    form = simplify(MapExpr(2, RATIONAL, (Cof(), Cof())))
    assert isinstance(form, NonDegenerateForm)
    assert form.eps == 0
    assert form.phi == IDENTITY_HOM
    assert form.R == identity(RATIONAL, 2)


def test_simplify_cof_cof_n3_is_det_scale():
    form = simplify(MapExpr(3, RATIONAL, (Cof(), Cof())))
    assert isinstance(form, DegenerateForm)
    assert form.lam == X
    assert form.eps == 0
    assert form.phi == IDENTITY_HOM
    # and the fold is honest about singulars: C(C(A)) = det(A) A everywhere
    a = int_matrix(RATIONAL, [[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert a.rank == 2
    assert a.cofactor().cofactor() == zeros(RATIONAL, 3)
    assert form.evaluate(a) == zeros(RATIONAL, 3)


def test_simplify_conj_sandwich_cancels_homs():
    form = simplify(MapExpr(2, Q2, (Hom(CONJUGATION_HOM), Cof(), Hom(CONJUGATION_HOM))))
    assert isinstance(form, NonDegenerateForm)
    assert form.phi == IDENTITY_HOM
    assert form.eps == 1
    assert form.R == identity(Q2, 2)


def test_simplify_double_detscale_frozen():
    form = simplify(MapExpr(2, RATIONAL, (DetScale(X), DetScale(X))))
    assert isinstance(form, DegenerateForm)
    assert form.lam == X.power(4)


def test_simplify_empty_detscale_is_degenerate_identity():
    form = simplify(MapExpr(2, RATIONAL, (DetScale(ScalarCharacter()),)))
    assert isinstance(form, DegenerateForm)
    assert form.lam.is_empty
    a = int_matrix(RATIONAL, [[1, 2], [3, 4]])
    assert form.evaluate(a) == a
    assert form.evaluate(int_matrix(RATIONAL, [[1, 1], [1, 1]])) == zeros(RATIONAL, 2)


def test_simplify_trivialdet_passthrough():
    t = TrivialDet((X,), 2, 0)
    form = simplify(MapExpr(3, RATIONAL, (t,)))
    assert isinstance(form, TrivialForm)
    assert form.k == 3
    assert form.chars == (X,)


@pytest.mark.parametrize("fd", [RATIONAL, Q2])
@pytest.mark.parametrize("n", [2, 3])
def test_simplify_preserves_evaluation(fd, n):
    rng = random.Random(900 + n + (0 if fd is RATIONAL else 1))
    for _ in range(12):
        expr = random_mapexpr(rng, fd, n, max_depth=4)
        form = simplify(expr)
        for _ in range(4):
            a = rand_invertible(rng, fd, n, span=2)
            assert form.evaluate(a) == expr.evaluate(a)
        for _ in range(2):
            a = rand_singular(rng, fd, n)
            assert form.evaluate(a) == expr.evaluate(a)


def test_compose_matches_pointwise():
    rng = random.Random(77)
    f = MapExpr(3, RATIONAL, (Cof(),))
    g = MapExpr(3, RATIONAL, (Conj(rand_invertible(rng, RATIONAL, 3)), DetScale(X)))
    h = compose(f, g)
    for _ in range(5):
        a = rand_matrix(rng, RATIONAL, 3, span=2)
        assert h.evaluate(a) == f.evaluate(g.evaluate(a))
    assert simplify(h).kind == "degenerate"


def test_compose_rejects_shape_mismatch():
    t = MapExpr(2, RATIONAL, (TrivialDet((X,), 1, 1),))
    f = MapExpr(2, RATIONAL, (Cof(),))
    with pytest.raises(DimensionMismatch):
        compose(f, t)
    # and composing anything onto a padded map fails at construction
    ok_shape = MapExpr(3, RATIONAL, (Cof(),))
    with pytest.raises(DimensionMismatch):
        compose(ok_shape, t)


def test_canonical_eq_up_to_presentation():
    r1 = int_matrix(RATIONAL, [[2, 0], [0, 2]])
    a = NonDegenerateForm(RATIONAL, 2, IDENTITY_HOM, identity(RATIONAL, 2), 0)
    b = NonDegenerateForm(RATIONAL, 2, IDENTITY_HOM, r1, 0)
    assert canonical_eq(a, b)  # conjugators equal up to scale
    c = NonDegenerateForm(RATIONAL, 2, IDENTITY_HOM, identity(RATIONAL, 2), 1)
    assert not canonical_eq(a, c)
    t1 = TrivialForm(RATIONAL, 2, (X, X.power(2)), 1, 0)
    t2 = TrivialForm(RATIONAL, 2, (X.power(2), X), 1, 0)
    assert canonical_eq(t1, t2)  # character order is immaterial
    assert not canonical_eq(t1, TrivialForm(RATIONAL, 2, (X, X), 1, 0))
    assert not canonical_eq(a, t1)
    d1 = DegenerateForm(RATIONAL, 2, X, IDENTITY_HOM, identity(RATIONAL, 2), 0)
    d2 = DegenerateForm(RATIONAL, 2, X.power(2), IDENTITY_HOM, identity(RATIONAL, 2), 0)
    assert not canonical_eq(d1, d2)
    assert canonical_eq(d1, DegenerateForm(RATIONAL, 2, X, IDENTITY_HOM, r1, 0))


def test_expr_doc_round_trip():
    rng = random.Random(31)
    expr = MapExpr(
        2,
        Q2,
        (
            DetScale(ScalarCharacter((("id", 3), ("conj", -1)))),
            Conj(rand_invertible(rng, Q2, 2)),
            Cof(),
            Hom(CONJUGATION_HOM),
        ),
    )
    doc = expr.to_doc()
    assert doc["order"] == "apply-last-first"
    assert MapExpr.from_doc(doc) == expr
    t = MapExpr(3, RATIONAL, (TrivialDet((X,), 1, 2),))
    assert MapExpr.from_doc(t.to_doc()) == t


@pytest.mark.parametrize(
    "doc",
    [
        {"n": 2, "field": {"kind": "rational"}, "atoms": [{"atom": "what"}]},
        {"n": 2, "field": {"kind": "rational"}, "atoms": [{"atom": "hom", "phi": "sq"}]},
        {"n": 0, "field": {"kind": "rational"}, "atoms": []},
        {"n": 2, "field": {"kind": "rational"}, "atoms": [], "order": "apply-first"},
        {"n": 2, "field": {"kind": "rational"}, "atoms": "cof"},
        {"n": 2, "field": {"kind": "rational"}, "atoms": [{"atom": "detscale", "lambda": [{"phi": "id", "pow": "3"}]}]},
    ],
)
def test_expr_doc_rejects_malformed(doc):
    with pytest.raises(ParseError):
        MapExpr.from_doc(doc)


def test_char_of_hom_guard():
    from multmap.errors import UnregisteredHom
    from multmap.field import sampled_hom

    with pytest.raises(UnregisteredHom):
        char_of_hom(sampled_hom([]))
