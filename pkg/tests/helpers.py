"""Shared test utilities.

laplace_det and laplace_cofactor recompute determinants by recursive first
row expansion, a deliberately different route from the Gaussian elimination
inside Matrix, so the two can cross-check each other.
"""

from fractions import Fraction

from multmap.field import CONJUGATION_HOM, IDENTITY_HOM, FieldDescriptor, FieldElem, zero
from multmap.mapexpr import (
    Cof,
    Conj,
    DegenerateForm,
    DetScale,
    Hom,
    MapExpr,
    ScalarCharacter,
    TrivialForm,
    simplify,
)
from multmap.matrix import Matrix, from_values, rank_idempotent


def laplace_det(m: Matrix) -> FieldElem:
    rows = m.rows

    def det(row_idx: tuple, col_idx: tuple) -> FieldElem:
        if len(row_idx) == 1:
            return rows[row_idx[0]][col_idx[0]]
        total = zero(m.field)
        r0 = row_idx[0]
        for pos, c in enumerate(col_idx):
            x = rows[r0][c]
            if x.is_zero:
                continue
            sub = det(row_idx[1:], col_idx[:pos] + col_idx[pos + 1 :])
            term = x * sub
            total = total + term if pos % 2 == 0 else total - term
        return total

    idx = tuple(range(m.n_rows))
    return det(idx, idx)


def laplace_cofactor(m: Matrix) -> Matrix:
    n = m.n_rows
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = m.submatrix(
                [r for r in range(n) if r != i], [c for c in range(n) if c != j]
            )
            d = laplace_det(minor)
            row.append(d if (i + j) % 2 == 0 else -d)
        out.append(row)
    return Matrix(m.field, out)


def rand_elem(rng, fd: FieldDescriptor, span: int = 4) -> FieldElem:
    a = Fraction(rng.randint(-span, span), rng.choice((1, 1, 2)))
    if fd.is_quadratic and rng.random() < 0.5:
        b = Fraction(rng.randint(-span, span), rng.choice((1, 1, 2)))
    else:
        b = Fraction(0)
    return FieldElem(fd, a, b)


def rand_matrix(rng, fd: FieldDescriptor, n: int, span: int = 4) -> Matrix:
    return Matrix(fd, [[rand_elem(rng, fd, span) for _ in range(n)] for _ in range(n)])


def rand_invertible(rng, fd: FieldDescriptor, n: int, span: int = 4) -> Matrix:
    while True:
        m = rand_matrix(rng, fd, n, span)
        if m.is_invertible:
            return m


def rand_singular(rng, fd: FieldDescriptor, n: int, rank: int | None = None) -> Matrix:
    r = rng.randrange(n) if rank is None else rank
    return (
        rand_invertible(rng, fd, n)
        * rank_idempotent(fd, n, r)
        * rand_invertible(rng, fd, n)
    )


def int_matrix(fd: FieldDescriptor, rows) -> Matrix:
    return from_values(fd, rows)


def char_powers_bounded(form, bound: int) -> bool:
    chars = []
    if isinstance(form, TrivialForm):
        chars.extend(form.chars)
    elif isinstance(form, DegenerateForm) and isinstance(form.lam, ScalarCharacter):
        chars.append(form.lam)
    return all(abs(p) <= bound for c in chars for _, p in c.factors)


def random_mapexpr(
    rng, fd: FieldDescriptor, n: int, max_depth: int = 5, power_bound: int = 6
) -> MapExpr:
    """Random atom composite whose simplified determinant character stays
    within the classifier's fit bound; out-of-family draws are resampled."""
    while True:
        atoms = []
        for _ in range(rng.randint(0, max_depth)):
            kind = rng.choice(("conj", "cof", "hom", "detscale"))
            if kind == "conj":
                atoms.append(Conj(rand_invertible(rng, fd, n, span=2)))
            elif kind == "cof":
                atoms.append(Cof())
            elif kind == "hom":
                use_conj = fd.is_quadratic and rng.random() < 0.5
                atoms.append(Hom(CONJUGATION_HOM if use_conj else IDENTITY_HOM))
            else:
                factors = []
                if rng.random() < 0.85:
                    factors.append(("id", rng.randint(-2, 3)))
                if fd.is_quadratic and rng.random() < 0.4:
                    factors.append(("conj", rng.randint(-2, 2)))
                atoms.append(DetScale(ScalarCharacter(tuple(factors))))
        expr = MapExpr(n, fd, tuple(atoms))
        if char_powers_bounded(simplify(expr), power_bound):
            return expr
