"""Transvection words: factoring special linear matrices into elementary
generators, evaluating generator words, and seeded random sampling.

decompose_sl runs a Gauss-Jordan sweep that uses row transvections only.
Each pivot is first driven to exactly 1 by adding a multiple of another row
(at most two operations, never a diagonal scaling), after which the rest of
the column is cleared. A determinant-one n x n input therefore factors into
at most n^2 + n - 2 transvections, and simple inputs stay short: a single
transvection decomposes as itself.

Word convention: a word [g1, g2, ..., gm] denotes the product g1 g2 ... gm
in that order, so evaluate_word folds from the right.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import NotSpecialLinear, ParseError, SingularMatrix
from .field import (
    FieldDescriptor,
    FieldElem,
    as_elem,
    format_scalar,
    one,
    parse_scalar,
    sqrt_gen,
)
from .matrix import (
    DiagUnit,
    Generator,
    Matrix,
    Swap,
    Transvection,
    gen_matrix,
    identity,
)

from fractions import Fraction


def default_pool(fd: FieldDescriptor) -> tuple[FieldElem, ...]:
    """Small nonzero scalars used when sampling random words and probes."""
    base = [1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3]
    pool = [as_elem(fd, v) for v in base]
    if fd.is_quadratic:
        s = sqrt_gen(fd)
        pool.extend([s, one(fd) + s])
    return tuple(pool)


def evaluate_word(word, fd: FieldDescriptor, n: int) -> Matrix:
    """Product of the generators in list order, as an n x n matrix."""
    rows = [list(r) for r in identity(fd, n).rows]
    for gen in reversed(word):
        _apply_left(rows, gen, fd, n)
    return Matrix(fd, rows)


def _apply_left(rows, gen: Generator, fd: FieldDescriptor, n: int) -> None:
    """Left-multiply the row list by one generator, in place."""
    # realizing the generator checks indices and field
    gen_matrix(gen, fd, n)
    if isinstance(gen, Transvection):
        i, j, k = gen.i - 1, gen.j - 1, gen.k
        rows[i] = [x + k * y for x, y in zip(rows[i], rows[j])]
    elif isinstance(gen, DiagUnit):
        i = gen.i - 1
        rows[i] = [gen.k * x for x in rows[i]]
    else:
        a, b = gen.i - 1, gen.j - 1
        rows[a], rows[b] = rows[b], rows[a]


def decompose_sl(m: Matrix) -> list[Transvection]:
    """Factor a determinant-one matrix into transvections.

    Returns word with evaluate_word(word) == m and
    len(word) <= n^2 + n - 2.
    """
    n = m.n_rows
    if not m.is_square:
        raise NotSpecialLinear("decomposition needs a square matrix")
    if m.det != one(m.field):
        raise NotSpecialLinear("determinant must be exactly one")
    fd = m.field
    o = one(fd)
    rows = [list(r) for r in m.rows]
    ops: list[Transvection] = []

    def add_multiple(i: int, j: int, k: FieldElem) -> None:
        # row_i += k row_j, recorded as the left factor P_(i+1)(j+1)(k)
        if k.is_zero:
            return
        rows[i] = [x + k * y for x, y in zip(rows[i], rows[j])]
        ops.append(Transvection(i + 1, j + 1, k))

    for p in range(n - 1):
        if rows[p][p] != o:
            r = next((i for i in range(p + 1, n) if not rows[i][p].is_zero), None)
            if r is None:
                # pivot nonzero (matrix stays invertible); seed a row below
                add_multiple(p + 1, p, o)
                r = p + 1
            add_multiple(p, r, (o - rows[p][p]) / rows[r][p])
        for i in range(n):
            if i != p and not rows[i][p].is_zero:
                add_multiple(i, p, -rows[i][p])
    # columns 0..n-2 now match the identity; the last diagonal entry is the
    # remaining determinant, which is one, so only the last column needs
    # clearing above the diagonal
    for i in range(n - 1):
        if not rows[i][n - 1].is_zero:
            add_multiple(i, n - 1, -rows[i][n - 1])
    return [op.inv() for op in ops]


@dataclass(frozen=True)
class GlFactorization:
    """m = D_1(det_scalar) * product(word)."""

    det_scalar: FieldElem
    word: list

    def evaluate(self, fd: FieldDescriptor, n: int) -> Matrix:
        return gen_matrix(DiagUnit(1, self.det_scalar), fd, n) * evaluate_word(
            self.word, fd, n
        )


def decompose_gl(m: Matrix) -> GlFactorization:
    """Factor an invertible matrix as D_1(det m) times a transvection word."""
    d = m.det
    if d.is_zero:
        raise SingularMatrix("cannot decompose a singular matrix")
    unimodular = gen_matrix(DiagUnit(1, d.inv()), m.field, m.n_rows) * m
    return GlFactorization(d, decompose_sl(unimodular))


# -- seeded sampling -------------------------------------------------------------


def random_transvection_word(
    rng: random.Random, fd: FieldDescriptor, n: int, length: int, pool=None
) -> list[Transvection]:
    pool = default_pool(fd) if pool is None else tuple(pool)
    word = []
    for _ in range(length):
        i = rng.randrange(1, n + 1)
        j = rng.randrange(1, n)
        if j >= i:
            j += 1
        word.append(Transvection(i, j, rng.choice(pool)))
    return word


def random_sl(
    rng: random.Random, fd: FieldDescriptor, n: int, length: int | None = None, pool=None
) -> Matrix:
    length = 4 * n if length is None else length
    return evaluate_word(random_transvection_word(rng, fd, n, length, pool), fd, n)


def random_gl(
    rng: random.Random, fd: FieldDescriptor, n: int, length: int | None = None, pool=None
) -> Matrix:
    pool = default_pool(fd) if pool is None else tuple(pool)
    d = rng.choice(pool)
    return gen_matrix(DiagUnit(1, d), fd, n) * random_sl(rng, fd, n, length, pool)


def random_unitriangular(
    rng: random.Random, fd: FieldDescriptor, n: int, pool=None
) -> Matrix:
    """Upper triangular, ones on the diagonal, random entries above."""
    pool = default_pool(fd) if pool is None else tuple(pool)
    rows = [list(r) for r in identity(fd, n).rows]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.75:
                rows[i][j] = rng.choice(pool)
    return Matrix(fd, rows)


# -- serialization ----------------------------------------------------------------


def word_to_doc(word) -> dict:
    gens = []
    for g in word:
        if isinstance(g, Transvection):
            gens.append({"type": "P", "i": g.i, "j": g.j, "k": format_scalar(g.k)})
        elif isinstance(g, DiagUnit):
            gens.append({"type": "D", "i": g.i, "k": format_scalar(g.k)})
        elif isinstance(g, Swap):
            gens.append({"type": "S", "i": g.i, "j": g.j})
        else:
            raise ParseError(f"not a word generator: {g!r}")
    return {"gens": gens}


def _doc_index(entry: dict, key: str) -> int:
    v = entry.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"generator needs a positive integer {key!r}")
    return v


def word_from_doc(doc: object, fd: FieldDescriptor) -> list[Generator]:
    if not isinstance(doc, dict) or not isinstance(doc.get("gens"), list):
        raise ParseError("word document must be an object with a 'gens' list")
    word: list[Generator] = []
    for entry in doc["gens"]:
        if not isinstance(entry, dict):
            raise ParseError("each generator must be an object")
        t = entry.get("type")
        if t == "P":
            word.append(
                Transvection(
                    _doc_index(entry, "i"),
                    _doc_index(entry, "j"),
                    parse_scalar(_doc_scalar(entry), fd),
                )
            )
        elif t == "D":
            word.append(
                DiagUnit(_doc_index(entry, "i"), parse_scalar(_doc_scalar(entry), fd))
            )
        elif t == "S":
            word.append(Swap(_doc_index(entry, "i"), _doc_index(entry, "j")))
        else:
            raise ParseError(f"unknown generator type {t!r}")
    return word


def _doc_scalar(entry: dict) -> str:
    k = entry.get("k")
    if not isinstance(k, str):
        raise ParseError("generator scalar 'k' must be a string")
    return k
