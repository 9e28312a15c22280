"""Randomized checking of map properties with seeded, reproducible sampling.

check_multiplicative fuzzes Phi(AB) = Phi(A) Phi(B); check_equal fuzzes
pointwise agreement of two maps. Failures are reported through a Verdict
carrying a counterexample that has been greedily shrunk: entries are zeroed
one at a time while the failure persists, which tends to leave the small
sparse witnesses that are easy to reason about.

lcs_depth_check exercises the nested commutator filtration of the upper
unitriangular group: after depth nestings the first min(depth, n-1)
superdiagonals vanish, and depth >= n - 1 collapses the commutator to the
identity. This is the structural fact that forces maps into lower dimensions
to kill the whole special linear group.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DimensionMismatch
from .field import FieldDescriptor, zero
from .matrix import Matrix, identity
from .slword import default_pool, random_gl, random_unitriangular


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    pair_count: int = 50
    word_length: int = 8
    include_singular: bool = True
    scalar_pool: tuple | None = None


@dataclass(frozen=True)
class Verdict:
    passed: bool
    counterexample: tuple[Matrix, Matrix | None] | None
    samples: int
    seed: int

    def to_doc(self) -> dict:
        ce = None
        if self.counterexample is not None:
            a, b = self.counterexample
            ce = {"A": a.to_doc(), "B": None if b is None else b.to_doc()}
        return {
            "pass": self.passed,
            "counterexample": ce,
            "samples": self.samples,
            "seed": self.seed,
        }


def _sample_matrix(rng, fd, n, config) -> Matrix:
    pool = tuple(config.scalar_pool) if config.scalar_pool else default_pool(fd)
    if config.include_singular and rng.random() < 0.3:
        entries = pool + (zero(fd),)
        rows = [[rng.choice(entries) for _ in range(n)] for _ in range(n)]
        return Matrix(fd, rows)
    return random_gl(rng, fd, n, length=config.word_length, pool=pool)


def _zero_entry(m: Matrix, i: int, j: int) -> Matrix:
    rows = [list(r) for r in m.rows]
    rows[i][j] = rows[i][j] - rows[i][j]
    return Matrix(m.field, rows)


def _shrink(still_fails, a: Matrix, b: Matrix | None):
    """Greedy zeroing of entries while the predicate keeps failing."""
    changed = True
    while changed:
        changed = False
        for which in (0, 1):
            m = a if which == 0 else b
            if m is None:
                continue
            for i in range(m.n_rows):
                for j in range(m.n_cols):
                    if m[i, j].is_zero:
                        continue
                    candidate = _zero_entry(m, i, j)
                    ca = candidate if which == 0 else a
                    cb = b if which == 0 else candidate
                    if still_fails(ca, cb):
                        a, b = ca, cb
                        m = candidate
                        changed = True
    return a, b


def check_multiplicative(
    phi, fd: FieldDescriptor, n: int, config: FuzzConfig = FuzzConfig()
) -> Verdict:
    """Sample pairs and test Phi(AB) = Phi(A) Phi(B) exactly."""
    rng = random.Random(config.seed)

    def fails(a: Matrix, b: Matrix) -> bool:
        return phi(a * b) != phi(a) * phi(b)

    for done in range(1, config.pair_count + 1):
        a = _sample_matrix(rng, fd, n, config)
        b = _sample_matrix(rng, fd, n, config)
        if fails(a, b):
            a, b = _shrink(lambda x, y: fails(x, y), a, b)
            return Verdict(False, (a, b), done, config.seed)
    return Verdict(True, None, config.pair_count, config.seed)


def check_equal(
    f, g, fd: FieldDescriptor, n: int, config: FuzzConfig = FuzzConfig()
) -> Verdict:
    """Sample matrices and test f(A) = g(A) exactly; the counterexample
    Verdict carries the offending A with the B slot empty."""
    rng = random.Random(config.seed)

    def fails(a: Matrix, _b=None) -> bool:
        return f(a) != g(a)

    for done in range(1, config.pair_count + 1):
        a = _sample_matrix(rng, fd, n, config)
        if fails(a):
            a, _ = _shrink(lambda x, _y: fails(x), a, None)
            return Verdict(False, (a, None), done, config.seed)
    return Verdict(True, None, config.pair_count, config.seed)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a.inverse() * b.inverse() * a * b


def lcs_depth_check(
    fd: FieldDescriptor, n: int, depth: int, config: FuzzConfig = FuzzConfig()
) -> Verdict:
    """Nest commutators of random unitriangular matrices depth times and
    check the vanishing pattern of the superdiagonals."""
    if depth < 0:
        raise DimensionMismatch("nesting depth must be nonnegative")
    rng = random.Random(config.seed)
    bound = min(depth, n - 1)
    for done in range(1, config.pair_count + 1):
        c = random_unitriangular(rng, fd, n)
        for _ in range(depth):
            c = commutator(random_unitriangular(rng, fd, n), c)
        ok = all(
            c[i, j].is_zero for i in range(n) for j in range(i + 1, min(i + bound + 1, n))
        )
        if depth >= n - 1:
            ok = ok and c == identity(fd, n)
        if not ok:
            return Verdict(False, (c, None), done, config.seed)
    return Verdict(True, None, config.pair_count, config.seed)
