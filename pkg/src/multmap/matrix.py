"""Exact dense matrices over the scalar layer.

Rows are stored as tuples of FieldElem, so matrices are immutable value
objects; determinant, rank, and reduced row echelon data are computed once
and cached. Everything here is exact Gaussian elimination, no pivots are
chosen for numerical reasons, so results are reproducible bit for bit.

Besides the Matrix class the module holds the elementary generator records
(transvections, diagonal units, swaps), the small constructors the rest of
the package leans on (matrix units, rank idempotents), and two structural
routines used by the classifier: splitting a commuting idempotent pair into
its canonical block form, and recovering a conjugator from a system of
matrix unit images.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    IndexOutOfRange,
    NotCommutingIdempotents,
    NotMatrixUnits,
    ParseError,
    SingularMatrix,
    SingularRecovery,
)
from .field import (
    FieldDescriptor,
    FieldElem,
    as_elem,
    format_scalar,
    one,
    parse_scalar,
    zero,
)


class Matrix:
    """Immutable r x c matrix with exact entries over a fixed field."""

    __slots__ = ("field", "n_rows", "n_cols", "rows", "_reduced", "_inv")

    def __init__(self, fd: FieldDescriptor, rows) -> None:
        tup = tuple(tuple(r) for r in rows)
        if not tup or not tup[0]:
            raise DimensionMismatch("matrices must have at least one row and column")
        width = len(tup[0])
        for r in tup:
            if len(r) != width:
                raise DimensionMismatch("ragged rows")
            for x in r:
                if not isinstance(x, FieldElem) or x.field != fd:
                    raise FieldMismatch("entry outside the matrix field")
        object.__setattr__(self, "field", fd)
        object.__setattr__(self, "n_rows", len(tup))
        object.__setattr__(self, "n_cols", width)
        object.__setattr__(self, "rows", tup)
        object.__setattr__(self, "_reduced", None)
        object.__setattr__(self, "_inv", None)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- basic protocol ------------------------------------------------------

    def __getitem__(self, key) -> FieldElem:
        i, j = key
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(
            " ".join(format_scalar(x) for x in row) for row in self.rows
        )
        return f"Matrix[{body}]"

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    @property
    def is_zero(self) -> bool:
        return all(x.is_zero for row in self.rows for x in row)

    def _require_square(self, what: str) -> int:
        if not self.is_square:
            raise DimensionMismatch(f"{what} needs a square matrix")
        return self.n_rows

    def _check_field(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise FieldMismatch("mixed-field matrix arithmetic")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_field(other)
        if (self.n_rows, self.n_cols) != (other.n_rows, other.n_cols):
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix(
            self.field,
            [
                [x + y for x, y in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, [[-x for x in r] for r in self.rows])

    def __mul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_field(other)
        if self.n_cols != other.n_rows:
            raise DimensionMismatch("inner dimensions disagree in product")
        cols = list(zip(*other.rows))
        z = zero(self.field)
        out = []
        for r in self.rows:
            out.append(
                [sum((x * y for x, y in zip(r, c) if not x.is_zero), z) for c in cols]
            )
        return Matrix(self.field, out)

    def __rmul__(self, scalar) -> "Matrix":
        if not isinstance(scalar, FieldElem):
            return NotImplemented
        return self.scale(scalar)

    def scale(self, scalar: FieldElem) -> "Matrix":
        if scalar.field != self.field:
            raise FieldMismatch("scalar outside the matrix field")
        return Matrix(self.field, [[scalar * x for x in r] for r in self.rows])

    def __pow__(self, exponent: int) -> "Matrix":
        n = self._require_square("power")
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = identity(self.field, n)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def transpose(self) -> "Matrix":
        return Matrix(self.field, list(zip(*self.rows)))

    # -- elimination ---------------------------------------------------------

    def _reduce(self):
        """Reduced row echelon form with pivot columns and exact determinant
        bookkeeping (det of the original matrix when square, else None)."""
        if self._reduced is not None:
            return self._reduced
        rows = [list(r) for r in self.rows]
        nr, nc = self.n_rows, self.n_cols
        det = one(self.field)
        pivots = []
        r = 0
        for c in range(nc):
            p = next((i for i in range(r, nr) if not rows[i][c].is_zero), None)
            if p is None:
                continue
            if p != r:
                rows[p], rows[r] = rows[r], rows[p]
                det = -det
            pv = rows[r][c]
            det = det * pv
            inv = pv.inv()
            rows[r] = [x * inv for x in rows[r]]
            for i in range(nr):
                if i != r and not rows[i][c].is_zero:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == nr:
                break
        if self.is_square:
            det_value = det if len(pivots) == nr else zero(self.field)
        else:
            det_value = None
        reduced = (tuple(tuple(r) for r in rows), tuple(pivots), det_value)
        object.__setattr__(self, "_reduced", reduced)
        return reduced

    @property
    def rank(self) -> int:
        return len(self._reduce()[1])

    @property
    def det(self) -> FieldElem:
        self._require_square("determinant")
        return self._reduce()[2]

    @property
    def is_invertible(self) -> bool:
        return self.is_square and self.rank == self.n_rows

    def inverse(self) -> "Matrix":
        if self._inv is not None:
            return self._inv
        n = self._require_square("inverse")
        aug_rows = [
            list(r) + [one(self.field) if i == j else zero(self.field) for j in range(n)]
            for i, r in enumerate(self.rows)
        ]
        reduced, pivots, _ = Matrix(self.field, aug_rows)._reduce()
        if len(pivots) < n or pivots[:n] != tuple(range(n)):
            raise SingularMatrix("matrix is not invertible")
        inv = Matrix(self.field, [row[n:] for row in reduced])
        object.__setattr__(self, "_inv", inv)
        return inv

    def kernel_basis(self) -> list[tuple[FieldElem, ...]]:
        """Basis of the right null space, one vector per free column, in
        column order; deterministic for reproducible conjugators."""
        reduced, pivots, _ = self._reduce()
        pivot_set = set(pivots)
        z, o = zero(self.field), one(self.field)
        basis = []
        for free in range(self.n_cols):
            if free in pivot_set:
                continue
            v = [z] * self.n_cols
            v[free] = o
            for r, pc in enumerate(pivots):
                v[pc] = -reduced[r][free]
            basis.append(tuple(v))
        return basis

    def image_basis(self) -> list[tuple[FieldElem, ...]]:
        """Pivot columns of the original matrix, in column order."""
        _, pivots, _ = self._reduce()
        return [self.column(c) for c in pivots]

    def column(self, j: int) -> tuple[FieldElem, ...]:
        return tuple(r[j] for r in self.rows)

    def submatrix(self, row_range, col_range) -> "Matrix":
        return Matrix(
            self.field, [[self.rows[i][j] for j in col_range] for i in row_range]
        )

    # -- multiplicative structure ---------------------------------------------

    def cofactor(self) -> "Matrix":
        """Signed-minor matrix C(A) with C(A)_ij = (-1)^(i+j) det(A without
        row i and column j). Satisfies C(AB) = C(A) C(B) on every square
        matrix and A C(A)^T = det(A) I; defined for size two and up."""
        n = self._require_square("cofactor")
        if n < 2:
            raise DimensionMismatch("cofactor needs size at least two")
        out = []
        for i in range(n):
            row = []
            rest_rows = [r for r in range(n) if r != i]
            for j in range(n):
                minor = self.submatrix(rest_rows, [c for c in range(n) if c != j])
                m = minor.det
                row.append(m if (i + j) % 2 == 0 else -m)
            out.append(row)
        return Matrix(self.field, out)

    def is_idempotent(self) -> bool:
        return self.is_square and self * self == self

    def is_unipotent(self) -> bool:
        n = self._require_square("unipotence")
        return ((self - identity(self.field, n)) ** n).is_zero

    # -- serialization ---------------------------------------------------------

    def to_doc(self) -> dict:
        n = self._require_square("serialization")
        return {
            "field": self.field.to_doc(),
            "n": n,
            "entries": [[format_scalar(x) for x in r] for r in self.rows],
        }

    @classmethod
    def from_doc(cls, doc: object) -> "Matrix":
        if not isinstance(doc, dict):
            raise ParseError("matrix document must be an object")
        fd = FieldDescriptor.from_doc(doc.get("field"))
        n = doc.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError("matrix document needs a positive integer 'n'")
        entries = doc.get("entries")
        if not isinstance(entries, list) or len(entries) != n:
            raise ParseError(f"'entries' must be a list of {n} rows")
        rows = []
        for r in entries:
            if not isinstance(r, list) or len(r) != n:
                raise ParseError(f"each row must list {n} scalars")
            rows.append([parse_scalar(x, fd) for x in r])
        return cls(fd, rows)


# -- constructors --------------------------------------------------------------


def identity(fd: FieldDescriptor, n: int) -> Matrix:
    o, z = one(fd), zero(fd)
    return Matrix(fd, [[o if i == j else z for j in range(n)] for i in range(n)])


def zeros(fd: FieldDescriptor, n_rows: int, n_cols: int | None = None) -> Matrix:
    z = zero(fd)
    c = n_rows if n_cols is None else n_cols
    return Matrix(fd, [[z] * c for _ in range(n_rows)])


def from_values(fd: FieldDescriptor, rows) -> Matrix:
    """Build a matrix from ints or Fractions, coercing into the field."""
    return Matrix(fd, [[as_elem(fd, x) for x in r] for r in rows])


def from_columns(fd: FieldDescriptor, columns) -> Matrix:
    cols = list(columns)
    if not cols:
        raise DimensionMismatch("need at least one column")
    return Matrix(fd, [list(row) for row in zip(*cols)])


def unit_matrix(fd: FieldDescriptor, n: int, i: int, j: int) -> Matrix:
    """E_ij, one-based: 1 in row i column j and 0 elsewhere."""
    _check_index(n, i, j, allow_equal=True)
    z = zero(fd)
    rows = [[z] * n for _ in range(n)]
    rows[i - 1][j - 1] = one(fd)
    return Matrix(fd, rows)


def rank_idempotent(fd: FieldDescriptor, n: int, r: int) -> Matrix:
    """diag(1 ... 1, 0 ... 0) with r ones."""
    if not 0 <= r <= n:
        raise IndexOutOfRange(f"rank {r} outside 0..{n}")
    o, z = one(fd), zero(fd)
    return Matrix(fd, [[o if i == j and i < r else z for j in range(n)] for i in range(n)])


def coidempotent(fd: FieldDescriptor, n: int, j: int) -> Matrix:
    """I - E_jj, one-based; the rank n-1 diagonal idempotent with hole j."""
    return identity(fd, n) - unit_matrix(fd, n, j, j)


# -- elementary generators -------------------------------------------------------


def _check_index(n: int, i: int, j: int | None = None, allow_equal: bool = False) -> None:
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"index {i} outside 1..{n}")
    if j is not None:
        if not 1 <= j <= n:
            raise IndexOutOfRange(f"index {j} outside 1..{n}")
        if i == j and not allow_equal:
            raise IndexOutOfRange("indices must differ")


@dataclass(frozen=True)
class Transvection:
    """P_ij(k) = I + k E_ij with i != j; determinant one."""

    i: int
    j: int
    k: FieldElem

    def __post_init__(self) -> None:
        if self.i < 1 or self.j < 1 or self.i == self.j:
            raise IndexOutOfRange("transvection needs distinct one-based indices")

    def inv(self) -> "Transvection":
        return Transvection(self.i, self.j, -self.k)


@dataclass(frozen=True)
class DiagUnit:
    """D_i(k) = I + (k - 1) E_ii with k != 0; determinant k."""

    i: int
    k: FieldElem

    def __post_init__(self) -> None:
        if self.i < 1:
            raise IndexOutOfRange("diagonal unit needs a one-based index")
        if self.k.is_zero:
            raise SingularMatrix("diagonal unit with zero scale")

    def inv(self) -> "DiagUnit":
        return DiagUnit(self.i, self.k.inv())


@dataclass(frozen=True)
class Swap:
    """The transposition matrix exchanging coordinates i and j; det -1."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i < 1 or self.j < 1 or self.i == self.j:
            raise IndexOutOfRange("swap needs distinct one-based indices")

    def inv(self) -> "Swap":
        return self


Generator = Transvection | DiagUnit | Swap


def gen_matrix(gen: Generator, fd: FieldDescriptor, n: int) -> Matrix:
    """Realize an elementary generator as an n x n matrix."""
    if isinstance(gen, Transvection):
        _check_index(n, gen.i, gen.j)
        if gen.k.field != fd:
            raise FieldMismatch("transvection scalar outside the field")
        m = [list(r) for r in identity(fd, n).rows]
        m[gen.i - 1][gen.j - 1] = gen.k
        return Matrix(fd, m)
    if isinstance(gen, DiagUnit):
        _check_index(n, gen.i)
        if gen.k.field != fd:
            raise FieldMismatch("diagonal scalar outside the field")
        m = [list(r) for r in identity(fd, n).rows]
        m[gen.i - 1][gen.i - 1] = gen.k
        return Matrix(fd, m)
    if isinstance(gen, Swap):
        _check_index(n, gen.i, gen.j)
        m = [list(r) for r in identity(fd, n).rows]
        a, b = gen.i - 1, gen.j - 1
        m[a], m[b] = m[b], m[a]
        return Matrix(fd, m)
    raise TypeError(f"not an elementary generator: {gen!r}")


def solve_exact(a: Matrix, b: Matrix) -> Matrix:
    """The unique X with a X = b, for a of full column rank; raises
    SingularMatrix when the columns are dependent or the system has no
    solution."""
    if a.field != b.field:
        raise FieldMismatch("mixed-field linear solve")
    if a.n_rows != b.n_rows:
        raise DimensionMismatch("row counts disagree in linear solve")
    m = a.n_cols
    aug = Matrix(a.field, [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)])
    reduced, pivots, _ = aug._reduce()
    if pivots != tuple(range(m)):
        raise SingularMatrix("linear system is rank deficient or inconsistent")
    return Matrix(a.field, [row[m:] for row in reduced[:m]])


# -- structural recoveries -------------------------------------------------------


def split_idempotent_pair(p_zero: Matrix, p_one: Matrix):
    """Simultaneously block-diagonalize a commuting idempotent pair with
    p_zero below p_one (both products equal p_zero).

    Returns (S, s, l) where s = rank p_zero, l = rank p_one - s, and
    S^-1 p_zero S = diag(0_l, 0, I_s), S^-1 p_one S = diag(I_l, 0, I_s).
    For the pair (0, I) the basis comes out in standard order, so S = I.
    """
    k = p_zero._require_square("idempotent splitting")
    if p_one.n_rows != k or not p_one.is_square or p_one.field != p_zero.field:
        raise DimensionMismatch("idempotent pair must be square of equal size")
    if not p_zero.is_idempotent() or not p_one.is_idempotent():
        raise NotCommutingIdempotents("images of 0 and I must be idempotent")
    if p_zero * p_one != p_zero or p_one * p_zero != p_zero:
        raise NotCommutingIdempotents(
            "images of 0 and I must commute with product the image of 0"
        )
    fd = p_zero.field
    s = p_zero.rank
    l = p_one.rank - s
    columns = (
        (p_one - p_zero).image_basis() + p_one.kernel_basis() + p_zero.image_basis()
    )
    if len(columns) != k:
        raise NotCommutingIdempotents("idempotent pair does not split the space")
    basis = from_columns(fd, columns)
    s_inv = basis.inverse()
    if s_inv * p_zero * basis != _padded_identity(fd, k, l, s, low_only=True):
        raise NotCommutingIdempotents("image of 0 is not the expected projector")
    if s_inv * p_one * basis != _padded_identity(fd, k, l, s, low_only=False):
        raise NotCommutingIdempotents("image of I is not the expected projector")
    return basis, s, l


def _padded_identity(fd: FieldDescriptor, k: int, l: int, s: int, low_only: bool) -> Matrix:
    o, z = one(fd), zero(fd)
    diag = []
    for i in range(k):
        if i < l:
            diag.append(z if low_only else o)
        elif i < k - s:
            diag.append(z)
        else:
            diag.append(o)
    return Matrix(fd, [[diag[i] if i == j else z for j in range(k)] for i in range(k)])


def conjugator_from_units(units: list[list[Matrix]]) -> Matrix:
    """Given F[i][j] (zero-based lists) claimed to behave like matrix units,
    find R with R F_ij R^-1 = E_ij.

    Checks F_ij F_kl = delta_jk F_il first; any failure raises NotMatrixUnits.
    The conjugator is assembled from v, a nonzero column of F_11, via
    R^-1 = [F_11 v | F_21 v | ... | F_n1 v]; those columns are independent
    whenever the relations hold, because applying F_1m picks out the m-th
    coefficient. The result is normalized so its first nonzero entry in row
    major order is one.
    """
    n = len(units)
    if n < 1 or any(len(row) != n for row in units):
        raise DimensionMismatch("unit family must be square")
    fd = units[0][0].field
    k = units[0][0].n_rows
    if k != n:
        raise DimensionMismatch("full unit recovery needs n x n units in M_n")
    zero_m = zeros(fd, k)
    for i in range(n):
        for j in range(n):
            for p in range(n):
                for q in range(n):
                    expected = units[i][q] if j == p else zero_m
                    if units[i][j] * units[p][q] != expected:
                        raise NotMatrixUnits(
                            "matrix unit relations F_ij F_kl = delta_jk F_il violated"
                        )
    f11 = units[0][0]
    v = next((f11.column(c) for c in range(k) if any(not x.is_zero for x in f11.column(c))), None)
    if v is None:
        raise NotMatrixUnits("F_11 is zero, no unit structure to recover")
    v_mat = from_columns(fd, [v])
    columns = [(units[j][0] * v_mat).column(0) for j in range(n)]
    r_inv = from_columns(fd, columns)
    if not r_inv.is_invertible:
        raise SingularRecovery("assembled conjugator is singular")
    r = normalize_scale(r_inv.inverse())
    for i in range(n):
        for j in range(n):
            if r * units[i][j] != unit_matrix(fd, n, i + 1, j + 1) * r:
                raise NotMatrixUnits("recovered conjugator fails to align the units")
    return r


def normalize_scale(m: Matrix) -> Matrix:
    """Scale so the first nonzero entry in row-major order equals one."""
    for row in m.rows:
        for x in row:
            if not x.is_zero:
                return m.scale(x.inv())
    return m
