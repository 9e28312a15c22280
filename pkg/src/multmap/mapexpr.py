"""Multiplicative map expressions and their canonical forms.

A MapExpr composes four multiplicative building blocks on n x n matrices:

    Conj(R)        A -> R^-1 A R
    Cof            A -> C(A), the signed-minor matrix
    Hom(phi)       A -> phi applied entrywise, phi a field homomorphism
    DetScale(lam)  A -> lam(det A) A on invertibles, 0 on singulars

plus the standalone padded determinant map

    TrivialDet     A -> blockdiag(diag(chi_i(det A)), 0, I) on invertibles,
                   with the character block zeroed on singulars,

which, because its output shape differs from its input, must be the only
atom in its expression. Atoms are listed outermost first: atoms[-1] is
applied to the input first. Every such composite is multiplicative, and
simplify folds one exactly into a canonical form

    A -> lam(det A) * R^-1 C^eps(phi(A)) R        (eps in {0, 1})

tracking whether a determinant factor makes the map vanish on singular
matrices. The fold is pointwise exact on all of M_n, including singular
inputs, not just a formal rewrite on invertibles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    ParseError,
    ProbeMiss,
    SingularConjugator,
    UnregisteredHom,
)
from .field import (
    CONJUGATION_HOM,
    IDENTITY_HOM,
    FieldDescriptor,
    FieldElem,
    RingHom,
    compose_homs,
    format_scalar,
    hom_apply,
    one,
    parse_scalar,
    zero,
)
from .matrix import Matrix, identity, normalize_scale, zeros


# -- determinant characters ---------------------------------------------------


@dataclass(frozen=True)
class ScalarCharacter:
    """A formal product prod h^(p_h) over the registered homomorphisms,
    evaluated at nonzero scalars. The empty product is the constant 1."""

    factors: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[str, int] = {}
        for kind, p in self.factors:
            if kind not in ("id", "conj"):
                raise UnregisteredHom(f"character over unknown hom {kind!r}")
            merged[kind] = merged.get(kind, 0) + p
        canon = tuple(
            (kind, merged[kind]) for kind in ("id", "conj") if merged.get(kind, 0) != 0
        )
        object.__setattr__(self, "factors", canon)

    @property
    def is_empty(self) -> bool:
        return not self.factors

    def evaluate(self, x: FieldElem) -> FieldElem:
        out = one(x.field)
        for kind, p in self.factors:
            out = out * hom_apply(RingHom(kind), x) ** p
        return out

    def multiply(self, other: "ScalarCharacter") -> "ScalarCharacter":
        return ScalarCharacter(self.factors + other.factors)

    def power(self, e: int) -> "ScalarCharacter":
        return ScalarCharacter(tuple((kind, p * e) for kind, p in self.factors))

    def postcompose(self, h: RingHom) -> "ScalarCharacter":
        """h o self, pushing h through each factor."""
        return ScalarCharacter(
            tuple((compose_homs(h, RingHom(kind)).kind, p) for kind, p in self.factors)
        )

    def compose_char(self, inner: "ScalarCharacter") -> "ScalarCharacter":
        """self o inner as characters: substitute inner for the argument."""
        out = []
        for kind, p in self.factors:
            h = RingHom(kind)
            for ik, q in inner.factors:
                out.append((compose_homs(h, RingHom(ik)).kind, p * q))
        return ScalarCharacter(tuple(out))

    def requires_quadratic(self) -> bool:
        return any(kind == "conj" for kind, _ in self.factors)

    def to_doc(self) -> list:
        return [{"phi": kind, "pow": p} for kind, p in self.factors]

    @classmethod
    def from_doc(cls, doc: object) -> "ScalarCharacter":
        if not isinstance(doc, list):
            raise ParseError("character must be a list of factors")
        factors = []
        for entry in doc:
            if not isinstance(entry, dict):
                raise ParseError("character factor must be an object")
            kind, p = entry.get("phi"), entry.get("pow")
            if kind not in ("id", "conj"):
                raise ParseError(f"unknown character hom {kind!r}")
            if not isinstance(p, int) or isinstance(p, bool):
                raise ParseError("character power must be an integer")
            factors.append((kind, p))
        return cls(tuple(factors))


IDENTITY_CHAR = ScalarCharacter()


def char_of_hom(h: RingHom, power: int = 1) -> ScalarCharacter:
    if not h.is_registered:
        raise UnregisteredHom("only registered homs lift to characters")
    return ScalarCharacter(((h.kind, power),))


@dataclass(frozen=True)
class LambdaTable:
    """A determinant scale known only on finitely many sampled values."""

    entries: tuple[tuple[FieldElem, FieldElem], ...]

    def evaluate(self, x: FieldElem) -> FieldElem:
        for probe, value in self.entries:
            if probe == x:
                return value
        raise ProbeMiss(f"determinant scale unsampled at {format_scalar(x)}")

    def to_doc(self) -> dict:
        return {
            "sampled": [
                [format_scalar(p), format_scalar(v)] for p, v in self.entries
            ]
        }


# -- atoms ---------------------------------------------------------------------


@dataclass(frozen=True)
class Conj:
    R: Matrix


@dataclass(frozen=True)
class Cof:
    pass


@dataclass(frozen=True)
class Hom:
    phi: RingHom


@dataclass(frozen=True)
class DetScale:
    character: ScalarCharacter


@dataclass(frozen=True)
class TrivialDet:
    chars: tuple[ScalarCharacter, ...]
    zero_pad: int
    one_pad: int


Atom = Conj | Cof | Hom | DetScale | TrivialDet


# -- expressions -----------------------------------------------------------------


def _check_char_field(char: ScalarCharacter, fd: FieldDescriptor) -> None:
    if char.requires_quadratic() and not fd.is_quadratic:
        raise FieldMismatch("conjugation character over a rational field")


@dataclass(frozen=True)
class MapExpr:
    """A composite of atoms acting on M_n over a fixed field; atoms[-1] is
    applied first, so the list reads like function composition."""

    n: int
    field: FieldDescriptor
    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if self.n < 1:
            raise DimensionMismatch("maps need n >= 1")
        for atom in self.atoms:
            if isinstance(atom, TrivialDet):
                if len(self.atoms) != 1:
                    raise DimensionMismatch(
                        "a padded determinant map cannot be composed with other atoms"
                    )
                if atom.zero_pad < 0 or atom.one_pad < 0:
                    raise DimensionMismatch("padding sizes must be nonnegative")
                if len(atom.chars) + atom.zero_pad + atom.one_pad < 1:
                    raise DimensionMismatch("padded determinant map needs k >= 1")
                for c in atom.chars:
                    _check_char_field(c, self.field)
            elif isinstance(atom, Conj):
                if atom.R.field != self.field:
                    raise FieldMismatch("conjugator over the wrong field")
                if atom.R.n_rows != self.n or not atom.R.is_square:
                    raise DimensionMismatch("conjugator must be n x n")
                if not atom.R.is_invertible:
                    raise SingularConjugator("conjugator must be invertible")
            elif isinstance(atom, Cof):
                if self.n < 2:
                    raise DimensionMismatch("cofactor atom needs n >= 2")
            elif isinstance(atom, Hom):
                if not atom.phi.is_registered:
                    raise UnregisteredHom("expression homs must be registered")
                if atom.phi.kind == "conj" and not self.field.is_quadratic:
                    raise FieldMismatch("conjugation hom over a rational field")
            elif isinstance(atom, DetScale):
                _check_char_field(atom.character, self.field)
            else:
                raise ParseError(f"unknown atom {atom!r}")

    @property
    def k(self) -> int:
        """Output size; differs from n only for padded determinant maps."""
        if self.atoms and isinstance(self.atoms[0], TrivialDet):
            t = self.atoms[0]
            return len(t.chars) + t.zero_pad + t.one_pad
        return self.n

    def evaluate(self, a: Matrix) -> Matrix:
        if a.field != self.field:
            raise FieldMismatch("input over the wrong field")
        if not a.is_square or a.n_rows != self.n:
            raise DimensionMismatch(f"input must be {self.n} x {self.n}")
        out = a
        for atom in reversed(self.atoms):
            out = _apply_atom(atom, out, self.field)
        return out

    def as_oracle(self):
        return self.evaluate

    def to_doc(self) -> dict:
        return {
            "n": self.n,
            "field": self.field.to_doc(),
            "atoms": [_atom_to_doc(a) for a in self.atoms],
            "order": "apply-last-first",
        }

    @classmethod
    def from_doc(cls, doc: object) -> "MapExpr":
        if not isinstance(doc, dict):
            raise ParseError("map expression must be an object")
        n = doc.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError("map expression needs a positive integer 'n'")
        fd = FieldDescriptor.from_doc(doc.get("field"))
        order = doc.get("order", "apply-last-first")
        if order != "apply-last-first":
            raise ParseError(f"unsupported atom order {order!r}")
        atoms_doc = doc.get("atoms")
        if not isinstance(atoms_doc, list):
            raise ParseError("'atoms' must be a list")
        atoms = tuple(_atom_from_doc(a, fd, n) for a in atoms_doc)
        return cls(n, fd, atoms)


def compose(outer: MapExpr, inner: MapExpr) -> MapExpr:
    """outer o inner; inner's output feeds outer."""
    if outer.field != inner.field:
        raise FieldMismatch("composition across fields")
    if inner.k != outer.n:
        raise DimensionMismatch(
            f"inner map lands in size {inner.k} but outer expects {outer.n}"
        )
    return MapExpr(inner.n, inner.field, outer.atoms + inner.atoms)


def identity_expr(fd: FieldDescriptor, n: int) -> MapExpr:
    return MapExpr(n, fd, ())


def _apply_atom(atom: Atom, a: Matrix, fd: FieldDescriptor) -> Matrix:
    if isinstance(atom, Conj):
        return atom.R.inverse() * a * atom.R
    if isinstance(atom, Cof):
        return a.cofactor()
    if isinstance(atom, Hom):
        return Matrix(fd, [[hom_apply(atom.phi, x) for x in r] for r in a.rows])
    if isinstance(atom, DetScale):
        d = a.det
        if d.is_zero:
            return zeros(fd, a.n_rows)
        return atom.character.evaluate(d) * a
    t = atom
    d = a.det
    m, z, s = len(t.chars), t.zero_pad, t.one_pad
    k = m + z + s
    diag = [zero(fd)] * k
    for i in range(k - s, k):
        diag[i] = one(fd)
    if not d.is_zero:
        for i, c in enumerate(t.chars):
            diag[i] = c.evaluate(d)
    return Matrix(
        fd, [[diag[i] if i == j else zero(fd) for j in range(k)] for i in range(k)]
    )


def _atom_to_doc(atom: Atom) -> dict:
    if isinstance(atom, Conj):
        return {"atom": "conj", "R": atom.R.to_doc()}
    if isinstance(atom, Cof):
        return {"atom": "cof"}
    if isinstance(atom, Hom):
        return {"atom": "hom", "phi": atom.phi.kind}
    if isinstance(atom, DetScale):
        return {"atom": "detscale", "lambda": atom.character.to_doc()}
    return {
        "atom": "trivialdet",
        "chars": [c.to_doc() for c in atom.chars],
        "zeroPad": atom.zero_pad,
        "onePad": atom.one_pad,
    }


def _atom_from_doc(doc: object, fd: FieldDescriptor, n: int) -> Atom:
    if not isinstance(doc, dict):
        raise ParseError("atom must be an object")
    kind = doc.get("atom")
    if kind == "conj":
        r = Matrix.from_doc(doc.get("R"))
        if r.field != fd or r.n_rows != n:
            raise ParseError("conjugator field or size disagrees with the expression")
        return Conj(r)
    if kind == "cof":
        return Cof()
    if kind == "hom":
        phi = doc.get("phi")
        if phi == "id":
            return Hom(IDENTITY_HOM)
        if phi == "conj":
            return Hom(CONJUGATION_HOM)
        raise ParseError(f"unknown hom {phi!r}")
    if kind == "detscale":
        return DetScale(ScalarCharacter.from_doc(doc.get("lambda")))
    if kind == "trivialdet":
        chars_doc = doc.get("chars")
        if not isinstance(chars_doc, list):
            raise ParseError("'chars' must be a list of characters")
        chars = tuple(ScalarCharacter.from_doc(c) for c in chars_doc)
        zp, op = doc.get("zeroPad", 0), doc.get("onePad", 0)
        for v in (zp, op):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ParseError("pad sizes must be nonnegative integers")
        return TrivialDet(chars, zp, op)
    raise ParseError(f"unknown atom kind {kind!r}")


# -- canonical forms ---------------------------------------------------------------


@dataclass(frozen=True)
class TrivialForm:
    """A -> blockdiag(diag(chi_i(det A)), 0, I), zero character block on
    singular input. The kernel of the map contains all of SL_n."""

    field: FieldDescriptor
    n: int
    chars: tuple[ScalarCharacter, ...]
    zero_pad: int
    one_pad: int

    kind = "trivial"

    @property
    def k(self) -> int:
        return len(self.chars) + self.zero_pad + self.one_pad

    def evaluate(self, a: Matrix) -> Matrix:
        return _apply_atom(
            TrivialDet(self.chars, self.zero_pad, self.one_pad), a, self.field
        )

    def describe(self) -> dict:
        return {
            "class": "trivial",
            "chars": [c.to_doc() for c in self.chars],
            "zeroPad": self.zero_pad,
            "onePad": self.one_pad,
        }


@dataclass(frozen=True)
class DegenerateForm:
    """A -> lam(det A) R^-1 C^eps(phi(A)) R on invertibles, 0 on singulars.
    lam may be the empty character; vanishing on singulars is what separates
    this class from NonDegenerateForm."""

    field: FieldDescriptor
    n: int
    lam: ScalarCharacter | LambdaTable
    phi: RingHom
    R: Matrix
    eps: int

    kind = "degenerate"

    @property
    def k(self) -> int:
        return self.n

    def evaluate(self, a: Matrix) -> Matrix:
        d = a.det
        if d.is_zero:
            return zeros(self.field, self.n)
        scale = self.lam.evaluate(d)
        return scale * _core_evaluate(self, a)

    def describe(self) -> dict:
        return {
            "class": "degenerate",
            "phi": _hom_doc(self.phi),
            "lambda": _lam_doc(self.lam),
            "eps": "cofactor" if self.eps else "plain",
            "R": self.R.to_doc(),
        }


@dataclass(frozen=True)
class NonDegenerateForm:
    """A -> R^-1 C^eps(phi(A)) R, exact on every matrix, singular or not."""

    field: FieldDescriptor
    n: int
    phi: RingHom
    R: Matrix
    eps: int

    kind = "nondegenerate"

    @property
    def k(self) -> int:
        return self.n

    def evaluate(self, a: Matrix) -> Matrix:
        return _core_evaluate(self, a)

    def describe(self) -> dict:
        return {
            "class": "nondegenerate",
            "phi": _hom_doc(self.phi),
            "eps": "cofactor" if self.eps else "plain",
            "R": self.R.to_doc(),
        }


CanonicalForm = TrivialForm | DegenerateForm | NonDegenerateForm


def _core_evaluate(form, a: Matrix) -> Matrix:
    out = Matrix(
        form.field, [[hom_apply(form.phi, x) for x in r] for r in a.rows]
    )
    if form.eps:
        out = out.cofactor()
    return form.R.inverse() * out * form.R


def _hom_doc(h: RingHom):
    if h.is_registered:
        return h.kind
    return {
        "sampled": [[format_scalar(p), format_scalar(v)] for p, v in h.table]
    }


def _lam_doc(lam):
    if isinstance(lam, ScalarCharacter):
        return lam.to_doc()
    return lam.to_doc()


def canonical_eq(a: CanonicalForm, b: CanonicalForm) -> bool:
    """Syntactic equality of canonical data: class, characters as multisets
    where order is arbitrary, homs by kind or table, conjugators up to the
    scale normalization."""
    if a.kind != b.kind or a.field != b.field or a.n != b.n:
        return False
    if isinstance(a, TrivialForm):
        return (
            sorted(c.factors for c in a.chars) == sorted(c.factors for c in b.chars)
            and a.zero_pad == b.zero_pad
            and a.one_pad == b.one_pad
        )
    if a.phi != b.phi or a.eps != b.eps:
        return False
    if normalize_scale(a.R) != normalize_scale(b.R):
        return False
    if isinstance(a, DegenerateForm):
        la, lb = a.lam, b.lam
        if isinstance(la, ScalarCharacter) != isinstance(lb, ScalarCharacter):
            return False
        if isinstance(la, ScalarCharacter):
            return la == lb
        return set(la.entries) == set(lb.entries)
    return True


# -- exact simplification ------------------------------------------------------------


def simplify(expr: MapExpr) -> CanonicalForm:
    """Fold an expression into its canonical form.

    The state (lam, phi, eps, R, saw_degenerate) denotes the map
    A -> lam(det A) R^-1 C^eps(phi(A)) R with the degenerate zero-on-singular
    convention active once lam is nonempty or a DetScale was folded. Each
    atom updates the state exactly; the identities used are

        C(X Y) = C(X) C(Y)                  C(c X) = c^(n-1) C(X)
        C(C(X)) = det(X)^(n-2) X            psi(C(X)) = C(psi(X))
        det C(X) = det(X)^(n-1)             det psi(X) = psi(det X)

    all of which hold on singular matrices too, which is what makes the
    resulting form pointwise equal to the expression everywhere.
    """
    if expr.atoms and isinstance(expr.atoms[0], TrivialDet):
        t = expr.atoms[0]
        return TrivialForm(expr.field, expr.n, t.chars, t.zero_pad, t.one_pad)
    n, fd = expr.n, expr.field
    lam = IDENTITY_CHAR
    phi = IDENTITY_HOM
    eps = 0
    r = identity(fd, n)
    saw_degenerate = False
    for atom in reversed(expr.atoms):
        if isinstance(atom, Conj):
            r = r * atom.R
        elif isinstance(atom, Hom):
            lam = lam.postcompose(atom.phi)
            phi = compose_homs(atom.phi, phi)
            r = Matrix(fd, [[hom_apply(atom.phi, x) for x in row] for row in r.rows])
        elif isinstance(atom, Cof):
            new_lam = lam.power(n - 1)
            if eps:
                new_lam = new_lam.multiply(char_of_hom(phi, n - 2))
            lam = new_lam
            eps = 1 - eps
            r = r.cofactor()
        elif isinstance(atom, DetScale):
            det_char = lam.power(n).multiply(char_of_hom(phi, (n - 1) if eps else 1))
            lam = lam.multiply(atom.character.compose_char(det_char))
            saw_degenerate = True
        else:
            raise ParseError(f"unknown atom {atom!r}")
    r = normalize_scale(r)
    if lam.is_empty and not saw_degenerate:
        return NonDegenerateForm(fd, n, phi, r, eps)
    return DegenerateForm(fd, n, lam, phi, r, eps)
