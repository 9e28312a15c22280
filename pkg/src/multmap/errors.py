"""Exception taxonomy shared across the package.

Every error raised by the library derives from MultmapError so callers (and
the CLI exit-code mapping) can tell domain failures from genuine bugs.
"""

from __future__ import annotations


class MultmapError(Exception):
    """Base class for all library errors."""


class FieldMismatch(MultmapError):
    """Operands or homomorphisms belong to different scalar fields."""


class DivisionByZero(MultmapError):
    """Inversion of the zero scalar."""


class ParseError(MultmapError):
    """Malformed scalar string or document; carries the offending position."""

    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


class ProbeMiss(MultmapError):
    """A sampled homomorphism or character was queried off its table."""


class UnregisteredHom(MultmapError):
    """A ring homomorphism outside the registered family where one is required."""


class DimensionMismatch(MultmapError):
    """Incompatible matrix or map dimensions."""


class IndexOutOfRange(MultmapError):
    """A 1-based generator or block index outside its legal range."""


class SingularMatrix(MultmapError):
    """An operation required an invertible matrix."""


class NotSpecialLinear(MultmapError):
    """decompose_sl input has determinant != 1."""


class SingularConjugator(MultmapError):
    """A conjugation atom was built from a singular matrix."""


class NotMatrixUnits(MultmapError):
    """A matrix family violates the unit relations F_ij F_kl = delta_jk F_il."""


class SingularRecovery(MultmapError):
    """The conjugator assembled from a matrix-unit family is singular."""


class NotCommutingIdempotents(MultmapError):
    """split_idempotent_pair preconditions (idempotency/absorption) fail."""


class NotMultiplicative(MultmapError):
    """The probed oracle is inconsistent with any multiplicative map."""


class RankLadderViolation(NotMultiplicative):
    """Images of singular probes are inconsistent across ranks."""


class NonDiagonalizableTrivial(MultmapError):
    """Trivial-class probe images could not be simultaneously diagonalized."""


class UnrecognizedHom(MultmapError):
    """Probe-consistent homomorphism outside the registered family."""


class VerificationFailed(MultmapError):
    """A recovered form disagrees with its oracle on a fresh sample."""


class UnsupportedDimension(MultmapError):
    """Domain size n = 1 or codomain k > n is outside scope."""


class OracleBudgetExceeded(MultmapError):
    """Internal error: a classification exceeded its oracle-call budget."""
