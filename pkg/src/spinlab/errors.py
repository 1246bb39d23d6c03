"""Exception hierarchy.

Every failure mode that the library signals on purpose derives from
:class:`SpinlabError`, so callers (the CLI in particular) can tell a
deliberate refusal apart from a programming error.
"""

from __future__ import annotations


class SpinlabError(Exception):
    """Base class for all deliberate failures raised by spinlab."""


class NotNormal(SpinlabError):
    """A matrix expected to be normal fails ``A A^* = A^* A``."""


class ClusterAmbiguity(SpinlabError):
    """Two eigenvalue estimates are too close to separate and too far to merge."""


class DimensionOverflow(SpinlabError):
    """The requested computation exceeds the dense-path size cap."""


class CenterDegenerate(SpinlabError):
    """Random central elements kept producing a clustered spectrum."""


class NotIncluded(SpinlabError):
    """The putative subalgebra is not contained in the larger algebra."""


class NonIntegerEntry(SpinlabError):
    """An inclusion-matrix entry did not round cleanly to an integer."""


class OutOfParameterRange(SpinlabError):
    """A family parameter lies outside its admissible interval."""


class ZeroVector(SpinlabError):
    """A vector that must be nonzero is zero."""


class OrderTooLarge(SpinlabError):
    """Exhaustive search requested beyond the supported matrix order."""


class DegeneratePair(SpinlabError):
    """The two circle parameters coincide up to sign, so no pair exists."""


class EquivalentSeeds(SpinlabError):
    """The two seeds are monomially equivalent and define the same subalgebra."""


class NegativeInput(SpinlabError):
    """A nonnegative argument was negative."""


class NotUnitary(SpinlabError):
    """A matrix expected to be unitary is not."""


class IndexOne(SpinlabError):
    """An index equals one, so the angle formula divides by zero."""


class InclusionViolated(SpinlabError):
    """The four algebras of a quadruple are not nested as required."""


class IntersectionMismatch(SpinlabError):
    """The supplied bottom algebra differs from the intersection of the sides."""


class ReductionUnavailable(SpinlabError):
    """No closed-form reduction applies at the requested level."""


class RangeExceeded(SpinlabError):
    """The multiplicity recurrence was asked for a level outside its range."""


class PowerMatchFailure(SpinlabError):
    """A measured eigenvalue is not close to any admissible power of the phase ratio."""


class UsageError(SpinlabError):
    """Malformed command-line input (bad angle string and the like)."""
