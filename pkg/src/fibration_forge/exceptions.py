"""Exception hierarchy.

Errors fall into two families that the command line maps onto exit codes:
``DomainError`` (an input outside the region where the construction is
defined, exit 3) and ``VerificationError`` (a certificate that did not come
out clean, exit 4).
"""


class FibrationForgeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FibrationForgeError, ValueError):
    """Input violates a mathematical precondition."""


class VerificationError(FibrationForgeError):
    """A numerical certificate failed."""


class RealEigenvalueError(DomainError):
    """A linear map has an eigenvalue on (or within tolerance of) the real axis."""


class IllConditionedError(DomainError):
    """A polynomial cofactor solve left a residual above its threshold."""


class RankDeficientError(DomainError):
    """Columns are numerically linearly dependent."""


class NotInChartError(DomainError):
    """A 2-plane lies outside the chart neighbourhood of the base plane."""


class NotInvariantError(DomainError):
    """A plane is not invariant under the given complex structure."""


class NotTransverseError(DomainError):
    """A complex subspace meets its conjugate."""


class DimensionMismatchError(DomainError):
    """Operands have incompatible shapes."""


class NotUnitError(DomainError):
    """A vector expected on the unit sphere is not unit length."""


class NotOrthogonalError(DomainError):
    """A complex structure expected to be orthogonal is not."""


class DegenerateSplitError(DomainError):
    """A conjugate split vector has a vanishing real or imaginary part."""


class NonPositiveMarginError(DomainError):
    """The sampled transversality margin is not positive."""


class ExponentOverflowError(DomainError):
    """The bump exponent needed for certification exceeds the configured cap."""


class GermInvalidError(DomainError):
    """A germ's differential has a real eigenvalue where it must not."""


class MismatchError(VerificationError):
    """Principal angle profiles differ, so no aligning isometry exists."""


class TangencyError(VerificationError):
    """A sampled base space is tangent to a bad cone."""

    def __init__(self, message, sample=None, margin=None):
        super().__init__(message)
        self.sample = sample
        self.margin = margin


class ExtensionFailedError(VerificationError):
    """No radius in the schedule produced a clean germ extension."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
