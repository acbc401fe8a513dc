"""Exception hierarchy.

Geometry failures (a certificate that does not pass) are kept apart from
plumbing failures (bad input), so callers and the CLI can tell them apart.
"""


class WarpfieldError(Exception):
    """Base class for every error raised by the package."""


class UsageError(WarpfieldError, ValueError):
    """Bad arguments, wrong descriptor side, unparsable input."""


class DomainError(UsageError):
    """A radius or parameter lies outside the admissible domain."""


class PreconditionError(UsageError):
    """An operation was called outside its stated preconditions."""


class InvalidProfileError(WarpfieldError):
    """A warping function is not strictly positive where it must be."""


class HypothesisError(WarpfieldError):
    """A structural hypothesis (codimension, invertibility) is violated."""


class NotInAstdError(WarpfieldError):
    """A warping function fails the almost-standard admissibility conditions."""


class CertificateError(WarpfieldError):
    """Base for failures that carry a curvature certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ConstructionError(CertificateError):
    """A construction could not produce an object meeting its invariants."""


class ConstructionFailed(ConstructionError):
    """A parameter search was exhausted; ``certificate`` is the best found."""


class HomotopyFailed(CertificateError):
    """A member of a discretized homotopy failed its certificate."""

    def __init__(self, message, s=None, certificate=None):
        super().__init__(message, certificate)
        self.s = s


class RetractFailed(CertificateError):
    """A retraction stage could not be certified."""

    def __init__(self, message, stage=None, certificate=None):
        super().__init__(message, certificate)
        self.stage = stage


class FamilyFailed(CertificateError):
    """One member of a family isotopy failed."""

    def __init__(self, message, index=None, certificate=None):
        super().__init__(message, certificate)
        self.index = index
