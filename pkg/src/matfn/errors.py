"""Exception types shared across the package."""


class MatfnError(Exception):
    """Base class for errors raised by this package."""


class FieldDomainError(MatfnError):
    """A scalar field was evaluated or differentiated outside its domain."""


class FieldParseError(MatfnError):
    """Field text could not be parsed."""


class SpectralError(MatfnError):
    """Eigenvalue analysis failed or produced inconsistent data."""


class NotDiagonalizableError(SpectralError):
    """A matrix required to be diagonalizable is not.

    The general interpolation route handles defective matrices; this error
    points callers of the eigenbasis route there.
    """


class InterpolationError(MatfnError):
    """Hermite interpolation could not be carried out reliably."""
