"""Exception types shared across the package."""


class KzsimError(Exception):
    """Base class for all package-specific errors."""


class NonHermitianInput(KzsimError):
    """Matrix handed to a Hermitian-only routine violates the symmetry tolerance."""


class DimensionMismatch(KzsimError):
    """Operands have incompatible or unsupported dimensions."""


class DegenerateGround(KzsimError):
    """Ground state is not unique (gap below tolerance)."""


class GapClosed(KzsimError):
    """Energy gap too small to define a relaxation time."""


class ConfigInconsistent(KzsimError):
    """Sweep configuration violates the ramp consistency invariant."""


class InvalidT2(KzsimError):
    """Dephasing requested with missing or non-positive T2 times."""


class IndexOutOfRange(KzsimError, IndexError):
    """Segment index outside the configured scan."""


class NoValidBranch(KzsimError):
    """Neither arcsin branch of the preparation angles reproduces the ground state."""


class InvalidParam(KzsimError):
    """Parameter outside its admissible range."""


class UnknownFigure(KzsimError):
    """Requested figure id is not one of the reproducible datasets."""


class UsageError(KzsimError):
    """Command line could not be parsed (exit code 2)."""


class ValidationError(KzsimError):
    """Command line parsed but carries invalid values (exit code 3)."""


class IoError(KzsimError):
    """Output could not be written (exit code 4)."""
