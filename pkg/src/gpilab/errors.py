"""Exception hierarchy.

``InputError`` covers everything a caller can fix (bad arguments, malformed
files, violated preconditions) and maps to CLI exit code 1. ``NumericalError``
signals a failed numerical procedure (quadrature non-convergence) and maps to
exit code 2.
"""


class GpilabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GpilabError, ValueError):
    """Invalid argument, file content, or violated precondition."""


class SetupError(InputError):
    """An experiment configuration fails its feasibility checks."""


class SpecFunctionError(InputError):
    """A user-supplied index ingredient violates its contract."""


class UndefinedChangeError(InputError):
    """Relative change requested against a zero baseline index."""


class NumericalError(GpilabError):
    """A numerical routine failed to reach its accuracy target."""
