"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so constructors and loaders
raise the most specific type that applies.
"""


class SteerkitError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SteerkitError):
    """A constructed object violates one of its defining relations."""


class FeasibilityError(ValidationError):
    """A measurement construction parameter leaves the PSD-feasible range."""


class StateFormatError(SteerkitError):
    """A state file or parameter set cannot be turned into a valid state."""


class BracketError(SteerkitError):
    """A bisection bracket does not straddle a detection boundary."""


class NumericalIntegrityError(SteerkitError):
    """A quantity that must be real/positive came out numerically corrupt."""
