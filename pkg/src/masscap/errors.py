"""Exception types raised by masscap operations."""


class MasscapError(Exception):
    """Base class for all library errors."""


class DomainError(MasscapError, ValueError):
    """A coordinate or interval lies outside the profile's domain."""


class EvaluationError(MasscapError, ArithmeticError):
    """A profile function could not be evaluated or differentiated."""


class AsymptoticsError(MasscapError):
    """An asymptotic limit did not converge on the sampled grid."""


class CapacityError(MasscapError):
    """A capacity integral diverged or the annulus is degenerate."""


class HorizonError(MasscapError, ValueError):
    """The area-radius metric coefficient f vanishes inside the requested domain."""


class NoHarmonicFunctionError(MasscapError):
    """No bounded harmonic function with the requested end behavior exists."""


class FitWindowError(MasscapError):
    """A small-sphere fit was attempted outside its convergence window."""
