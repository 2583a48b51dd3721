"""Exception types raised across the package."""


class SpecgradError(ValueError):
    """Base class for all package errors."""


class DegenerateSum(SpecgradError):
    """``alpha + beta == 0``; the closed form has no value there."""


class OutOfDomain(SpecgradError):
    """A point (or a finite-difference probe) left the open domain of an objective."""


class BadParameter(SpecgradError):
    """An objective factory received an invalid parameter."""


class BadConfig(SpecgradError):
    """A solver run was configured inconsistently."""


class BadTrace(SpecgradError):
    """A trace cannot be checked by the requested verification."""
