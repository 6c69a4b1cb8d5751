"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration / validation problems
exit with 1, resource problems (memory budgets, horizons) with 2.
"""


class EscapeLabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(EscapeLabError, ValueError):
    """Invalid parameters, addresses, configuration files, or flags."""


class AddressError(ConfigError):
    """A vertex address is malformed or out of range for the tree."""


class ResourceError(EscapeLabError, RuntimeError):
    """A requested computation exceeds a documented resource budget."""


class HorizonError(ResourceError):
    """A query needs tree levels beyond the sampled horizon."""


class IndeterminateBandError(EscapeLabError):
    """The growth-profile minimum is within tolerance of zero, so the
    presence or absence of a survival band cannot be decided."""


class TruncationWarning(UserWarning):
    """A bounded-region construction filled up to its boundary, so the
    unbounded process may extend beyond what was materialised."""
