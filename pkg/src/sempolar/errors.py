"""Exception hierarchy shared across the toolkit."""


class SempolarError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(SempolarError):
    """Input bytes or records do not conform to an expected format."""


class StoreFormatError(DataFormatError):
    """An embedding store file is malformed or inconsistent."""


class DimensionMismatchError(SempolarError):
    """Vectors of differing dimension were mixed in one operation."""


class DegenerateInputError(SempolarError):
    """Input is structurally valid but statistically unusable
    (empty embedding set, zero-variance series, no data in window)."""


class CollinearityError(SempolarError):
    """A regression design matrix is rank deficient."""


class InputError(SempolarError):
    """An argument violates an operation's precondition."""


class ConfigError(SempolarError):
    """Run configuration is missing, unparseable, or contradictory."""
