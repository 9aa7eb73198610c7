"""Toolkit for measuring semantic polarization between two media sources.

Pipeline: ingest closed captions and tweets into keyword-bearing speaker
turns, embed each keyword occurrence, compute cross-source semantic
polarity series, link the series statistically (ADF + Granger), and
attribute divergence to contextual tokens via integrated gradients.
"""

__version__ = "0.1.0"

from sempolar.errors import (
    CollinearityError,
    ConfigError,
    DataFormatError,
    DegenerateInputError,
    DimensionMismatchError,
    InputError,
    SempolarError,
    StoreFormatError,
)

__all__ = [
    "__version__",
    "SempolarError",
    "DataFormatError",
    "StoreFormatError",
    "DimensionMismatchError",
    "DegenerateInputError",
    "CollinearityError",
    "InputError",
    "ConfigError",
]
