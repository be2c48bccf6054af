"""shrink: error-bounded data-series compression.

A two-layer codec: a knowledge base of merged piecewise-linear semantics
extracted under a fluctuation-adaptive threshold, plus entropy-coded
quantized residuals for arbitrarily accurate (including exact)
reconstruction of the original series.
"""

from .codec import (
    CorruptArtifactError,
    compress,
    compress_lossless,
    decompress,
    deserialize,
    serialize,
)
from .model import (
    CompressedArtifact,
    Cone,
    ErrorThresholds,
    KnowledgeBase,
    ResidualStream,
    SubBase,
    TimeSeries,
    compression_ratio,
    max_abs_error,
)

__version__ = "0.1.0"

__all__ = [
    "TimeSeries",
    "ErrorThresholds",
    "Cone",
    "SubBase",
    "KnowledgeBase",
    "ResidualStream",
    "CompressedArtifact",
    "CorruptArtifactError",
    "compress",
    "compress_lossless",
    "decompress",
    "serialize",
    "deserialize",
    "max_abs_error",
    "compression_ratio",
    "__version__",
]
