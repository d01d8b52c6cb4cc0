"""Shape-based secret key extraction from reciprocal wireless channels."""

__version__ = "0.1.0"

from .codec import (  # noqa: E402
    CodeWord,
    PatternSet,
    code_to_bits,
    encode_curve,
    extract_key,
    generate_patterns,
)
from .dsp import Curve, IqTrace, estimate_psd, frechet_distance, lowess_smooth  # noqa: E402

__all__ = [
    "CodeWord",
    "Curve",
    "IqTrace",
    "PatternSet",
    "code_to_bits",
    "encode_curve",
    "estimate_psd",
    "extract_key",
    "frechet_distance",
    "generate_patterns",
    "lowess_smooth",
]
