"""Frequency-restriction augmentation and linear-cost tail attention.

Public surface: raster I/O, Gaussian high-frequency extraction, the
two-step Fourier high-pass filter, the Tail Interaction layer, a
synthetic leave-one-domain-out harness, and a CLI (``freqgen``).
"""

from .exceptions import (
    ConfigError,
    DecodeError,
    FreqgenError,
    InvalidInputError,
    InvalidParameterError,
    InvalidStateError,
    UnsupportedFormatError,
)
from .raster import read_image, rgb2gray, write_image
from .spatial import (
    GaussianHighpass,
    gaussian_kernel,
    high_freq,
    high_freq_for_network,
    lowpass,
)
from .spectral import (
    AugmentParams,
    TwoStepHighpass,
    highpass_mask,
    sample_params,
    severity_diameters,
    two_step_highpass,
)
from .tail import TailInteraction, dual_normalize
from .model import PatchNetClassifier

__version__ = "0.1.0"

__all__ = [
    "AugmentParams",
    "ConfigError",
    "DecodeError",
    "FreqgenError",
    "GaussianHighpass",
    "InvalidInputError",
    "InvalidParameterError",
    "InvalidStateError",
    "PatchNetClassifier",
    "TailInteraction",
    "TwoStepHighpass",
    "UnsupportedFormatError",
    "dual_normalize",
    "gaussian_kernel",
    "high_freq",
    "high_freq_for_network",
    "highpass_mask",
    "lowpass",
    "read_image",
    "rgb2gray",
    "sample_params",
    "severity_diameters",
    "two_step_highpass",
    "write_image",
]
