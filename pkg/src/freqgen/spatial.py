"""Gaussian-kernel frequency restriction.

Builds normalized Gaussian kernels, low-passes images by 2-D correlation
with reflect padding, and extracts the grayscale high-frequency residual
(grayscale minus its blurred version).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import InvalidParameterError
from .raster import rgb2gray
from .validation import check_gray, check_image, check_image_batch

DEFAULT_KERNEL_SIZE = 63
KERNEL_SIZE_SWEEP = (7, 21, 35, 57, 63, 67)


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 2-D Gaussian kernel with odd square support."""

    size: int
    sigma: float
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.weights.setflags(write=False)


def gaussian_kernel(size, sigma):
    """Build a unit-sum Gaussian kernel of odd `size` and width `sigma`.

    Weights are exp(-(m^2+n^2)/(2 sigma^2)) over the centered support,
    normalized so constant images are fixed points of the blur.
    """
    if size < 1 or size % 2 == 0:
        raise InvalidParameterError(f"kernel size must be odd and >= 1, got {size}")
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    half = (size - 1) // 2
    m = np.arange(-half, half + 1, dtype=np.float64)
    sq = m[:, None] ** 2 + m[None, :] ** 2
    w = np.exp(-sq / (2.0 * sigma * sigma))
    w /= w.sum()
    return GaussianKernel(size=size, sigma=float(sigma), weights=w)


def sigma_for_size(size):
    """Default kernel width tied to support: sigma = size / 6 (covers ±3σ)."""
    return size / 6.0


def lowpass(img, kernel):
    """Blur an image by 2-D correlation with reflect padding.

    Accepts either a (H, W) grayscale array or a (H, W, C) image; the
    correlation is applied per channel. Output dtype/shape matches input.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        check_gray(arr)
        return ndimage.correlate(arr, kernel.weights, mode="reflect")
    check_image(arr)
    out = np.empty_like(arr)
    for c in range(arr.shape[2]):
        out[:, :, c] = ndimage.correlate(arr[:, :, c], kernel.weights, mode="reflect")
    return out


def high_freq(img, kernel_size=DEFAULT_KERNEL_SIZE):
    """Grayscale high-frequency residual: rgb2gray(x) - blur(rgb2gray(x)).

    Values may be negative; constant images map to exact zeros.
    """
    arr = check_image(img)
    gray = rgb2gray(arr)
    k = gaussian_kernel(kernel_size, sigma_for_size(kernel_size))
    return gray - lowpass(gray, k)


def high_freq_for_network(img, kernel_size=DEFAULT_KERNEL_SIZE):
    """High-frequency residual mapped for a 3-channel consumer.

    Shifts the zero-centered residual to mid-gray (v + 0.5, clamped to
    [0, 1]) and replicates it across 3 channels.
    """
    hf = high_freq(img, kernel_size)
    shifted = np.clip(hf + 0.5, 0.0, 1.0)
    return np.repeat(shifted[:, :, None], 3, axis=2)


class GaussianHighpass(BaseEstimator, TransformerMixin):
    """Stateless transformer: batch of color images -> high-frequency images.

    Input and output are (B, H, W, 3) arrays in [0, 1]; each image is
    replaced by its mid-gray-shifted grayscale high-frequency residual.
    """

    def __init__(self, kernel_size=DEFAULT_KERNEL_SIZE):
        self.kernel_size = kernel_size

    def fit(self, X, y=None):
        gaussian_kernel(self.kernel_size, sigma_for_size(self.kernel_size))
        return self

    def transform(self, X):
        arr = check_image_batch(X)
        return np.stack(
            [high_freq_for_network(im, self.kernel_size) for im in arr]
        )
