"""Input validation helpers shared across the package.

Images are plain numpy arrays: color images are (H, W, 3) float64 in [0, 1],
grayscale working images are (H, W) float64 and may be negative.
"""

import numpy as np

from .exceptions import InvalidInputError


def check_image(img, name="img"):
    """Validate a color image array and return it as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise InvalidInputError(
            f"{name} must have shape (H, W, 1) or (H, W, 3), got {arr.shape}"
        )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite samples")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidInputError(f"{name} samples must lie in [0, 1]")
    return arr


def check_gray(img, name="img"):
    """Validate a grayscale working array (unrestricted range) as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite samples")
    return arr


def check_image_batch(X, name="X"):
    """Validate a batch of color images (B, H, W, C) and return float64."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 4:
        raise InvalidInputError(f"{name} must have shape (B, H, W, C), got {arr.shape}")
    check_image(arr[0], name=f"{name}[0]")
    return arr
