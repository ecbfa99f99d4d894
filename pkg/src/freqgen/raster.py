"""Image representation and lossless 8-bit codec support.

Samples live in [0, 1] as float64; quantization to 8 bits happens only at
the codec boundary (write: round(v*255), read: v/255). PNG is handled by
Pillow; binary portable anymaps (P5/P6, maxval 255) are decoded here so
golden fixtures need no third-party decoder.
"""

import os

import numpy as np

from .exceptions import DecodeError, InvalidInputError, UnsupportedFormatError
from .validation import check_image

# BT.601 luma weights
GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])


def rgb2gray(img):
    """Convert a (H, W, 3) color image to a (H, W) grayscale array.

    Uses the BT.601 luma weights 0.299/0.587/0.114.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"rgb2gray expects (H, W, 3), got {arr.shape}")
    return arr @ GRAY_WEIGHTS


def quantize(img):
    """Map [0,1] samples to uint8 via round(v*255), clamped."""
    arr = np.asarray(img, dtype=np.float64)
    return np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)


def dequantize(arr8):
    """Map uint8 samples back to [0,1] float64."""
    return np.asarray(arr8, dtype=np.float64) / 255.0


def read_image(path):
    """Read an 8-bit PNG/PPM/PGM image into a float64 array in [0, 1].

    Returns (H, W, 3) for color files and (H, W, 1) for grayscale files.
    """
    ext = os.path.splitext(path)[1].lower()
    if ext in (".ppm", ".pgm", ".pnm"):
        return _read_pnm(path)
    return _read_png(path)


def write_image(img, path):
    """Write a [0,1] image to an 8-bit PNG or binary portable anymap.

    The format is chosen by extension; (H, W, 1) arrays are written as
    grayscale, (H, W, 3) as RGB.
    """
    arr = check_image(img, name="img")
    ext = os.path.splitext(path)[1].lower()
    if ext in (".ppm", ".pgm", ".pnm"):
        _write_pnm(arr, path)
    elif ext == ".png":
        _write_png(arr, path)
    else:
        raise UnsupportedFormatError(f"unsupported image extension: {ext!r}")


def _read_png(path):
    from PIL import Image as PILImage, UnidentifiedImageError

    try:
        with PILImage.open(path) as im:
            if im.mode in ("I", "I;16", "F"):
                raise UnsupportedFormatError(
                    f"{path}: only 8-bit images are supported (mode {im.mode})"
                )
            if im.mode == "L":
                arr8 = np.asarray(im, dtype=np.uint8)[:, :, None]
            else:
                arr8 = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except UnidentifiedImageError as e:
        raise DecodeError(f"{path}: not a decodable image") from e
    return dequantize(arr8)


def _write_png(arr, path):
    from PIL import Image as PILImage

    arr8 = quantize(arr)
    if arr8.shape[2] == 1:
        im = PILImage.fromarray(arr8[:, :, 0], mode="L")
    else:
        im = PILImage.fromarray(arr8, mode="RGB")
    im.save(path, format="PNG")


def _read_pnm(path):
    with open(path, "rb") as f:
        data = f.read()
    try:
        magic, fields, offset = _parse_pnm_header(data)
    except (ValueError, IndexError) as e:
        raise DecodeError(f"{path}: malformed portable anymap header") from e
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedFormatError(f"{path}: only maxval 255 supported, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    n = width * height * channels
    raw = data[offset : offset + n]
    if len(raw) < n:
        raise DecodeError(f"{path}: truncated pixel data")
    arr8 = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, channels)
    return dequantize(arr8)


def _parse_pnm_header(data):
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise DecodeError(f"unsupported anymap magic {magic!r}")
    # Header tokens separated by whitespace; '#' starts a comment to EOL.
    fields = []
    i = 2
    while len(fields) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        fields.append(int(data[i:j]))
        i = j
    i += 1  # single whitespace byte after maxval
    return magic, tuple(fields), i


def _write_pnm(arr, path):
    arr8 = quantize(arr)
    channels = arr8.shape[2]
    magic = b"P6" if channels == 3 else b"P5"
    header = b"%s\n%d %d\n255\n" % (magic, arr8.shape[1], arr8.shape[0])
    with open(path, "wb") as f:
        f.write(header)
        f.write(arr8.tobytes())
