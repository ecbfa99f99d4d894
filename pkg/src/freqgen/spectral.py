"""Two-step high-pass filter in the Fourier domain.

Per channel: forward DFT, center the spectrum, zero bins inside a diameter
`d` around DC, scale amplitude and phase by (alpha, beta), recombine,
uncenter, inverse DFT, take the real part and clamp to [0, 1].
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state

from .exceptions import InvalidParameterError, InvalidStateError
from .validation import check_gray, check_image, check_image_batch

# Severity diameters are fractions of min(H, W); at 224x224 they equal
# {2.24, 4.48, 6.72, 8.96, 11.2}. d = 0 is the all-pass identity.
SEVERITY_FRACTIONS = (0.01, 0.02, 0.03, 0.04, 0.05)
SCALING_SET = (0.6, 0.7, 0.8, 0.9, 1.0)
REFERENCE_SIZE = 224

NATURAL = "natural"
CENTERED = "centered"


@dataclass
class Spectrum:
    """Complex frequency grid for one channel with a layout flag."""

    coeffs: np.ndarray
    layout: str = NATURAL


@dataclass
class AmpPhase:
    """Polar decomposition of a spectrum; layout is inherited."""

    amplitude: np.ndarray
    phase: np.ndarray
    layout: str = NATURAL


@dataclass(frozen=True)
class AugmentParams:
    """One draw of the augmentation knobs: diameter and scaling strengths."""

    d: float
    alpha: float
    beta: float


def dft2(channel):
    """Forward 2-D DFT of a real grid (unnormalized double-sum convention)."""
    arr = check_gray(channel, name="channel")
    return Spectrum(coeffs=np.fft.fft2(arr), layout=NATURAL)


def idft2(spec):
    """Inverse 2-D DFT; returns the real part of the reconstruction."""
    if spec.layout != NATURAL:
        raise InvalidStateError("idft2 requires a natural-layout spectrum")
    return np.real(np.fft.ifft2(spec.coeffs))


def center(spec):
    """Swap quadrants so DC sits at (H//2, W//2)."""
    if spec.layout != NATURAL:
        raise InvalidStateError("center() requires natural layout")
    return Spectrum(coeffs=np.fft.fftshift(spec.coeffs), layout=CENTERED)


def uncenter(spec):
    """Inverse of center(); restores DC to (0, 0)."""
    if spec.layout != CENTERED:
        raise InvalidStateError("uncenter() requires centered layout")
    return Spectrum(coeffs=np.fft.ifftshift(spec.coeffs), layout=NATURAL)


def amp_phase(spec):
    """Split a spectrum into amplitude sqrt(R^2+I^2) and phase atan2(I, R)."""
    return AmpPhase(
        amplitude=np.abs(spec.coeffs),
        phase=np.angle(spec.coeffs),
        layout=spec.layout,
    )


def recombine(ap):
    """Rebuild the complex spectrum as amplitude * exp(+j * phase)."""
    return Spectrum(coeffs=ap.amplitude * np.exp(1j * ap.phase), layout=ap.layout)


def scale_amp_phase(ap, alpha, beta):
    """Scale amplitude by alpha and phase by beta, both in (0, 1]."""
    if not (0.0 < alpha <= 1.0) or not (0.0 < beta <= 1.0):
        raise InvalidParameterError(
            f"alpha and beta must lie in (0, 1], got alpha={alpha}, beta={beta}"
        )
    return AmpPhase(
        amplitude=alpha * ap.amplitude, phase=beta * ap.phase, layout=ap.layout
    )


def highpass_mask(height, width, d):
    """High-pass mask on the centered spectrum: (1 + sgn(dist - d)) / 2.

    Bins farther than `d` from the center (H//2, W//2) pass (value 1),
    closer bins are blocked (0), bins at distance exactly `d` get 1/2.
    d = 0 is the all-pass identity.
    """
    if d < 0:
        raise InvalidParameterError(f"diameter d must be >= 0, got {d}")
    if d == 0:
        return np.ones((height, width))
    cu, cv = height // 2, width // 2
    u = np.arange(height)[:, None] - cu
    v = np.arange(width)[None, :] - cv
    dist = np.sqrt(u.astype(np.float64) ** 2 + v.astype(np.float64) ** 2)
    return 0.5 * (1.0 + np.sign(dist - d))


def severity_diameters(height=REFERENCE_SIZE, width=REFERENCE_SIZE):
    """The five nonzero severity diameters, scaled to the image size."""
    scale = min(height, width)
    return tuple(scale * f for f in SEVERITY_FRACTIONS)


def sample_params(rng, height=REFERENCE_SIZE, width=REFERENCE_SIZE):
    """Draw AugmentParams: d uniform over the five severities, alpha and
    beta independently uniform over the scaling set."""
    diameters = severity_diameters(height, width)
    return AugmentParams(
        d=float(diameters[rng.integers(len(diameters))]),
        alpha=float(SCALING_SET[rng.integers(len(SCALING_SET))]),
        beta=float(SCALING_SET[rng.integers(len(SCALING_SET))]),
    )


def _filter_channel(channel, params, clamp=True):
    spec = center(dft2(channel))
    spec.coeffs = spec.coeffs * highpass_mask(*channel.shape, params.d)
    ap = scale_amp_phase(amp_phase(spec), params.alpha, params.beta)
    out = idft2(uncenter(recombine(ap)))
    return np.clip(out, 0.0, 1.0) if clamp else out


def two_step_highpass(img, params, clamp=True):
    """Apply the two-step high-pass filter to each channel independently.

    `clamp=False` skips the final [0, 1] clamp (used by energy tests).
    """
    arr = check_image(img)
    out = np.empty_like(arr)
    for c in range(arr.shape[2]):
        out[:, :, c] = _filter_channel(arr[:, :, c], params, clamp=clamp)
    return out


def two_step_highpass_batch(images, params_list, clamp=True):
    """Vectorized batch version of two_step_highpass.

    `params_list` holds one AugmentParams per image; agrees with the
    per-image path to working precision.
    """
    arr = check_image_batch(images)
    b, h, w, _ = arr.shape
    if len(params_list) != b:
        raise InvalidParameterError(
            f"need one AugmentParams per image: {len(params_list)} != {b}"
        )
    masks = np.stack([highpass_mask(h, w, p.d) for p in params_list])[:, :, :, None]
    alphas = np.array([p.alpha for p in params_list])[:, None, None, None]
    betas = np.array([p.beta for p in params_list])[:, None, None, None]
    spec = np.fft.fftshift(np.fft.fft2(arr, axes=(1, 2)), axes=(1, 2)) * masks
    rec = alphas * np.abs(spec) * np.exp(1j * betas * np.angle(spec))
    out = np.real(np.fft.ifft2(np.fft.ifftshift(rec, axes=(1, 2)), axes=(1, 2)))
    return np.clip(out, 0.0, 1.0) if clamp else out


class TwoStepHighpass(BaseEstimator, TransformerMixin):
    """Transformer applying the two-step high-pass filter to image batches.

    With explicit (d, alpha, beta) every image gets the same parameters;
    with any of them None, per-image parameters are drawn from the
    severity/scaling sets using `random_state`.
    """

    def __init__(self, d=None, alpha=None, beta=None, random_state=None):
        self.d = d
        self.alpha = alpha
        self.beta = beta
        self.random_state = random_state

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        arr = check_image_batch(X)
        fixed = self.d is not None and self.alpha is not None and self.beta is not None
        rng = None
        if not fixed:
            seed = check_random_state(self.random_state).randint(2**31)
            rng = np.random.default_rng(seed)
        out = np.empty_like(arr)
        for i, im in enumerate(arr):
            if fixed:
                p = AugmentParams(d=self.d, alpha=self.alpha, beta=self.beta)
            else:
                p = sample_params(rng, im.shape[0], im.shape[1])
                p = AugmentParams(
                    d=self.d if self.d is not None else p.d,
                    alpha=self.alpha if self.alpha is not None else p.alpha,
                    beta=self.beta if self.beta is not None else p.beta,
                )
            out[i] = two_step_highpass(im, p)
        return out
