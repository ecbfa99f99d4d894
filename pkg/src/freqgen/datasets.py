"""Procedural multi-domain shape dataset.

Three foreground shapes (disk, square, triangle) rendered over four kinds
of background: solid, vertical gradient, high-frequency noise texture, and
horizontal stripes. Each (domain, class) pair owns a distinct background
brightness level, so brightness predicts the class perfectly within every
domain; the twelve levels interleave across domains, so the brightness ->
class relation learned on any three domains carries no information about
the fourth. Foreground colors are random hues with a guaranteed contrast
against the background, and shape geometry is domain-invariant, so edges
are the only transferable class signal.
"""

from dataclasses import dataclass

import numpy as np

IMAGE_SIZE = 32
N_CLASSES = 3
N_DOMAINS = 4
CLASS_NAMES = ("disk", "square", "triangle")
DOMAIN_NAMES = ("solid", "gradient", "noise", "stripes")

# Twelve distinct background levels; _LEVEL_INDEX[domain][class] picks one.
# Rows keep in-domain levels far apart (easy shortcut) while the global
# level -> class pattern is scrambled (useless across domains).
_BRIGHTNESS_LEVELS = np.linspace(0.08, 0.55, 12)
_LEVEL_INDEX = ((2, 7, 10), (5, 11, 0), (8, 3, 6), (1, 9, 4))


@dataclass
class DomainSample:
    image: np.ndarray  # (32, 32, 3) in [0, 1]
    label: int
    domain: int


def background_level(label, domain):
    """Spurious background brightness for a (class, domain) pair."""
    return float(_BRIGHTNESS_LEVELS[_LEVEL_INDEX[domain][label]])


def _shape_mask(label, cy, cx, r, size=IMAGE_SIZE):
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    if label == 0:  # disk
        return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    if label == 1:  # square
        s = 0.85 * r
        return (np.abs(yy - cy) <= s) & (np.abs(xx - cx) <= s)
    # upward triangle inscribed in a 2r-tall band
    top = cy - r
    return (yy >= top) & (yy <= cy + r) & (np.abs(xx - cx) <= 0.55 * (yy - top))


def _background(domain, level, rng, size=IMAGE_SIZE):
    if domain == 1:  # mild vertical gradient around the level
        ramp = level + np.linspace(-0.08, 0.08, size)[:, None, None]
        return np.clip(np.broadcast_to(ramp, (size, size, 3)), 0.0, 1.0).copy()
    if domain == 2:  # per-pixel noise texture around the level
        tex = level + rng.uniform(-0.05, 0.05, size=(size, size, 1))
        return np.clip(np.broadcast_to(tex, (size, size, 3)), 0.0, 1.0).copy()
    if domain == 3:  # horizontal stripes
        phase = rng.integers(4)
        rows = level + np.where((np.arange(size) + phase) // 2 % 2 == 0, 0.06, -0.06)
        return np.clip(
            np.broadcast_to(rows[:, None, None], (size, size, 3)), 0.0, 1.0
        ).copy()
    return np.full((size, size, 3), level)  # solid


def render_sample(label, domain, rng, foreground_only=False):
    """Render one 32x32x3 sample.

    `foreground_only` replaces the domain background with neutral mid-gray
    (used to check that the cross-domain deficit comes from backgrounds).
    """
    level = background_level(label, domain)
    img = _background(domain, level, rng)
    cy = 16.0 + rng.uniform(-2.5, 2.5)
    cx = 16.0 + rng.uniform(-2.5, 2.5)
    r = 8.0 + rng.uniform(-1.5, 1.5)
    # random hue, always brighter than the background so the figure-ground
    # contrast has a consistent sign the network can rely on
    fg_gray = np.clip(level + rng.uniform(0.3, 0.45), 0.0, 1.0)
    fg = np.clip(fg_gray + rng.uniform(-0.1, 0.1, size=3), 0.0, 1.0)
    mask = _shape_mask(label, cy, cx, r)
    if foreground_only:
        img = np.full((IMAGE_SIZE, IMAGE_SIZE, 3), 0.5)
    img[mask] = fg
    return np.clip(img, 0.0, 1.0)


def synth_dataset(seed, n_per_domain_class, foreground_only=False):
    """Deterministic dataset: N_DOMAINS x N_CLASSES x n samples."""
    samples = []
    for domain in range(N_DOMAINS):
        for label in range(N_CLASSES):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(domain, label))
            )
            for _ in range(n_per_domain_class):
                samples.append(DomainSample(
                    render_sample(label, domain, rng, foreground_only),
                    label, domain,
                ))
    return samples


def dataset_arrays(samples):
    """Stack a sample list into (X, y, domains) arrays."""
    X = np.stack([s.image for s in samples])
    y = np.array([s.label for s in samples])
    d = np.array([s.domain for s in samples])
    return X, y, d
