"""Synthetic phase targets used as ground truth in simulations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError

KINDS = ("siemens-star", "binary-blobs", "bar-target", "smooth-bumps", "text-mask")


@dataclass(frozen=True)
class PhantomSpec:
    kind: str = "siemens-star"
    size: int = 600
    phase_range: tuple[float, float] = (0.0, 1.0)
    seed: int = 0
    blur: float = 0.0
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lo, hi = self.phase_range
        if hi < lo:
            raise ConfigurationError(f"phase range upper bound {hi} is below lower bound {lo}")
        if self.blur < 0:
            raise ConfigurationError("blur must be non-negative")
        if self.size < 8:
            raise ConfigurationError("phantom size must be at least 8")

    @classmethod
    def from_dict(cls, d: dict) -> "PhantomSpec":
        d = dict(d)
        if "phase_range" in d:
            d["phase_range"] = tuple(d["phase_range"])
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "size": self.size,
            "phase_range": list(self.phase_range),
            "seed": self.seed,
            "blur": self.blur,
            "params": dict(self.params),
        }


def _polar(n):
    c = (n - 1) / 2.0
    y, x = np.mgrid[0:n, 0:n] - c
    return np.hypot(x, y) / (n / 2.0), np.arctan2(y, x)


def _siemens_star(n, rng, spokes=24, radius=0.85):
    r, theta = _polar(n)
    return ((np.sin(spokes * theta) > 0) & (r < radius)).astype(float)


def _binary_blobs(n, rng, blob_fraction=0.06, volume_fraction=0.35):
    sigma = blob_fraction * n
    count = max(1, int((1.0 / blob_fraction) ** 2))
    field_ = np.zeros((n, n))
    idx = rng.integers(0, n, size=(2, count))
    field_[idx[0], idx[1]] = 1.0
    field_ = ndimage.gaussian_filter(field_, sigma, mode="wrap")
    return (field_ > np.quantile(field_, 1.0 - volume_fraction)).astype(float)


def _bar_target(n, rng):
    img = np.zeros((n, n))
    margin = n // 12
    widths = [max(1, round(n * f)) for f in (0.04, 0.03, 0.02, 0.015, 0.01)]
    x = margin
    for i, w in enumerate(widths):
        top = margin if i % 2 == 0 else n // 2 + margin // 2
        height = n // 2 - margin
        # three horizontal bars above three vertical bars per group
        for b in range(3):
            x0 = x + 2 * b * w
            img[top : top + height // 2 - w, x0 : x0 + w] = 1.0
        for b in range(3):
            y0 = top + height // 2 + 2 * b * w
            img[y0 : y0 + w, x : x + 5 * w] = 1.0
        x += 6 * w + margin // 2
    return img


def _smooth_bumps(n, rng, count=40, width=(0.02, 0.08)):
    y, x = np.mgrid[0:n, 0:n].astype(float)
    img = np.zeros((n, n))
    centers = rng.uniform(0.1 * n, 0.9 * n, size=(count, 2))
    sigmas = rng.uniform(width[0] * n, width[1] * n, size=count)
    amps = rng.uniform(0.3, 1.0, size=count)
    for (cy, cx), s, a in zip(centers, sigmas, amps):
        img += a * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s))
    return img


def _text_mask(n, rng, text="DPC\nDSP"):
    from PIL import Image, ImageDraw, ImageFont

    canvas = Image.new("L", (64, 40), 0)
    ImageDraw.Draw(canvas).multiline_text(
        (4, 2), text, fill=255, font=ImageFont.load_default(), spacing=4
    )
    small = np.asarray(canvas, dtype=float) / 255.0
    rows, cols = np.nonzero(small > 0.5)
    small = small[rows.min() : rows.max() + 1, cols.min() : cols.max() + 1]
    scale = int(0.8 * n / max(small.shape))
    big = np.kron(small > 0.5, np.ones((scale, scale)))
    img = np.zeros((n, n))
    oy = (n - big.shape[0]) // 2
    ox = (n - big.shape[1]) // 2
    img[oy : oy + big.shape[0], ox : ox + big.shape[1]] = big
    return img


_GENERATORS = {
    "siemens-star": _siemens_star,
    "binary-blobs": _binary_blobs,
    "bar-target": _bar_target,
    "smooth-bumps": _smooth_bumps,
    "text-mask": _text_mask,
}


def generate_phantom(spec: PhantomSpec) -> np.ndarray:
    """Render the phase map (radians) described by ``spec``.

    Binary kinds take exactly the two values of ``phase_range``; smooth kinds
    are rescaled affinely onto it. A positive ``blur`` (Gaussian sigma in
    pixels) band-limits the target before rescaling.
    """
    if spec.kind not in _GENERATORS:
        raise ConfigurationError(f"unknown phantom kind {spec.kind!r}; choose from {KINDS}")
    lo, hi = spec.phase_range
    rng = np.random.default_rng(spec.seed)
    base = _GENERATORS[spec.kind](spec.size, rng, **spec.params)
    if spec.blur > 0:
        base = ndimage.gaussian_filter(base, spec.blur, mode="nearest")
    span = base.max() - base.min()
    if hi == lo or span == 0:
        return np.full((spec.size, spec.size), float(lo))
    unit = (base - base.min()) / span
    return lo + (hi - lo) * unit
