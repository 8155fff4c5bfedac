"""Adaptive noise-level sensor and the penalty weights derived from it."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

# sign pattern kept as published; it is not the textbook Immerkaer mask
LAPLACIAN = np.array(
    [
        [-1.0, 2.0, -1.0],
        [-2.0, 4.0, -2.0],
        [-1.0, 2.0, -1.0],
    ]
)
SCALE = np.sqrt(np.pi / 2.0) / 20.0


@dataclass(frozen=True)
class NoiseEstimate:
    A: float
    per_image: tuple[float, ...]


def _images(stack) -> np.ndarray:
    images = np.asarray(getattr(stack, "images", stack), dtype=float)
    if images.ndim == 2:
        images = images[None]
    return images


def estimate_noise(stack) -> NoiseEstimate:
    """Mean absolute response to the 3x3 mask, scaled to a noise level ``A``.

    ``stack`` may be a :class:`~sparsedpc.operators.DpcStack`, a single image
    or an (N, H, W) array. The mask is applied with zero padding and every one
    of the W*H outputs enters the average.
    """
    per_image = []
    for img in _images(stack):
        response = ndimage.convolve(img, LAPLACIAN, mode="constant", cval=0.0)
        per_image.append(SCALE * float(np.mean(np.abs(response))))
    return NoiseEstimate(float(np.mean(per_image)), tuple(per_image))


def auto_params(estimate: NoiseEstimate | float, beta: float | None = None) -> tuple[float, float]:
    """Penalty weights ``alpha = A`` and ``beta = A / 2`` (or a manual ``beta``)."""
    a = float(getattr(estimate, "A", estimate))
    if a == 0:
        warnings.warn(
            "estimated noise level is zero; regularization is disabled",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0, 0.0 if beta is None else float(beta)
    return a, a / 2.0 if beta is None else float(beta)
