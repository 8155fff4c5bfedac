"""Linear DPC forward model, raw oblique-illumination images and noise."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivisionDegenerateError
from .operators import DpcStack, apply_transfer

NOISE_MODES = ("range-fraction", "snr-db")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise.

    ``range-fraction`` draws with ``sigma = level * (max - min)`` of the image,
    ``snr-db`` with ``sigma = rms(image - mean) / 10**(level / 20)``.
    """

    mode: str = "snr-db"
    level: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in NOISE_MODES:
            raise ConfigurationError(f"unknown noise mode {self.mode!r}")
        if not np.isfinite(self.level):
            raise ConfigurationError("noise level must be finite")
        if self.mode == "range-fraction" and self.level < 0:
            raise ConfigurationError("range fraction must be non-negative")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "level": self.level, "seed": self.seed}


@dataclass(frozen=True)
class RawImagePair:
    i_pos: np.ndarray
    i_neg: np.ndarray
    axis: str = ""
    clamped: int = 0


def _check_shape(phase, values):
    if phase.shape != values.shape:
        raise ConfigurationError(
            f"phase {phase.shape} and transfer function {values.shape} differ in shape"
        )


def simulate_dpc(phase: np.ndarray, tf) -> np.ndarray:
    """DPC image ``IFFT[H * FFT[phase]]`` for one axis."""
    phase = np.asarray(phase, dtype=float)
    values = np.asarray(getattr(tf, "values", tf))
    _check_shape(phase, values)
    return apply_transfer(phase, values)


def simulate_stack(phase: np.ndarray, tfs) -> DpcStack:
    """Noise-free DPC images for every transfer function in ``tfs``."""
    images = [simulate_dpc(phase, tf) for tf in tfs]
    return DpcStack(np.stack(images), tfs)


def simulate_raw_pair(phase: np.ndarray, tf_pos, tf_neg) -> RawImagePair:
    """Linearized intensities ``1 + h * phase`` under each single-sided source.

    Negative intensities, which only occur when the phase is too strong for
    the weak-object model, are clamped to zero and counted.
    """
    phase = np.asarray(phase, dtype=float)
    i_pos = 1.0 + simulate_dpc(phase, tf_pos)
    i_neg = 1.0 + simulate_dpc(phase, tf_neg)
    clamped = int(np.count_nonzero(i_pos < 0) + np.count_nonzero(i_neg < 0))
    if clamped:
        warnings.warn(
            f"{clamped} raw pixels went negative and were clamped; "
            "the phase violates the weak-object assumption",
            RuntimeWarning,
            stacklevel=2,
        )
        i_pos = np.maximum(i_pos, 0.0)
        i_neg = np.maximum(i_neg, 0.0)
    return RawImagePair(i_pos, i_neg, getattr(tf_pos, "axis", ""), clamped)


def compose_dpc(pair: RawImagePair) -> np.ndarray:
    """Normalized difference ``(I_pos - I_neg) / (I_pos + I_neg)``."""
    total = pair.i_pos + pair.i_neg
    bad = np.count_nonzero(total == 0)
    if bad:
        raise DivisionDegenerateError(f"{bad} pixels have zero total intensity")
    return (pair.i_pos - pair.i_neg) / total


def noise_sigma(image: np.ndarray, spec: NoiseSpec) -> float:
    if spec.mode == "range-fraction":
        return spec.level * float(image.max() - image.min())
    rms = float(np.sqrt(np.mean((image - image.mean()) ** 2)))
    return rms / 10.0 ** (spec.level / 20.0)


def add_noise(image: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Add white Gaussian noise; a constant image in SNR mode stays unchanged."""
    image = np.asarray(image, dtype=float)
    if not np.all(np.isfinite(image)):
        raise ConfigurationError("image contains non-finite values")
    if spec.mode == "range-fraction" and spec.level == 0:
        return image.copy()
    sigma = noise_sigma(image, spec)
    if sigma == 0:
        return image.copy()
    rng = np.random.default_rng(spec.seed)
    return image + rng.normal(0.0, sigma, size=image.shape)


def add_stack_noise(stack: DpcStack, spec: NoiseSpec) -> DpcStack:
    """Noise each image of a stack independently with seeds derived from ``spec.seed``."""
    seeds = np.random.SeedSequence(spec.seed).spawn(stack.n)
    noisy = []
    for image, ss in zip(stack.images, seeds):
        sub = NoiseSpec(spec.mode, spec.level, int(ss.generate_state(1, np.uint64)[0]))
        noisy.append(add_noise(image, sub))
    return stack.with_images(np.stack(noisy))


def add_pair_noise(pair: RawImagePair, spec: NoiseSpec) -> RawImagePair:
    """Independent noise on both raw images, for sparsity studies on raw data."""
    seeds = np.random.SeedSequence(spec.seed).spawn(2)
    out = []
    for image, ss in zip((pair.i_pos, pair.i_neg), seeds):
        sub = NoiseSpec(spec.mode, spec.level, int(ss.generate_state(1, np.uint64)[0]))
        out.append(add_noise(image, sub))
    return RawImagePair(out[0], out[1], pair.axis, pair.clamped)
