"""Closed-form minimizers of the splitting sub-problems."""

import numpy as np


def soft_threshold(x: np.ndarray, threshold: float) -> np.ndarray:
    """``sign(x) * max(|x| - t, 0)`` element-wise."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return x - np.clip(x, -threshold, threshold)


def hqs_hard_threshold(fields: np.ndarray, threshold: float) -> np.ndarray:
    """Joint hard threshold over the leading axis.

    A pixel keeps all N values when ``sum_n fields[n]**2 > threshold``, and is
    zeroed in every field otherwise.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    energy = np.sum(fields**2, axis=0)
    return np.where(energy > threshold, fields, 0.0)
