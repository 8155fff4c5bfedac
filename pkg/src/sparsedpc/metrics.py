"""Reconstruction quality and sparsity statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LSNR_CAP_DB = 300.0
DEFAULT_REL_EPS = 1e-3


@dataclass(frozen=True)
class LsnrResult:
    lsnr_db: float
    offset: float


@dataclass(frozen=True)
class SparsityReport:
    epsilon: np.ndarray
    counts: np.ndarray
    fractions: np.ndarray
    bin_edges: np.ndarray
    masses: np.ndarray
    cdf_x: np.ndarray
    cdf: np.ndarray

    def cdf_at(self, x) -> np.ndarray:
        """Empirical CDF of the nonzero fractions evaluated at ``x``."""
        return np.searchsorted(np.sort(self.fractions), x, side="right") / len(self.fractions)


def lsnr(truth: np.ndarray, recon: np.ndarray) -> LsnrResult:
    """SNR in dB after removing the best constant offset between the maps.

    The optimal offset ``b = mean(truth - recon)``; a vanishing residual
    reports :data:`LSNR_CAP_DB`.
    """
    truth = np.asarray(truth, dtype=float)
    recon = np.asarray(recon, dtype=float)
    if truth.shape != recon.shape:
        raise ValueError(f"shape mismatch {truth.shape} vs {recon.shape}")
    signal = float(np.sum(truth**2))
    if signal == 0:
        raise ValueError("LSNR is undefined for an all-zero reference")
    diff = truth - recon
    b = float(np.mean(diff))
    residual = float(np.sum((diff - b) ** 2))
    # residual at rounding level of the signal counts as exact
    if residual <= signal * 10.0 ** (-LSNR_CAP_DB / 10.0):
        return LsnrResult(LSNR_CAP_DB, b)
    return LsnrResult(10.0 * np.log10(signal / residual), b)


def default_epsilon(image: np.ndarray) -> float:
    return DEFAULT_REL_EPS * float(np.max(np.abs(image))) if np.size(image) else 0.0


def l0_count(image: np.ndarray, epsilon: float | None = None) -> int:
    """Number of entries with magnitude above ``epsilon`` (default 1e-3 of the peak)."""
    image = np.asarray(image)
    if epsilon is None:
        epsilon = default_epsilon(image)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return int(np.count_nonzero(np.abs(image) > epsilon))


def sparsity_stats(images, epsilon: float | None = None, bins=20) -> SparsityReport:
    """Per-image L0 counts with a histogram and empirical CDF of nonzero fractions.

    Fractions lie in [0, 1], so the default integer ``bins`` gives edges that
    are shared between cohorts.
    """
    images = [np.asarray(im) for im in images]
    if len(images) < 2:
        raise ValueError("sparsity statistics need at least two images")
    eps = np.array([default_epsilon(im) if epsilon is None else epsilon for im in images])
    counts = np.array([l0_count(im, e) for im, e in zip(images, eps)])
    fractions = counts / np.array([im.size for im in images])
    if np.isscalar(bins):
        edges = np.linspace(0.0, 1.0, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    masses, edges = np.histogram(fractions, bins=edges)
    cdf_x = np.sort(fractions)
    cdf = np.arange(1, len(cdf_x) + 1) / len(cdf_x)
    return SparsityReport(eps, counts, fractions, edges, masses, cdf_x, cdf)
