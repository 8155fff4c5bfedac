"""Fourier-domain operator core shared by the simulator and all solvers.

Convolutions with DPC kernels are diagonal in the 2D DFT, so they are applied
as products with half-spectra from ``rfft2``. Finite-difference operators use
periodic boundaries so they are diagonalized by the same transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError

SQRT2 = np.sqrt(2.0)


def rfft2(x):
    return sfft.rfft2(x)


def irfft2(x, shape):
    """Inverse of :func:`rfft2` over the last two axes.

    Done as two 1D passes, which pocketfft runs noticeably faster than its
    multi-axis c2r path for batched input.
    """
    return sfft.irfft(sfft.ifft(x, axis=-2), n=shape[-1], axis=-1, overwrite_x=True)


def half_spectrum(values: np.ndarray) -> np.ndarray:
    """Columns of a full spectrum that ``rfft2`` keeps."""
    return values[..., : values.shape[-1] // 2 + 1]


@dataclass(frozen=True)
class DpcStack:
    """N DPC images with index-aligned transfer functions.

    Parameters
    ----------
    images : ndarray, shape (N, H, W)
    transfer_functions : ndarray, shape (N, H, W), complex
        Full unshifted spectra, one per image.
    """

    images: np.ndarray
    transfer_functions: np.ndarray

    def __post_init__(self):
        images = np.asarray(self.images, dtype=float)
        tfs = np.asarray(
            [getattr(t, "values", t) for t in self.transfer_functions], dtype=complex
        )
        if images.ndim == 2:
            images = images[None]
        if tfs.ndim == 2:
            tfs = tfs[None]
        if images.ndim != 3 or len(images) < 1:
            raise ConfigurationError("a DPC stack needs at least one 2D image")
        if images.shape != tfs.shape:
            raise ConfigurationError(
                f"images {images.shape} and transfer functions {tfs.shape} differ in shape"
            )
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "transfer_functions", tfs)

    @property
    def n(self) -> int:
        return self.images.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.images.shape[1:]

    @cached_property
    def h_half(self) -> np.ndarray:
        return half_spectrum(self.transfer_functions)

    @cached_property
    def h_half_conj(self) -> np.ndarray:
        return np.conj(self.h_half)

    @cached_property
    def data_spectra(self) -> np.ndarray:
        return rfft2(self.images)

    @cached_property
    def gram(self) -> np.ndarray:
        """Sum over axes of ``|H_n|^2`` on the half grid."""
        return np.sum(np.abs(self.h_half) ** 2, axis=0)

    @cached_property
    def backprojection(self) -> np.ndarray:
        """Spectrum of ``sum_n K_n^T s_n``."""
        return np.sum(self.h_half_conj * self.data_spectra, axis=0)

    def with_images(self, images) -> "DpcStack":
        return DpcStack(images, self.transfer_functions)

    def forward(self, phi: np.ndarray) -> np.ndarray:
        """``K_n phi`` for every axis, shape (N, H, W)."""
        return irfft2(self.h_half * rfft2(phi)[None], self.shape)

    def forward_spectrum(self, phi_hat: np.ndarray) -> np.ndarray:
        return irfft2(self.h_half * phi_hat[None], self.shape)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """``sum_n K_n^T y_n``."""
        return irfft2(np.sum(self.h_half_conj * rfft2(y), axis=0), self.shape)


def apply_transfer(image: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Convolve ``image`` with the kernel whose full spectrum is ``values``."""
    return irfft2(half_spectrum(values) * rfft2(image), image.shape)


def _fwd(x, axis, out=None):
    """Periodic forward difference ``x[i+1] - x[i]`` along ``axis``."""
    if out is None:
        out = np.empty_like(x)
    if axis == 1:
        np.subtract(x[:, 1:], x[:, :-1], out=out[:, :-1])
        np.subtract(x[:, :1], x[:, -1:], out=out[:, -1:])
    else:
        np.subtract(x[1:], x[:-1], out=out[:-1])
        np.subtract(x[:1], x[-1:], out=out[-1:])
    return out


def _bwd(x, axis, out=None):
    """Periodic backward difference ``x[i] - x[i-1]`` along ``axis``."""
    if out is None:
        out = np.empty_like(x)
    if axis == 1:
        np.subtract(x[:, 1:], x[:, :-1], out=out[:, 1:])
        np.subtract(x[:, :1], x[:, -1:], out=out[:, :1])
    else:
        np.subtract(x[1:], x[:-1], out=out[1:])
        np.subtract(x[:1], x[-1:], out=out[:1])
    return out


def hessian_apply(phi: np.ndarray) -> np.ndarray:
    """Periodic second differences stacked as ``(Dxx, Dyy, sqrt2 Dxy)``."""
    out = np.empty((3,) + phi.shape)
    dx = _fwd(phi, 1)
    dy = _fwd(phi, 0)
    _bwd(dx, 1, out=out[0])
    _bwd(dy, 0, out=out[1])
    _fwd(dx, 0, out=out[2])
    out[2] *= SQRT2
    return out


def hessian_adjoint(g: np.ndarray) -> np.ndarray:
    """Exact adjoint of :func:`hessian_apply`."""
    out = _fwd(_bwd(g[0], 1), 1)
    out += _fwd(_bwd(g[1], 0), 0)
    out += SQRT2 * _bwd(_bwd(g[2], 0), 1)
    return out


def gradient_apply(phi: np.ndarray) -> np.ndarray:
    """Periodic forward differences ``(Dx, Dy)``."""
    out = np.empty((2,) + phi.shape)
    _fwd(phi, 1, out=out[0])
    _fwd(phi, 0, out=out[1])
    return out


def gradient_adjoint(g: np.ndarray) -> np.ndarray:
    return -(_bwd(g[0], 1) + _bwd(g[1], 0))


def _phases(shape):
    h, w = shape
    wx = np.exp(2j * np.pi * sfft.rfftfreq(w))[None, :]
    wy = np.exp(2j * np.pi * sfft.fftfreq(h))[:, None]
    return wx, wy


def hessian_spectra(shape: tuple[int, int]) -> np.ndarray:
    """Half-grid spectra of the three Hessian stencils, shape (3, H, W//2+1)."""
    wx, wy = _phases(shape)
    ones = np.ones((shape[0], shape[1] // 2 + 1))
    dxx = (wx + np.conj(wx) - 2) * ones
    dyy = (wy + np.conj(wy) - 2) * ones
    dxy = SQRT2 * (wx - 1) * (wy - 1)
    return np.stack([dxx, dyy, dxy])


def gradient_spectra(shape: tuple[int, int]) -> np.ndarray:
    wx, wy = _phases(shape)
    ones = np.ones((shape[0], shape[1] // 2 + 1))
    return np.stack([(wx - 1) * ones, (wy - 1) * ones])


def spectral_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Element-wise ``num / den`` with ``0/0 := 0``.

    A zero denominator with a non-zero numerator is left to the caller to
    detect; such samples are returned as 0 and flagged by ``den == 0``.
    """
    out = np.zeros_like(num)
    nz = den != 0
    out[nz] = num[nz] / den[nz]
    return out
