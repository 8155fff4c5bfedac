"""Pupils, illumination sources and DPC phase transfer functions.

All spectra live in the unshifted FFT layout: DC sits at index ``[0, 0]`` and
the sample mirrored through the origin of index ``(i, j)`` is
``(-i mod H, -j mod W)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import (
    ConfigurationError,
    DegenerateOpticsError,
    SymmetryViolationError,
)

MIN_SIZE = 8
SYMMETRY_RTOL = 1e-10

AXES = {
    "lr": ("right", "left"),
    "tb": ("top", "bottom"),
}
_DIRECTION_ANGLE = {"right": 0.0, "top": 90.0, "left": 180.0, "bottom": 270.0}
GEOMETRIES = ("half-disc", "half-annulus")


@dataclass(frozen=True)
class OpticalConfig:
    """Imaging geometry of a DPC microscope.

    Parameters
    ----------
    wavelength_um : float
        Illumination wavelength in micrometers.
    na : float
        Objective numerical aperture, in (0, 1).
    magnification : float
        Lateral magnification from object to camera.
    pixel_size_um : float
        Camera pixel pitch in micrometers.
    width, height : int
        Image size in pixels.
    """

    wavelength_um: float = 0.530
    na: float = 0.3
    magnification: float = 10.0
    pixel_size_um: float = 3.46
    width: int = 600
    height: int = 600

    def __post_init__(self):
        if self.width < MIN_SIZE or self.height < MIN_SIZE:
            raise ConfigurationError(
                f"image must be at least {MIN_SIZE}x{MIN_SIZE}, "
                f"got {self.width}x{self.height}"
            )
        if not 0.0 < self.na < 1.0:
            raise ConfigurationError(f"numerical aperture must be in (0, 1), got {self.na}")
        for name in ("wavelength_um", "magnification", "pixel_size_um"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if not self.cutoff < self.nyquist:
            raise ConfigurationError(
                f"pupil cutoff {self.cutoff:.4f} cyc/um is not inside the "
                f"Nyquist bound {self.nyquist:.4f} cyc/um"
            )

    @property
    def sampling_um(self) -> float:
        """Object-plane pixel pitch."""
        return self.pixel_size_um / self.magnification

    @property
    def cutoff(self) -> float:
        """Coherent pupil cutoff NA/wavelength in cycles per micrometer."""
        return self.na / self.wavelength_um

    @property
    def nyquist(self) -> float:
        return 0.5 / self.sampling_um

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @classmethod
    def from_dict(cls, d: dict) -> "OpticalConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown optics fields: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True)
class FrequencyGrid:
    """Spatial-frequency coordinates (cycles/um) in unshifted FFT order."""

    kx: np.ndarray
    ky: np.ndarray
    dk_x: float
    dk_y: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.kx.shape

    @property
    def k2(self) -> np.ndarray:
        return self.kx**2 + self.ky**2

    @property
    def k(self) -> np.ndarray:
        return np.sqrt(self.k2)


@dataclass(frozen=True)
class SourceMask:
    values: np.ndarray
    direction: str
    geometry: str = "half-disc"
    inner_factor: float = 0.0


@dataclass(frozen=True)
class TransferFunction:
    values: np.ndarray
    axis: str = ""
    background: float = field(default=1.0, compare=False)


@dataclass(frozen=True)
class ConvolutionKernel:
    values: np.ndarray
    axis: str = ""


def make_frequency_grid(config: OpticalConfig) -> FrequencyGrid:
    """Build the DFT frequency grid of an image described by ``config``."""
    if config.width < MIN_SIZE or config.height < MIN_SIZE:
        raise ConfigurationError("image dimensions must be at least 8")
    d = config.sampling_um
    fx = sfft.fftfreq(config.width, d=d)
    fy = sfft.fftfreq(config.height, d=d)
    ky, kx = np.meshgrid(fy, fx, indexing="ij")
    return FrequencyGrid(
        kx=kx, ky=ky, dk_x=1.0 / (config.width * d), dk_y=1.0 / (config.height * d)
    )


def mirror(a: np.ndarray) -> np.ndarray:
    """Return ``b`` with ``b[k] = a[-k]`` on the periodic FFT grid."""
    return np.roll(a[::-1, ::-1], 1, axis=(0, 1))


def nyquist_mask(shape: tuple[int, int]) -> np.ndarray:
    """True on the unpaired Nyquist row/column of even-sized grids."""
    h, w = shape
    m = np.zeros(shape, dtype=bool)
    if h % 2 == 0:
        m[h // 2, :] = True
    if w % 2 == 0:
        m[:, w // 2] = True
    return m


def make_pupil(grid: FrequencyGrid, config: OpticalConfig) -> np.ndarray:
    """Binary objective pupil: 1 where ``|k| <= NA/wavelength``."""
    if not config.cutoff < config.nyquist:
        raise ConfigurationError("pupil cutoff lies outside the frequency grid")
    return (grid.k2 <= config.cutoff**2).astype(float)


def _direction_vector(direction) -> tuple[float, float, str]:
    if isinstance(direction, str):
        if direction not in _DIRECTION_ANGLE:
            raise ConfigurationError(f"unknown illumination direction {direction!r}")
        angle = _DIRECTION_ANGLE[direction]
        name = direction
    else:
        angle = float(direction)
        name = f"{angle:g}deg"
    # exact unit vectors on the four cardinal directions
    theta = np.deg2rad(angle)
    c, s = np.cos(theta), np.sin(theta)
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    return c, s, name


def make_source_pair(
    grid: FrequencyGrid,
    config: OpticalConfig,
    axis="lr",
    geometry: str = "half-disc",
    inner_factor: float = 0.0,
) -> tuple[SourceMask, SourceMask]:
    """Anti-symmetric pair of half-disc or half-annulus illumination pupils.

    ``axis`` is ``"lr"`` (right/left), ``"tb"`` (top/bottom) or an angle in
    degrees giving the direction of the positive half-plane. The negative
    mask is the exact point mirror of the positive one.
    """
    if geometry not in GEOMETRIES:
        raise ConfigurationError(f"unknown source geometry {geometry!r}")
    if geometry == "half-disc":
        inner_factor = 0.0
    if not 0.0 <= inner_factor < 1.0:
        raise ConfigurationError(f"inner radius factor must be in [0, 1), got {inner_factor}")

    if isinstance(axis, str):
        if axis not in AXES:
            raise ConfigurationError(f"unknown DPC axis {axis!r}")
        pos_name, neg_name = AXES[axis]
        c, s, _ = _direction_vector(pos_name)
    else:
        c, s, pos_name = _direction_vector(axis)
        neg_name = f"{float(axis) + 180.0:g}deg"

    r2 = config.cutoff**2
    k2 = grid.k2
    ring = (k2 <= r2) & (k2 >= (inner_factor**2) * r2)
    half = grid.kx * c + grid.ky * s > 0
    pos = (ring & half).astype(float)
    neg = mirror(pos)
    return (
        SourceMask(pos, pos_name, geometry, inner_factor),
        SourceMask(neg, neg_name, geometry, inner_factor),
    )


def _correlate(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Linear cross-correlation ``c(k) = sum_q f(q) g(q + k)`` on the grid.

    Inputs and output are in unshifted FFT layout. Zero padding to twice the
    size removes the circular wrap-around of the DFT.
    """
    h, w = f.shape
    fp = np.zeros((2 * h, 2 * w))
    gp = np.zeros((2 * h, 2 * w))
    fp[:h, :w] = sfft.fftshift(f)
    gp[:h, :w] = sfft.fftshift(g)
    c = sfft.irfft2(np.conj(sfft.rfft2(fp)) * sfft.rfft2(gp), s=fp.shape)
    rows = np.rint(sfft.fftfreq(h, 1.0 / h)).astype(int) % (2 * h)
    cols = np.rint(sfft.fftfreq(w, 1.0 / w)).astype(int) % (2 * w)
    return c[np.ix_(rows, cols)]


def compute_ptf(
    pupil: np.ndarray,
    source_pos: SourceMask | np.ndarray,
    source_neg: SourceMask | np.ndarray | None = None,
    axis: str = "",
    dk2: float = 1.0,
    normalize: bool = True,
) -> TransferFunction:
    """Phase transfer function of one DPC axis.

    The differential source ``S = S_pos - S_neg`` enters the weak-phase
    integral ``A(k) = sum_q S(q) P(q) P(q + k)``, and ``H = i (A(k) - A(-k))``.
    With ``normalize`` the result is divided by the background
    ``B = sum (S_pos + S_neg) |P|^2``, which makes it the transfer function of
    the normalized difference image. Passing ``source_neg=None`` gives the
    single-sided transfer function of ``source_pos`` alone.
    """
    s_pos = np.asarray(getattr(source_pos, "values", source_pos), dtype=float)
    if source_neg is None:
        s_neg = np.zeros_like(s_pos)
    else:
        s_neg = np.asarray(getattr(source_neg, "values", source_neg), dtype=float)
    pupil = np.asarray(pupil, dtype=float)
    if not (pupil.shape == s_pos.shape == s_neg.shape):
        raise ConfigurationError("pupil and source masks must share one grid")
    if np.any(s_neg) and not np.array_equal(s_neg, mirror(s_pos)):
        raise ConfigurationError("source masks are not a mirrored pair")

    background = float(np.sum((s_pos + s_neg) * pupil**2)) * dk2
    if background <= 0:
        raise DegenerateOpticsError("illumination does not overlap the pupil")

    a = _correlate((s_pos - s_neg) * pupil, pupil) * dk2
    odd = a - mirror(a)
    odd[nyquist_mask(odd.shape)] = 0.0
    if normalize:
        odd /= background
    values = np.zeros(odd.shape, dtype=complex)
    values.imag = odd
    values[0, 0] = 0.0
    return TransferFunction(values, axis, background)


def kernel_from_ptf(tf: TransferFunction | np.ndarray) -> ConvolutionKernel:
    """Real-space point spread function ``h = IFFT[H]``."""
    values = np.asarray(getattr(tf, "values", tf))
    h = sfft.ifft2(values)
    scale = np.max(np.abs(h.real))
    if scale == 0:
        return ConvolutionKernel(np.zeros(values.shape), getattr(tf, "axis", ""))
    residue = np.max(np.abs(h.imag))
    if residue > SYMMETRY_RTOL * scale:
        raise SymmetryViolationError(
            f"inverse transform has imaginary residue {residue:.3g} "
            f"(kernel scale {scale:.3g}); transfer function is not odd"
        )
    return ConvolutionKernel(h.real.copy(), getattr(tf, "axis", ""))


def dpc_transfer_functions(
    config: OpticalConfig,
    axes=("lr", "tb"),
    geometry: str = "half-disc",
    inner_factor: float = 0.0,
) -> list[TransferFunction]:
    """Build one normalized transfer function per DPC axis."""
    grid = make_frequency_grid(config)
    pupil = make_pupil(grid, config)
    out = []
    for axis in axes:
        pos, neg = make_source_pair(grid, config, axis, geometry, inner_factor)
        out.append(compute_ptf(pupil, pos, neg, axis=str(axis)))
    return out


def single_side_transfer_functions(
    config: OpticalConfig,
    axis="lr",
    geometry: str = "half-disc",
    inner_factor: float = 0.0,
) -> tuple[TransferFunction, TransferFunction]:
    """Transfer functions of the two oblique illuminations of one axis, each on its own."""
    grid = make_frequency_grid(config)
    pupil = make_pupil(grid, config)
    pos, neg = make_source_pair(grid, config, axis, geometry, inner_factor)
    return (
        compute_ptf(pupil, pos, None, axis=pos.direction),
        compute_ptf(pupil, neg, None, axis=neg.direction),
    )
