"""L2-regularized closed-form deconvolution."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, SingularDeconvolutionError
from ..operators import DpcStack, irfft2
from ._spectral import solve_diagonal


@dataclass(frozen=True)
class TikhonovConfig:
    alpha: float = 1e-4

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ConfigurationError("Tikhonov alpha must be non-negative")


def tikhonov_reconstruct(stack: DpcStack, cfg: TikhonovConfig = TikhonovConfig()) -> np.ndarray:
    """Minimize ``sum_n ||K_n phi - s_n||^2 + alpha ||phi||^2`` in one spectral division."""
    den = stack.gram + cfg.alpha
    if cfg.alpha == 0 and np.any(den == 0):
        raise SingularDeconvolutionError(
            "alpha = 0 with a transfer-function null (DC is always one); use alpha > 0"
        )
    return irfft2(solve_diagonal(stack.backprojection, den), stack.shape)
