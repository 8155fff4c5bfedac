"""Phase reconstruction solvers sharing the Fourier operator core."""

from ..operators import DpcStack, hessian_adjoint, hessian_apply
from .hqs import HqsConfig, hqs_quadratic_solve, hqs_reconstruct
from .prox import hqs_hard_threshold, soft_threshold
from .rld import (
    OptimizerState,
    RldConfig,
    l0_surrogate,
    l0_surrogate_grad,
    nadam_step,
    rld_cost_and_gradient,
    rld_reconstruct,
)
from .tikhonov import TikhonovConfig, tikhonov_reconstruct
from .tv import TvConfig, tv_reconstruct

__all__ = [
    "DpcStack",
    "HqsConfig",
    "OptimizerState",
    "RldConfig",
    "TikhonovConfig",
    "TvConfig",
    "hessian_adjoint",
    "hessian_apply",
    "hqs_hard_threshold",
    "hqs_quadratic_solve",
    "hqs_reconstruct",
    "l0_surrogate",
    "l0_surrogate_grad",
    "nadam_step",
    "rld_cost_and_gradient",
    "rld_reconstruct",
    "soft_threshold",
    "tikhonov_reconstruct",
    "tv_reconstruct",
]
