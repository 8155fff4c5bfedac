"""Half-quadratic splitting for the sparse-Hessian DPC energy.

The energy is ``sum_n ||K_n phi - s_n||^2 + alpha sum_n ||K_n phi||_0
+ beta ||H phi||_1``. Auxiliary fields ``psi_n ~ K_n phi`` and ``G ~ H phi``
are updated by hard and soft thresholding, and ``phi`` by a spectral solve,
while the coupling weights grow geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..operators import DpcStack, hessian_adjoint, hessian_apply, hessian_spectra, irfft2, rfft2
from ._spectral import solve_diagonal
from .prox import hqs_hard_threshold, soft_threshold


@dataclass(frozen=True)
class HqsConfig:
    alpha: float
    beta: float
    alpha_max: float = 1e3
    beta_max: float = 1e5
    growth: float = 2.0
    phi_init: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ConfigurationError("HQS needs alpha > 0 and beta > 0")
        if not (self.alpha_max > self.alpha and self.beta_max > self.beta):
            raise ConfigurationError("alpha_max/beta_max must exceed alpha/beta")
        if not self.growth > 1:
            raise ConfigurationError("growth factor must exceed 1")


def schedule_length(start: float, stop: float, growth: float) -> int:
    """Trip count of ``while x < stop: x *= growth`` from ``x = start``."""
    n, x = 0, start
    while x < stop:
        x *= growth
        n += 1
    return n


def expected_length(start: float, stop: float, growth: float) -> int:
    """Closed form ``ceil(log_growth(stop / start))`` of :func:`schedule_length`."""
    if start >= stop:
        return 0
    return math.ceil(math.log(stop / start) / math.log(growth) - 1e-12)


def hqs_quadratic_solve(
    stack: DpcStack,
    psi: np.ndarray,
    g: np.ndarray,
    alpha0: float,
    beta0: float,
    hess_spec: np.ndarray | None = None,
) -> np.ndarray:
    """Closed-form ``phi`` minimizing the quadratic splitting energy.

    Solves ``[(1 + a0) sum K^T K + b0 H^T H] phi = sum K^T (s + a0 psi) + b0 H^T G``
    by division in the Fourier domain.
    """
    if not (alpha0 > 0 and beta0 > 0):
        raise ConfigurationError("alpha0 and beta0 must be positive")
    if hess_spec is None:
        hess_spec = hessian_spectra(stack.shape)
    num = (
        stack.backprojection
        + alpha0 * np.sum(stack.h_half_conj * rfft2(psi), axis=0)
        + beta0 * rfft2(hessian_adjoint(g))
    )
    den = (1 + alpha0) * stack.gram + beta0 * np.sum(np.abs(hess_spec) ** 2, axis=0)
    return irfft2(solve_diagonal(num, den), stack.shape)


def hqs_reconstruct(stack: DpcStack, cfg: HqsConfig, callback=None) -> np.ndarray:
    """Nested continuation: one ``psi`` update per ``alpha0`` step, then a full
    ``beta0`` sweep of (``G``, ``phi``) updates.

    ``callback``, if given, is called after every outer step with a dict of
    the schedule state and the energy terms.
    """
    hess_den = np.sum(np.abs(hessian_spectra(stack.shape)) ** 2, axis=0)
    phi = np.full(stack.shape, float(cfg.phi_init))
    inner_total = 0
    alpha0 = cfg.alpha
    outer = 0
    while alpha0 < cfg.alpha_max:
        psi = hqs_hard_threshold(stack.forward(phi), cfg.alpha / alpha0)
        # psi is fixed through the inner sweep
        num_fixed = stack.backprojection + alpha0 * np.sum(
            stack.h_half_conj * rfft2(psi), axis=0
        )
        gram = (1 + alpha0) * stack.gram
        beta0 = cfg.beta
        while beta0 < cfg.beta_max:
            g = soft_threshold(hessian_apply(phi), cfg.beta / beta0)
            num = num_fixed + beta0 * rfft2(hessian_adjoint(g))
            phi = irfft2(solve_diagonal(num, gram + beta0 * hess_den), stack.shape)
            beta0 *= cfg.growth
            inner_total += 1
        alpha0 *= cfg.growth
        outer += 1
        if callback is not None:
            kphi = stack.forward(phi)
            callback(
                {
                    "outer": outer,
                    "inner_total": inner_total,
                    "alpha0": alpha0 / cfg.growth,
                    "data": float(np.sum((kphi - stack.images) ** 2)),
                    "support": int(np.count_nonzero(np.any(psi != 0, axis=0))),
                    "hessian_l1": float(np.sum(np.abs(hessian_apply(phi)))),
                }
            )
    return phi
