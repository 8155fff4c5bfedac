"""Gradient-based sparse-Hessian deconvolution with an N-Adam optimizer.

The L0 term is replaced by the smooth surrogate ``1 - exp(-c|x|)``; absolute
values are smoothed as ``sqrt(x**2 + eps**2)`` so the energy is differentiable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DivergenceError
from ..operators import DpcStack, hessian_adjoint, hessian_apply
from .tikhonov import TikhonovConfig, tikhonov_reconstruct


@dataclass(frozen=True)
class RldConfig:
    alpha: float
    beta: float
    c: float = 10.0
    eta: float = 0.05
    rho1: float = 0.9
    rho2: float = 0.999
    xi: float = 1e-8
    t_max: int = 150
    eps_abs: float = 1e-8
    init_alpha: float = 1.0

    def __post_init__(self):
        if not (self.alpha >= 0 and self.beta >= 0):
            raise ConfigurationError("alpha and beta must be non-negative")
        if not (self.c > 0 and self.eta > 0 and self.xi > 0 and self.init_alpha > 0):
            raise ConfigurationError("c, eta, xi and init_alpha must be positive")
        if not (0 < self.rho1 < 1 and 0 < self.rho2 < 1):
            raise ConfigurationError("decay rates must lie in (0, 1)")
        if self.t_max < 1:
            raise ConfigurationError("t_max must be at least 1")
        if self.eps_abs < 0:
            raise ConfigurationError("eps_abs must be non-negative")


@dataclass
class OptimizerState:
    m: np.ndarray
    v: np.ndarray
    t: int = 1

    @classmethod
    def zeros(cls, shape) -> "OptimizerState":
        return cls(np.zeros(shape), np.zeros(shape), 1)


def _abs(x, eps):
    if not eps:
        return np.abs(x)
    out = np.multiply(x, x)
    out += eps * eps
    return np.sqrt(out, out=out)


def l0_surrogate(x, c: float, eps: float = 0.0):
    """``1 - exp(-c|x|)``, tending to the L0 indicator as ``c`` grows."""
    if c <= 0:
        raise ValueError("c must be positive")
    return 1.0 - np.exp(-c * _abs(np.asarray(x, dtype=float), eps))


def l0_surrogate_grad(x, c: float, eps: float = 1e-8):
    """Derivative ``c exp(-c|x|) x/|x|`` with ``|x|`` smoothed by ``eps``."""
    if c <= 0:
        raise ValueError("c must be positive")
    x = np.asarray(x, dtype=float)
    a = _abs(x, eps)
    out = np.zeros_like(x)
    np.divide(c * np.exp(-c * a) * x, a, out=out, where=a > 0)
    return out


def rld_cost_and_gradient(phi: np.ndarray, stack: DpcStack, cfg: RldConfig, iteration: int = 0):
    """Surrogate energy and its gradient with respect to ``phi``."""
    eps = cfg.eps_abs
    kphi = stack.forward(phi)
    resid = kphi - stack.images
    k_term = 2.0 * resid
    cost = float(np.vdot(resid, resid))
    if cfg.alpha:
        abs_k = _abs(kphi, eps)
        decay = np.exp(-cfg.c * abs_k)
        cost += cfg.alpha * (decay.size - float(np.sum(decay)))
        decay *= cfg.alpha * cfg.c
        k_term += decay * _safe_ratio(kphi, abs_k)
    grad = stack.adjoint(k_term)
    if cfg.beta:
        hphi = hessian_apply(phi)
        abs_h = _abs(hphi, eps)
        cost += cfg.beta * float(np.sum(abs_h))
        grad += cfg.beta * hessian_adjoint(_safe_ratio(hphi, abs_h))
    if not np.isfinite(cost):
        raise DivergenceError(f"cost became non-finite at iteration {iteration}")
    return cost, grad


def _safe_ratio(x, a):
    """``x / a`` with ``0/0 := 0``."""
    out = np.divide(x, a, out=np.zeros_like(x), where=a > 0) if not np.all(a) else x / a
    return out


def nadam_step(state: OptimizerState, grad: np.ndarray, phi: np.ndarray, cfg: RldConfig):
    """One Nesterov-accelerated Adam update; returns ``(new_state, new_phi)``."""
    if state.t < 1:
        raise ValueError("optimizer step counter starts at 1")
    r1, r2, t = cfg.rho1, cfg.rho2, state.t
    m = r1 * state.m
    m += (1 - r1) * grad
    v = r2 * state.v
    v += (1 - r2) * (grad * grad)
    # r1 * m_hat + (1 - r1) * g, then divide by sqrt(v_hat + xi)
    step = (r1 / (1 - r1**t)) * m
    step += (1 - r1) * grad
    denom = v / (1 - r2**t)
    denom += cfg.xi
    np.sqrt(denom, out=denom)
    step /= denom
    step *= cfg.eta
    return OptimizerState(m, v, t + 1), phi - step


def rld_reconstruct(stack: DpcStack, cfg: RldConfig, callback=None) -> np.ndarray:
    """Tikhonov start followed by ``t_max`` N-Adam steps on the surrogate energy.

    The mean of ``phi`` is removed after each step: the energy does not depend
    on it, and the per-pixel Adam scaling would otherwise let it drift.
    """
    phi = tikhonov_reconstruct(stack, TikhonovConfig(cfg.init_alpha))
    state = OptimizerState.zeros(phi.shape)
    for it in range(1, cfg.t_max + 1):
        cost, grad = rld_cost_and_gradient(phi, stack, cfg, it)
        state, phi = nadam_step(state, grad, phi, cfg)
        phi -= phi.mean()
        if callback is not None:
            callback({"iteration": it, "cost": cost})
    return phi
