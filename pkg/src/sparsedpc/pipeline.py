"""Method dispatch shared by the command line and the benchmark runner.

Penalty weights follow one precedence rule: an explicit value (flag or config
file) wins, otherwise ``alpha = A`` and ``beta = A / 2`` from the noise sensor.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .operators import DpcStack
from .sensor import NoiseEstimate, auto_params, estimate_noise
from .solvers import (
    HqsConfig,
    RldConfig,
    TikhonovConfig,
    TvConfig,
    hqs_reconstruct,
    rld_reconstruct,
    tikhonov_reconstruct,
    tv_reconstruct,
)

METHODS = ("tikhonov", "tv", "dsp-hqs", "dsp-rld")

# keys each method accepts besides alpha/beta
_EXTRA = {
    "tikhonov": set(),
    "tv": {"beta0_init", "beta_max", "growth", "tol", "max_inner"},
    "dsp-hqs": {"alpha_max", "beta_max", "growth", "phi_init"},
    "dsp-rld": {"c", "eta", "rho1", "rho2", "xi", "t_max", "eps_abs", "init_alpha"},
}


@dataclass
class Reconstruction:
    phase: np.ndarray
    method: str
    alpha_used: float
    beta_used: float | None
    noise: NoiseEstimate
    parameters: dict
    trace: list = field(default_factory=list)
    final_cost: float = float("nan")
    wall_ms: float = 0.0


def check_method(method: str) -> None:
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def method_params(method: str, params: dict | None) -> dict:
    """Validate a per-method parameter dict against the solver's fields."""
    check_method(method)
    params = dict(params or {})
    unknown = set(params) - _EXTRA[method] - {"alpha", "beta"}
    if method in ("tikhonov", "tv"):
        unknown |= {"beta"} & set(params)
    if unknown:
        raise ConfigurationError(f"{method} does not accept {sorted(unknown)}")
    return params


def _energy_tikhonov(stack, phi, alpha):
    return float(np.sum((stack.forward(phi) - stack.images) ** 2) + alpha * np.sum(phi**2))


def reconstruct(
    stack: DpcStack,
    method: str,
    params: dict | None = None,
    noise: NoiseEstimate | None = None,
) -> Reconstruction:
    """Run one solver on ``stack``, resolving missing weights from the sensor."""
    params = method_params(method, params)
    if noise is None:
        noise = estimate_noise(stack)
    need_sensor = "alpha" not in params or (method.startswith("dsp") and "beta" not in params)
    if need_sensor:
        a_auto, b_auto = auto_params(noise, params.get("beta"))
    alpha = float(params.pop("alpha")) if "alpha" in params else a_auto
    beta = None
    if method.startswith("dsp"):
        beta = float(params.pop("beta")) if "beta" in params else b_auto

    trace: list = []
    t0 = time.perf_counter()
    if method == "tikhonov":
        cfg = TikhonovConfig(alpha)
        phi = tikhonov_reconstruct(stack, cfg)
        cost = _energy_tikhonov(stack, phi, alpha)
        trace.append({"iteration": 1, "cost": cost})
    elif method == "tv":
        cfg = TvConfig(alpha, **params)
        phi = tv_reconstruct(stack, cfg, callback=trace.append)
    elif method == "dsp-hqs":
        cfg = HqsConfig(alpha, beta, **params)
        phi = hqs_reconstruct(stack, cfg, callback=trace.append)
        for row in trace:
            row["cost"] = row["data"] + alpha * row["support"] + beta * row["hessian_l1"]
    else:
        cfg = RldConfig(alpha, beta, **params)
        phi = rld_reconstruct(stack, cfg, callback=trace.append)
    wall_ms = 1e3 * (time.perf_counter() - t0)

    used = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    final = float(trace[-1]["cost"]) if trace else float("nan")
    return Reconstruction(phi, method, alpha, beta, noise, used, trace, final, wall_ms)
