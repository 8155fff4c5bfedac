"""Simulating DPC measurements: linear model, raw intensity pairs and noise.

A weak-phase object is imaged two ways. The linear model convolves the phase
with the DPC kernel. The raw route forms the two half-source intensities and
takes their normalized difference. Within the weak-object model the two
routes coincide until the phase is strong enough to drive an intensity
negative, where it is clamped at zero. Noise is then added at a fixed SNR
and the sensor estimates its level from the data.

    python demos/02_forward_model_and_noise.py
"""

import warnings

import numpy as np

from sparsedpc.forward import (
    NoiseSpec,
    add_stack_noise,
    compose_dpc,
    simulate_dpc,
    simulate_raw_pair,
    simulate_stack,
)
from sparsedpc.optics import OpticalConfig, dpc_transfer_functions, single_side_transfer_functions
from sparsedpc.phantoms import PhantomSpec, generate_phantom
from sparsedpc.sensor import auto_params, estimate_noise

cfg = OpticalConfig(width=192, height=192)
tfs = dpc_transfer_functions(cfg)
pos, neg = single_side_transfer_functions(cfg, "lr")

print("phase scale   clamped pixels   max |linear - raw| / range")
for scale in (0.1, 1.0, 4.0, 16.0):
    phase = scale * generate_phantom(PhantomSpec("smooth-bumps", 192, (0.0, 1.0), seed=3))
    linear = simulate_dpc(phase, tfs[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # clamping is reported below
        pair = simulate_raw_pair(phase, pos, neg)
    raw = compose_dpc(pair)
    print(f"{scale:11.1f}   {pair.clamped:14d}   {np.abs(linear - raw).max() / np.ptp(linear):.2e}")

phase = generate_phantom(PhantomSpec("siemens-star", 192, (0.0, 1.0)))
clean = simulate_stack(phase, tfs)
rms = np.sqrt(np.mean(clean.images**2))
print(f"\nclean stack rms {rms:.4f}; constant phase gives "
      f"{np.abs(simulate_stack(np.ones_like(phase), tfs).images).max():.1e}")

print("\nSNR dB   noise std   sensor A   alpha      beta")
for snr in (10, 15, 20, 30):
    noisy = add_stack_noise(clean, NoiseSpec("snr-db", snr, seed=1))
    est = estimate_noise(noisy)
    alpha, beta = auto_params(est)
    sigma = np.std(noisy.images - clean.images)
    print(f"{snr:6d}   {sigma:9.4f}   {est.A:8.4f}   {alpha:.4f}   {beta:.4f}")
