"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected by the ``criterion`` fixture and repeated in the
terminal summary. Set ``SPARSEDPC_FULL_PROTOCOL=1`` to also run the full
600x600 benchmark protocol (about an hour and a half on one core).
"""

import os
import time

import numpy as np
import pytest

from conftest import ptf_bruteforce, symmetric_residue
from sparsedpc.benchmark import default_jobs, protocol_config, run_benchmark, summarize
from sparsedpc.forward import NoiseSpec, add_noise, add_stack_noise, simulate_dpc, simulate_stack
from sparsedpc.metrics import l0_count, lsnr, sparsity_stats
from sparsedpc.operators import DpcStack
from sparsedpc.optics import (
    OpticalConfig,
    compute_ptf,
    dpc_transfer_functions,
    kernel_from_ptf,
    make_frequency_grid,
    make_pupil,
    make_source_pair,
    nyquist_mask,
)
from sparsedpc.phantoms import KINDS, PhantomSpec, generate_phantom
from sparsedpc.pipeline import reconstruct
from sparsedpc.sensor import auto_params, estimate_noise
from sparsedpc.solvers import (
    HqsConfig,
    RldConfig,
    hessian_adjoint,
    hessian_apply,
    hqs_quadratic_solve,
    hqs_reconstruct,
    rld_cost_and_gradient,
    rld_reconstruct,
)

FULL = os.environ.get("SPARSEDPC_FULL_PROTOCOL") == "1"


def test_c01_ptf_correctness(criterion):
    cfg = OpticalConfig(width=32, height=32)
    details, ok = [], True
    for geometry, factor in (("half-disc", 0.0), ("half-annulus", 0.9)):
        for axis in ("lr", "tb"):
            t0 = time.perf_counter()
            g = make_frequency_grid(cfg)
            pos, neg = make_source_pair(g, cfg, axis, geometry, factor)
            h = compute_ptf(make_pupil(g, cfg), pos, neg).values
            elapsed = time.perf_counter() - t0
            ref = ptf_bruteforce(cfg, pos.values, neg.values)
            keep = ~nyquist_mask(h.shape)
            err = np.abs(h - ref)[keep].max() / np.abs(ref).max()
            odd = symmetric_residue(h)
            imag = np.abs(h.real).max() / np.abs(h).max()
            ok &= err <= 1e-8 and h[0, 0] == 0 and odd <= 1e-10 and imag <= 1e-10 and elapsed < 1
            details.append(f"{geometry}/{axis}: err {err:.1e}, odd {odd:.1e}, {elapsed * 1e3:.1f} ms")
    criterion(1, ok, "; ".join(details))
    assert ok


def test_c02_kernel_nullity(criterion):
    worst = 0.0
    for n in (32, 64, 128, 255):
        cfg = OpticalConfig(width=n, height=n)
        for geometry, factor in (("half-disc", 0.0), ("half-annulus", 0.9)):
            for tf in dpc_transfer_functions(cfg, ("lr", "tb", 45.0), geometry, factor):
                h = kernel_from_ptf(tf).values
                worst = max(worst, abs(h.sum()) / np.abs(h).max())
    ok = worst <= 1e-10
    criterion(2, ok, f"worst |sum h| / max|h| = {worst:.1e} over 24 kernels")
    assert ok


def test_c03_round_trip(criterion):
    t0 = time.perf_counter()
    tfs = dpc_transfer_functions(OpticalConfig(width=256, height=256))
    phase = generate_phantom(PhantomSpec("binary-blobs", 256, (0.0, 1.0), seed=1, blur=2.0))
    stack = simulate_stack(phase, tfs)
    runs = {
        "tikhonov": {"alpha": 1e-6},
        "tv": {"alpha": 1e-4},
        "dsp-hqs": {"alpha": 1e-4, "beta": 5e-5},
        "dsp-rld": {"alpha": 1e-4, "beta": 5e-5},
    }
    scores = {m: lsnr(phase, reconstruct(stack, m, p).phase).lsnr_db for m, p in runs.items()}
    elapsed = time.perf_counter() - t0
    ok = all(s >= 25 for s in scores.values()) and scores["tikhonov"] >= 30 and elapsed < 60
    text = ", ".join(f"{m} {s:.1f} dB" for m, s in scores.items())
    criterion(3, ok, f"{text}; {elapsed:.1f} s")
    assert ok


def test_c04_gradient_check(criterion):
    cfg_o = OpticalConfig(width=16, height=16)
    r = np.random.default_rng(0)
    stack = DpcStack(r.standard_normal((2, 16, 16)), dpc_transfer_functions(cfg_o))
    cfg = RldConfig(alpha=0.3, beta=0.2, eps_abs=1e-3)
    phi = 0.3 * r.standard_normal((16, 16))
    _, grad = rld_cost_and_gradient(phi, stack, cfg)
    h = 1e-6
    fd = np.zeros_like(phi)
    for idx in np.ndindex(phi.shape):
        e = np.zeros_like(phi)
        e[idx] = h
        fd[idx] = (rld_cost_and_gradient(phi + e, stack, cfg)[0]
                   - rld_cost_and_gradient(phi - e, stack, cfg)[0]) / (2 * h)
    rel = np.linalg.norm(grad - fd) / np.linalg.norm(fd)
    ok = rel <= 1e-4
    criterion(4, ok, f"relative error {rel:.1e}")
    assert ok


def test_c05_adjoints(criterion):
    r = np.random.default_rng(1)
    stack = DpcStack(np.zeros((2, 64, 64)), dpc_transfer_functions(OpticalConfig(width=64, height=64)))
    worst_k = worst_h = 0.0
    for _ in range(20):
        phi = r.standard_normal((64, 64))
        y = r.standard_normal((2, 64, 64))
        g = r.standard_normal((3, 64, 64))
        for n, tf in enumerate(stack.transfer_functions):
            one = DpcStack(np.zeros((1, 64, 64)), [tf])
            a, b = np.vdot(one.forward(phi)[0], y[n]), np.vdot(phi, one.adjoint(y[n:n + 1]))
            worst_k = max(worst_k, abs(a - b) / max(abs(a), abs(b)))
        a, b = np.vdot(hessian_apply(phi), g), np.vdot(phi, hessian_adjoint(g))
        worst_h = max(worst_h, abs(a - b) / max(abs(a), abs(b)))
    ok = worst_k <= 1e-10 and worst_h <= 1e-10
    criterion(5, ok, f"K_n {worst_k:.1e}, Hessian {worst_h:.1e}")
    assert ok


def test_c06_hqs_quadratic_solve(criterion):
    tfs = dpc_transfer_functions(OpticalConfig(width=64, height=64))
    r = np.random.default_rng(2)
    stack = DpcStack(r.standard_normal((2, 64, 64)), tfs)
    psi, g = r.standard_normal((2, 64, 64)), r.standard_normal((3, 64, 64))
    a0, b0 = 3.0, 0.7
    phi = hqs_quadratic_solve(stack, psi, g, a0, b0)
    lhs = (1 + a0) * stack.adjoint(stack.forward(phi)) + b0 * hessian_adjoint(hessian_apply(phi))
    rhs = stack.adjoint(stack.images + a0 * psi) + b0 * hessian_adjoint(g)
    rhs -= rhs.mean()
    resid = np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)

    phase = generate_phantom(PhantomSpec("binary-blobs", 64, (0.0, 1.0), seed=1))
    clean = simulate_stack(phase, tfs)
    out = hqs_quadratic_solve(clean, clean.forward(phase), hessian_apply(phase), 2.0, 5.0)
    score = lsnr(phase, out).lsnr_db
    ok = resid <= 1e-8 and score >= 60
    criterion(6, ok, f"residual {resid:.1e}, consistent recovery {score:.1f} dB")
    assert ok


def _protocol_checks(summary):
    avg = {(a["snr_db"], a["method"]): a["mean_lsnr_db"] for a in summary["averages"]}
    order = ("dsp-hqs", "dsp-rld", "tv", "tikhonov")
    problems = []
    for level in (10.0, 15.0, 20.0):
        vals = [avg[(level, m)] for m in order]
        if not all(a >= b for a, b in zip(vals, vals[1:])):
            problems.append(f"ordering at {level:g} dB: " + ", ".join(
                f"{m} {v:.2f}" for m, v in zip(order, vals)))
    gap = avg[(10.0, "dsp-hqs")] - avg[(10.0, "tv")]
    if gap < 2:
        problems.append(f"hqs - tv gap at 10 dB is {gap:.2f} dB")
    if avg[(10.0, "tikhonov")] >= 0:
        problems.append(f"tikhonov at 10 dB is {avg[(10.0, 'tikhonov')]:.2f} dB")
    table = "; ".join(
        f"{level:g} dB: " + " ".join(f"{m}={avg[(level, m)]:.2f}" for m in order)
        for level in (10.0, 15.0, 20.0, 30.0)
    )
    return problems, table


@pytest.mark.slow
def test_c07_protocol_quick(criterion):
    cfg = protocol_config().quick()
    jobs = default_jobs()
    t0 = time.perf_counter()
    records = run_benchmark(cfg, jobs=jobs)
    elapsed = time.perf_counter() - t0
    summary = summarize(records, cfg)
    problems, table = _protocol_checks(summary)
    if elapsed >= 300:
        problems.append(f"runtime {elapsed:.0f} s exceeds 300 s")
    if summary["failed"]:
        problems.append(f"{summary['failed']} failed records")
    ok = not problems
    criterion("7 (quick preset, 256x256, 3 trials)", ok,
              f"{elapsed:.0f} s at jobs={jobs}; averages {table}"
              + ("; " + "; ".join(problems) if problems else ""))
    assert ok, problems


@pytest.mark.slow
@pytest.mark.skipif(not FULL, reason="set SPARSEDPC_FULL_PROTOCOL=1 to run the 600x600 protocol")
def test_c07_protocol_full(criterion):
    cfg = protocol_config()
    jobs = default_jobs()
    t0 = time.perf_counter()
    records = run_benchmark(cfg, jobs=jobs)
    elapsed = time.perf_counter() - t0
    summary = summarize(records, cfg)
    problems, table = _protocol_checks(summary)
    if elapsed >= 1800:
        problems.append(f"runtime {elapsed / 60:.0f} min exceeds 30 min")
    ok = not problems
    criterion("7 (full protocol, 600x600, 10 trials)", ok,
              f"{elapsed / 60:.1f} min at jobs={jobs}; averages {table}"
              + ("; " + "; ".join(problems) if problems else ""))
    assert ok, problems


def test_c08_noise_sensor(criterion):
    problems = []
    const = max(estimate_noise(np.full((2, 64, 64), c)).A for c in (0.0, 1.0, -2.5))
    if const != 0:
        problems.append(f"constant images give A = {const:.3g} (zero-padded border response)")

    sigma = 0.5
    a = estimate_noise(np.random.default_rng(3).normal(0, sigma, (512, 512))).A
    if abs(a / (0.3 * sigma) - 1) > 0.03:
        problems.append(f"A / 0.3 sigma = {a / (0.3 * sigma):.4f}")

    est = estimate_noise(np.random.default_rng(4).normal(0, 1, (2, 128, 128)))
    alpha, beta = auto_params(est)
    if not (alpha == est.A and beta == est.A / 2):
        problems.append("alpha, beta are not A, A/2")

    tfs = dpc_transfer_functions(OpticalConfig(width=128, height=128))
    clean = simulate_stack(generate_phantom(PhantomSpec("siemens-star", 128, (0.0, 1.0))), tfs)
    for seed in range(10):
        levels = [estimate_noise(add_stack_noise(clean, NoiseSpec("range-fraction", f, seed))).A
                  for f in (0.01, 0.03, 0.1, 0.3)]
        if not all(x < y for x, y in zip(levels, levels[1:])):
            problems.append(f"not monotone for seed {seed}")
    ok = not problems
    criterion(8, ok, f"A/0.3sigma = {a / (0.3 * sigma):.4f}, max A on constants {const:.3g}"
              + ("; " + "; ".join(problems) if problems else ""))
    assert ok, problems


def test_c09_dsp_evidence(criterion):
    n = 128
    tfs = dpc_transfer_functions(OpticalConfig(width=n, height=n))
    levels = (10.0, 15.0, 20.0, 30.0)
    clean_imgs, noisy_imgs, wins, draws = [], [], 0, 0
    for kind in KINDS:
        for seed in range(10):
            phase = generate_phantom(PhantomSpec(kind, n, (0.0, 1.0), seed=seed))
            tf = tfs[seed % 2]
            clean = simulate_dpc(phase, tf)
            noisy = add_noise(clean, NoiseSpec("snr-db", levels[seed % 4], 1000 + draws))
            wins += l0_count(clean) <= l0_count(noisy)
            clean_imgs.append(clean)
            noisy_imgs.append(noisy)
            draws += 1
    frac = wins / draws
    rc, rn = sparsity_stats(clean_imgs), sparsity_stats(noisy_imgs)
    grid = np.union1d(rc.cdf_x, rn.cdf_x)
    dominates = bool(np.all(rc.cdf_at(grid) >= rn.cdf_at(grid)))
    ok = draws == 50 and frac >= 0.95 and dominates
    criterion(9, ok, f"{wins}/{draws} draws sparser without noise; clean CDF dominates: {dominates}; "
                     f"median nonzero fraction clean {np.median(rc.fractions):.3f}, "
                     f"noisy {np.median(rn.fractions):.3f}")
    assert ok


@pytest.mark.slow
def test_c10_efficiency(criterion):
    n = 512
    tfs = dpc_transfer_functions(OpticalConfig(width=n, height=n))
    phase = generate_phantom(PhantomSpec("siemens-star", n, (0.0, 1.0)))
    stack = add_stack_noise(simulate_stack(phase, tfs), NoiseSpec("snr-db", 10.0, 7))
    alpha, beta = auto_params(estimate_noise(stack))
    # warm up FFT plans and caches so neither method pays for them
    rld_reconstruct(stack, RldConfig(alpha, beta, t_max=2))
    times = {"hqs": [], "rld": []}
    for _ in range(2):
        t0 = time.perf_counter()
        hqs_reconstruct(stack, HqsConfig(alpha, beta))
        times["hqs"].append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        rld_reconstruct(stack, RldConfig(alpha, beta, t_max=150))
        times["rld"].append(time.perf_counter() - t0)
    hqs, rld = min(times["hqs"]), min(times["rld"])
    ok = rld < hqs
    criterion(10, ok, f"RLD (150 steps) {rld:.2f} s vs HQS full schedule {hqs:.2f} s, "
                      f"best of 2, alpha={alpha:.3g}")
    assert ok


def test_c11_determinism(criterion, tmp_path):
    from sparsedpc.cli import main

    cfg = {
        "optics": {"width": 48, "height": 48},
        "phantoms": [{"kind": k, "phase_range": [0, 1], "seed": i} for i, k in enumerate(KINDS[:2])],
        "snr_db": [10, 20],
        "methods": {"tikhonov": {"alpha": 1e-4}, "tv": {}, "dsp-hqs": {}, "dsp-rld": {"t_max": 20}},
        "trials": 2,
        "master_seed": 2024,
    }
    path = tmp_path / "run.json"
    path.write_text(__import__("json").dumps(cfg))
    outputs = []
    for i, jobs in enumerate((1, 1, 2)):
        out = tmp_path / f"r{i}"
        assert main(["benchmark", str(path), "--out", str(out), "--quiet", "--jobs", str(jobs)]) == 0
        outputs.append(out)

    def strip(p, name):
        lines = (p / name).read_text().splitlines()
        header = lines[0].split(",")
        drop = [i for i, c in enumerate(header) if "wall_ms" in c]
        return [[v for i, v in enumerate(line.split(",")) if i not in drop] for line in lines]

    same = all(strip(o, f) == strip(outputs[0], f)
               for o in outputs[1:] for f in ("records.csv", "summary.csv"))
    ok = same
    criterion(11, ok, "records.csv and summary.csv identical over 3 runs (jobs 1, 1, 2), "
                      "timing columns excluded")
    assert ok
