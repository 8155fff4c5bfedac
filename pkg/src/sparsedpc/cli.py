"""``sparsedpc`` command line: simulate, reconstruct, benchmark, ptf, sensor.

Exit status is 0 on success, 1 on a runtime failure (stale manifest, solver
divergence, too many failed benchmark cells) and 2 on usage or configuration
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import (
    FAIL_LIMIT,
    JOBS_ENV,
    RunConfig,
    default_jobs,
    failure_fraction,
    run_benchmark,
    summarize,
    protocol_config,
    write_outputs,
)
from .errors import ConfigurationError, DegenerateOpticsError
from .manifest import (
    load_manifest,
    load_phantom,
    load_stack,
    optics_settings,
    simulate_dataset,
    transfer_functions_for,
)
from .metrics import lsnr
from .optics import kernel_from_ptf
from .pfm import write_pfm
from .pipeline import METHODS, reconstruct
from .sensor import auto_params, estimate_noise

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _read_json(path) -> dict:
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read JSON config {path}: {exc}") from exc
    if not isinstance(d, dict):
        raise ConfigurationError(f"{path}: top-level JSON value must be an object")
    return d


def _emit(obj, out: str | None):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n")
    print(text)


def cmd_simulate(args) -> int:
    config = _read_json(args.config)
    if args.seed is not None:
        config.setdefault("noise", {})["seed"] = args.seed
    if args.snr is not None:
        config.setdefault("noise", {}).update(mode="snr-db", level=args.snr)
    out = args.out or config.get("output_dir")
    if not out:
        raise ConfigurationError("no output directory: pass --out or set output_dir")
    manifest = simulate_dataset(config, out)
    n = 1 + len(manifest["files"]["dpc"]) + len(manifest["files"]["dpc_noisy"])
    print(f"wrote {n} PFM files and manifest.json to {out}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    manifest, root = load_manifest(args.manifest)
    params = {}
    if args.config:
        params.update(_read_json(args.config))
    if args.alpha is not None:
        params["alpha"] = args.alpha
    if args.beta is not None:
        params["beta"] = args.beta
    stack = load_stack(manifest, root, "dpc" if args.clean else "dpc_noisy")
    rec = reconstruct(stack, args.method, params)

    out = Path(args.out) if args.out else root / f"recon_{args.method}"
    out.mkdir(parents=True, exist_ok=True)
    write_pfm(out / "phase.pfm", rec.phase)
    report = {
        "method": rec.method,
        "input": "dpc" if args.clean else "dpc_noisy",
        "alpha_used": rec.alpha_used,
        "beta_used": rec.beta_used,
        "sensor": {"A": rec.noise.A, "per_image": list(rec.noise.per_image)},
        "parameters": rec.parameters,
        "final_cost": rec.final_cost,
        "cost_trace": rec.trace,
        "wall_ms": rec.wall_ms,
    }
    truth = load_phantom(manifest, root)
    if truth is not None and np.any(truth):
        report["lsnr_db"] = lsnr(truth, rec.phase).lsnr_db
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    extra = f", LSNR {report['lsnr_db']:.2f} dB" if "lsnr_db" in report else ""
    print(f"{rec.method}: alpha={rec.alpha_used:.4g} in {rec.wall_ms:.0f} ms{extra}; wrote {out}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    cfg = RunConfig.from_json(args.config) if args.config else protocol_config()
    d = cfg.to_dict()
    if args.trials is not None:
        d["trials"] = args.trials
    if args.seed is not None:
        d["master_seed"] = args.seed
    if args.methods:
        d["methods"] = {m: d["methods"].get(m, {}) for m in args.methods}
    cfg = RunConfig.from_dict(d)
    if args.quick:
        cfg = cfg.quick()
    jobs = args.jobs if args.jobs is not None else default_jobs()
    out = Path(args.out or cfg.output_dir)

    def progress(done, total):
        if not args.quiet:
            print(f"\r{done}/{total} cells", end="", file=sys.stderr, flush=True)

    t0 = time.perf_counter()
    records = run_benchmark(cfg, jobs=jobs, progress=progress)
    if not args.quiet:
        print(file=sys.stderr)
    summary = summarize(records, cfg)
    summary["wall_s"] = time.perf_counter() - t0
    summary["jobs"] = jobs
    write_outputs(records, summary, cfg, out)
    frac = failure_fraction(summary)
    print(
        f"{summary['total']} records, {summary['failed']} failed, "
        f"{len(summary['cells'])} summary cells in {summary['wall_s']:.1f} s; wrote {out}"
    )
    if frac > FAIL_LIMIT:
        print(f"error: {100 * frac:.1f}% of cells failed (limit {100 * FAIL_LIMIT:.0f}%)",
              file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_ptf(args) -> int:
    d = _read_json(args.config) if args.config else {}
    if args.axes:
        d["axes"] = args.axes
    if args.geometry:
        d["geometry"] = args.geometry
    if args.inner_factor is not None:
        d["inner_factor"] = args.inner_factor
    settings = optics_settings(d)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for tf in transfer_functions_for(settings):
        tag = str(tf.axis).replace(".", "p")
        # centered layout: DC at (H//2, W//2)
        shifted = np.fft.fftshift(tf.values)
        for part, plane in (("real", shifted.real), ("imag", shifted.imag)):
            name = f"ptf_{tag}_{part}.pfm"
            write_pfm(out / name, plane)
            files.append(name)
        if args.kernels:
            name = f"kernel_{tag}.pfm"
            write_pfm(out / name, np.fft.fftshift(kernel_from_ptf(tf).values))
            files.append(name)
    info = {
        "optics": settings["optics"].to_dict(),
        "axes": settings["axes"],
        "geometry": settings["geometry"],
        "inner_factor": settings["inner_factor"],
        "layout": "fftshift (DC at row H//2, column W//2)",
        "files": files,
    }
    (out / "ptf.json").write_text(json.dumps(info, indent=2) + "\n")
    print(f"wrote {len(files)} planes to {out}")
    return EXIT_OK


def cmd_sensor(args) -> int:
    manifest, root = load_manifest(args.manifest)
    stack = load_stack(manifest, root, "dpc" if args.clean else "dpc_noisy")
    est = estimate_noise(stack)
    alpha, beta = auto_params(est, args.beta)
    _emit({"A": est.A, "alpha": alpha, "beta": beta, "per_image": list(est.per_image)}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sparsedpc",
        description="DPC phase reconstruction with a dark-field sparse prior.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="render a phantom and its clean/noisy DPC stack")
    s.add_argument("config", help="simulation JSON (optics, axes, phantom, noise, output_dir)")
    s.add_argument("--out", help="output directory (overrides output_dir)")
    s.add_argument("--seed", type=int, help="noise seed override")
    s.add_argument("--snr", type=float, help="SNR in dB; switches the noise mode to snr-db")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", help="recover phase from a simulated dataset")
    r.add_argument("manifest", help="manifest.json written by simulate")
    r.add_argument("--method", required=True, choices=METHODS)
    r.add_argument("--config", help="JSON of solver parameters")
    r.add_argument("--alpha", type=float, help="penalty weight (default: sensor A)")
    r.add_argument("--beta", type=float, help="Hessian weight for dsp methods (default: A/2)")
    r.add_argument("--clean", action="store_true", help="use the noise-free stack")
    r.add_argument("--out", help="output directory (default: <dataset>/recon_<method>)")
    r.set_defaults(func=cmd_reconstruct)

    b = sub.add_parser("benchmark", help="run the phantom x SNR x method x trial sweep")
    b.add_argument("config", nargs="?", help="run config JSON (default: built-in 5x4x4x10 sweep)")
    b.add_argument("--quick", action="store_true", help="256x256 images, 3 trials")
    b.add_argument("--jobs", type=int,
                   help=f"parallel workers (default: ${JOBS_ENV} or the CPU count)")
    b.add_argument("--trials", type=int)
    b.add_argument("--seed", type=int, help="master seed")
    b.add_argument("--methods", nargs="+", choices=METHODS)
    b.add_argument("--out", help="output directory (overrides output_dir)")
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_benchmark)

    t = sub.add_parser("ptf", help="write transfer functions as real/imag PFM planes")
    t.add_argument("--config", help="JSON with optics, axes, geometry, inner_factor")
    t.add_argument("--axes", nargs="+", help="lr, tb or half-plane angles in degrees")
    t.add_argument("--geometry", choices=("half-disc", "half-annulus"))
    t.add_argument("--inner-factor", type=float)
    t.add_argument("--kernels", action="store_true", help="also write real-space kernels")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_ptf)

    n = sub.add_parser("sensor", help="estimate the noise level A and the weights alpha, beta")
    n.add_argument("manifest")
    n.add_argument("--clean", action="store_true", help="use the noise-free stack")
    n.add_argument("--beta", type=float, help="manual beta override")
    n.add_argument("--out", help="also write the JSON here")
    n.set_defaults(func=cmd_sensor)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if getattr(args, "trials", None) is not None and args.trials < 1:
        parser.error("--trials must be at least 1")
    try:
        return args.func(args)
    except (ConfigurationError, DegenerateOpticsError) as exc:
        print(f"sparsedpc {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, ValueError, OSError) as exc:
        print(f"sparsedpc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
