"""Factorial reconstruction benchmark: phantom x SNR x method x trial.

Every (phantom, SNR, trial) cell draws one noisy stack and runs all methods on
it, so methods are compared on identical data. Seeds come from the master
seed through a splitmix64 mix of the cell indices, which makes the results
independent of execution order and of ``--jobs``.

Output files
------------
records.csv
    One row per (phantom, snr_db, method, trial) with the columns in
    :data:`RECORD_COLUMNS`. ``status`` is ``ok`` or ``error: <reason>``.
summary.csv
    One row per (phantom, snr_db, method): successful trial count, mean and
    sample (n-1) standard deviation of LSNR, mean wall time.
table.csv
    The same means in a wide layout, one column per method, plus ``average``
    rows pooling all phantoms at each SNR.
summary.json
    The summary rows, the pooled averages, the run config and failure counts.
"""

from __future__ import annotations

import copy
import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .forward import NoiseSpec, add_stack_noise, simulate_stack
from .manifest import optics_settings, transfer_functions_for
from .metrics import lsnr
from .phantoms import KINDS, PhantomSpec, generate_phantom
from .pipeline import METHODS, method_params, reconstruct
from .sensor import estimate_noise

RECORD_COLUMNS = (
    "phantom", "snr_db", "method", "trial", "lsnr_db", "wall_ms", "alpha_used", "beta_used", "status",
)
TIMING_COLUMNS = ("wall_ms",)
JOBS_ENV = "SPARSEDPC_JOBS"
FAIL_LIMIT = 0.10
MASK64 = (1 << 64) - 1

QUICK_SIZE = 256
QUICK_TRIALS = 3


def splitmix64(x: int) -> int:
    """One output of the splitmix64 generator seeded with ``x``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Fold indices into the master seed: ``s <- splitmix64(s ^ i)`` per index."""
    s = splitmix64(master & MASK64)
    for i in indices:
        s = splitmix64(s ^ (i & MASK64))
    return s


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            jobs = int(env)
        except ValueError as exc:
            raise ConfigurationError(f"{JOBS_ENV} must be an integer, got {env!r}") from exc
        if jobs < 1:
            raise ConfigurationError(f"{JOBS_ENV} must be at least 1")
        return jobs
    return os.cpu_count() or 1


@dataclass
class RunConfig:
    """Benchmark definition.

    JSON layout (all keys optional except where a default makes no sense)::

        {"optics": {...}, "axes": ["lr", "tb"], "geometry": "half-disc",
         "inner_factor": 0.0,
         "phantoms": [{"kind": "siemens-star", "phase_range": [0, 1], "seed": 0,
                       "id": "star"}, ...],
         "noise_mode": "snr-db", "snr_db": [10, 15, 20, 30],
         "methods": {"tikhonov": {"alpha": 1e-4}, "tv": {}, "dsp-hqs": {}, "dsp-rld": {}},
         "trials": 10, "master_seed": 0, "output_dir": "benchmark"}

    Phantom sizes default to the optics width. Method dicts take the solver's
    config fields; missing ``alpha``/``beta`` come from the noise sensor.
    """

    optics: dict = field(default_factory=dict)
    axes: list = field(default_factory=lambda: ["lr", "tb"])
    geometry: str = "half-disc"
    inner_factor: float = 0.0
    phantoms: list = field(default_factory=list)
    noise_mode: str = "snr-db"
    snr_db: list = field(default_factory=lambda: [10.0, 15.0, 20.0, 30.0])
    methods: dict = field(default_factory=dict)
    trials: int = 10
    master_seed: int = 0
    output_dir: str = "benchmark"

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigurationError("trial count must be an integer >= 1")
        if not self.phantoms:
            raise ConfigurationError("at least one phantom is required")
        if not self.snr_db:
            raise ConfigurationError("at least one noise level is required")
        if not self.methods:
            raise ConfigurationError("at least one method is required")
        for name, params in self.methods.items():
            method_params(name, params)
        settings = optics_settings(self.to_dict())
        ids = []
        for p in self.phantoms:
            spec = self.phantom_spec(p, settings["optics"].width)
            if spec.size != settings["optics"].width or settings["optics"].width != settings["optics"].height:
                raise ConfigurationError("phantoms must be square and match the optics grid")
            ids.append(p.get("id", spec.kind))
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"phantom ids must be unique, got {ids}")
        NoiseSpec(self.noise_mode, float(self.snr_db[0]), 0)

    @staticmethod
    def phantom_spec(p: dict, size: int) -> PhantomSpec:
        d = {k: v for k, v in p.items() if k != "id"}
        d.setdefault("size", size)
        return PhantomSpec.from_dict(d)

    @property
    def phantom_ids(self) -> list[str]:
        return [p.get("id", p.get("kind", "siemens-star")) for p in self.phantoms]

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown benchmark config keys: {sorted(unknown)}")
        return cls(**copy.deepcopy(d))

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in self.__dataclass_fields__}

    def quick(self) -> "RunConfig":
        """The reduced preset: 256x256 images and 3 trials."""
        d = self.to_dict()
        d["optics"] = {**d["optics"], "width": QUICK_SIZE, "height": QUICK_SIZE}
        d["phantoms"] = [{**p, "size": QUICK_SIZE} for p in d["phantoms"]]
        d["trials"] = min(self.trials, QUICK_TRIALS)
        return RunConfig.from_dict(d)


def protocol_config(**overrides) -> RunConfig:
    """Five stand-in phantoms on [0, 1] rad, four SNR levels, four methods, ten trials."""
    d = {
        "phantoms": [{"kind": k, "phase_range": [0.0, 1.0], "seed": i} for i, k in enumerate(KINDS)],
        "methods": {"tikhonov": {"alpha": 1e-4}, "tv": {}, "dsp-hqs": {}, "dsp-rld": {}},
    }
    d.update(overrides)
    return RunConfig.from_dict(d)


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.10g}"


def _run_cell(args) -> list[dict]:
    cfg_dict, p_idx, s_idx, trial = args
    cfg = RunConfig.from_dict(cfg_dict)
    settings = optics_settings(cfg_dict)
    pid = cfg.phantom_ids[p_idx]
    level = float(cfg.snr_db[s_idx])
    rows = []

    def fail(method, reason):
        rows.append(
            {"phantom": pid, "snr_db": _fmt(level), "method": method, "trial": trial,
             "lsnr_db": "", "wall_ms": "", "alpha_used": "", "beta_used": "",
             "status": f"error: {reason}"}
        )

    try:
        tfs = transfer_functions_for(settings)
        phase = generate_phantom(cfg.phantom_spec(cfg.phantoms[p_idx], settings["optics"].width))
        seed = derive_seed(cfg.master_seed, p_idx, s_idx, trial)
        stack = add_stack_noise(simulate_stack(phase, tfs), NoiseSpec(cfg.noise_mode, level, seed))
        noise = estimate_noise(stack)
    except Exception as exc:  # the whole cell is lost
        for method in cfg.methods:
            fail(method, f"{type(exc).__name__}: {exc}")
        return rows

    for method, params in cfg.methods.items():
        try:
            rec = reconstruct(stack, method, params, noise=noise)
            score = lsnr(phase, rec.phase).lsnr_db
            if not np.isfinite(score):
                raise FloatingPointError("non-finite LSNR")
        except Exception as exc:
            fail(method, f"{type(exc).__name__}: {exc}")
            continue
        rows.append(
            {"phantom": pid, "snr_db": _fmt(level), "method": method, "trial": trial,
             "lsnr_db": f"{score:.6f}", "wall_ms": f"{rec.wall_ms:.1f}",
             "alpha_used": _fmt(rec.alpha_used), "beta_used": _fmt(rec.beta_used),
             "status": "ok"}
        )
    return rows


def run_benchmark(cfg: RunConfig, jobs: int = 1, progress=None) -> list[dict]:
    """Execute every cell; records come back in canonical order."""
    if jobs < 1:
        raise ConfigurationError("jobs must be at least 1")
    cfg_dict = cfg.to_dict()
    tasks = [
        (cfg_dict, p, s, t)
        for p in range(len(cfg.phantoms))
        for s in range(len(cfg.snr_db))
        for t in range(cfg.trials)
    ]
    results = {}
    if jobs == 1:
        for task in tasks:
            results[task[1:]] = _run_cell(task)
            if progress:
                progress(len(results), len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for task, rows in zip(tasks, pool.map(_run_cell, tasks)):
                results[task[1:]] = rows
                if progress:
                    progress(len(results), len(tasks))
    order = {m: i for i, m in enumerate(cfg.methods)}
    records = [r for rows in results.values() for r in rows]
    # canonical order: phantom, snr, method, trial
    records.sort(
        key=lambda r: (cfg.phantom_ids.index(r["phantom"]), float(r["snr_db"]),
                       order[r["method"]], r["trial"])
    )
    return records


def _stats(values):
    n = len(values)
    mean = float(np.mean(values)) if n else float("nan")
    std = float(np.std(values, ddof=1)) if n > 1 else float("nan")
    return n, mean, std


def summarize(records: list[dict], cfg: RunConfig) -> dict:
    """Mean and sample std per cell, plus per-SNR averages over phantoms."""
    ok = [r for r in records if r["status"] == "ok"]
    cells, averages = [], []
    for pid in cfg.phantom_ids:
        for level in cfg.snr_db:
            for method in cfg.methods:
                rows = [r for r in ok if r["phantom"] == pid and float(r["snr_db"]) == float(level)
                        and r["method"] == method]
                n, mean, std = _stats([float(r["lsnr_db"]) for r in rows])
                wall = float(np.mean([float(r["wall_ms"]) for r in rows])) if rows else float("nan")
                cells.append({"phantom": pid, "snr_db": float(level), "method": method, "n": n,
                              "mean_lsnr_db": mean, "std_lsnr_db": std, "mean_wall_ms": wall})
    for level in cfg.snr_db:
        for method in cfg.methods:
            rows = [r for r in ok if float(r["snr_db"]) == float(level) and r["method"] == method]
            n, mean, std = _stats([float(r["lsnr_db"]) for r in rows])
            averages.append({"phantom": "average", "snr_db": float(level), "method": method,
                             "n": n, "mean_lsnr_db": mean, "std_lsnr_db": std})
    failed = len(records) - len(ok)
    return {"cells": cells, "averages": averages, "failed": failed, "total": len(records),
            "config": cfg.to_dict()}


def write_outputs(records: list[dict], summary: dict, cfg: RunConfig, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RECORD_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(records)
    cols = ("phantom", "snr_db", "method", "n", "mean_lsnr_db", "std_lsnr_db", "mean_wall_ms")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for c in summary["cells"]:
            w.writerow([c["phantom"], _fmt(c["snr_db"]), c["method"], c["n"],
                        _fmt(c["mean_lsnr_db"]), _fmt(c["std_lsnr_db"]), _fmt(c["mean_wall_ms"])])
    with open(out / "table.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        methods = list(cfg.methods)
        w.writerow(["phantom", "snr_db", *methods])
        for group, rows in (("cells", summary["cells"]), ("averages", summary["averages"])):
            for pid in dict.fromkeys(r["phantom"] for r in rows):
                for level in cfg.snr_db:
                    sel = {r["method"]: r for r in rows
                           if r["phantom"] == pid and r["snr_db"] == float(level)}
                    w.writerow([pid, _fmt(float(level))] + [
                        f"{sel[m]['mean_lsnr_db']:.3f} ± {sel[m]['std_lsnr_db']:.3f}"
                        if sel[m]["n"] > 1 else _fmt(sel[m]["mean_lsnr_db"]) for m in methods
                    ])
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2) + "\n")


def _jsonable(obj):
    """Replace NaN (undefined std for n < 2, empty cells) by null."""
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_jsonable(v) for v in obj]
    return obj


def failure_fraction(summary: dict) -> float:
    return summary["failed"] / summary["total"] if summary["total"] else 0.0
