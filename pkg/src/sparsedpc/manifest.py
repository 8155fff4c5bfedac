"""Simulation datasets on disk: PFM planes plus a checksummed JSON manifest.

A manifest records every spec and seed needed to regenerate the data and a
SHA-256 per file. Loading verifies all checksums before any array is used.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ManifestError
from .forward import NoiseSpec, add_stack_noise, simulate_stack
from .operators import DpcStack
from .optics import AXES, OpticalConfig, dpc_transfer_functions
from .pfm import PfmError, read_pfm, write_pfm
from .phantoms import PhantomSpec, generate_phantom

MANIFEST_VERSION = 1


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _entry(root: Path, name: str) -> dict:
    return {"path": name, "sha256": sha256_file(root / name)}


def optics_settings(d: dict) -> dict:
    """Split a config dict into optics, axes, geometry and inner factor."""
    optics = OpticalConfig.from_dict(d.get("optics", {}))
    axes = d.get("axes", ["lr", "tb"])
    if not axes:
        raise ConfigurationError("at least one DPC axis is required")
    return {
        "optics": optics,
        "axes": [_axis(a) for a in axes],
        "geometry": d.get("geometry", "half-disc"),
        "inner_factor": float(d.get("inner_factor", 0.0)),
    }


def _axis(a):
    if a in AXES:
        return a
    try:
        return float(a)
    except (TypeError, ValueError):
        raise ConfigurationError(
            f"axis {a!r} is neither one of {sorted(AXES)} nor an angle in degrees"
        ) from None


def transfer_functions_for(settings: dict):
    return dpc_transfer_functions(
        settings["optics"], settings["axes"], settings["geometry"], settings["inner_factor"]
    )


def simulate_dataset(config: dict, out_dir: str | os.PathLike) -> dict:
    """Generate phantom, clean and noisy DPC stacks and write them with a manifest.

    On any failure the files written so far are removed again.
    """
    known = {"optics", "axes", "geometry", "inner_factor", "phantom", "noise", "output_dir"}
    unknown = set(config) - known
    if unknown:
        raise ConfigurationError(f"unknown simulate config keys: {sorted(unknown)}")
    settings = optics_settings(config)
    optics = settings["optics"]
    pdict = dict(config.get("phantom", {}))
    pdict.setdefault("size", optics.width)
    phantom_spec = PhantomSpec.from_dict(pdict)
    if optics.width != optics.height or phantom_spec.size != optics.width:
        raise ConfigurationError(
            f"phantom size {phantom_spec.size} does not match the "
            f"{optics.height}x{optics.width} optics grid"
        )
    noise_spec = NoiseSpec(**config.get("noise", {}))

    # compute everything before touching the disk
    tfs = transfer_functions_for(settings)
    phase = generate_phantom(phantom_spec)
    clean = simulate_stack(phase, tfs)
    noisy = add_stack_noise(clean, noise_spec)

    root = Path(out_dir)
    created_root = not root.exists()
    root.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def put(name, array):
        write_pfm(root / name, array)
        written.append(root / name)
        return _entry(root, name)

    try:
        manifest = {
            "version": MANIFEST_VERSION,
            "optics": optics.to_dict(),
            "axes": settings["axes"],
            "geometry": settings["geometry"],
            "inner_factor": settings["inner_factor"],
            "phantom": phantom_spec.to_dict(),
            "noise": noise_spec.to_dict(),
            "files": {
                "phantom": put("phantom.pfm", phase),
                "dpc": [put(f"dpc_{n}.pfm", im) for n, im in enumerate(clean.images)],
                "dpc_noisy": [
                    put(f"dpc_noisy_{n}.pfm", im) for n, im in enumerate(noisy.images)
                ],
            },
        }
        path = root / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n")
        written.append(path)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        if created_root and not any(root.iterdir()):
            root.rmdir()
        raise
    return manifest


def _file_entries(manifest: dict):
    files = manifest.get("files", {})
    for key, value in files.items():
        for entry in value if isinstance(value, list) else [value]:
            yield key, entry


def load_manifest(path: str | os.PathLike, verify: bool = True) -> tuple[dict, Path]:
    """Read a manifest and check every listed file against its checksum."""
    path = Path(path)
    try:
        manifest = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    if manifest.get("version") != MANIFEST_VERSION or "files" not in manifest:
        raise ManifestError(f"{path} is not a version-{MANIFEST_VERSION} manifest")
    root = path.parent
    if verify:
        for key, entry in _file_entries(manifest):
            f = root / entry["path"]
            if not f.is_file():
                raise ManifestError(f"{key} file {f} listed in the manifest is missing")
            if sha256_file(f) != entry["sha256"]:
                raise ManifestError(f"checksum of {f} does not match the manifest (stale data)")
    return manifest, root


def load_stack(manifest: dict, root: Path, which: str = "dpc_noisy") -> DpcStack:
    """Rebuild the DPC stack named ``which`` with transfer functions from the optics."""
    if which not in ("dpc", "dpc_noisy"):
        raise ConfigurationError("stack must be 'dpc' or 'dpc_noisy'")
    try:
        images = [read_pfm(root / e["path"]) for e in manifest["files"][which]]
    except (KeyError, PfmError) as exc:
        raise ManifestError(f"cannot load {which} images: {exc}") from exc
    settings = optics_settings(manifest)
    if len(images) != len(settings["axes"]):
        raise ConfigurationError(
            f"{len(images)} images but {len(settings['axes'])} axes in the optics config"
        )
    shapes = {im.shape for im in images}
    if shapes != {settings["optics"].shape}:
        raise ConfigurationError(
            f"image shape(s) {sorted(shapes)} do not match optics {settings['optics'].shape}"
        )
    return DpcStack(np.stack(images), transfer_functions_for(settings))


def load_phantom(manifest: dict, root: Path) -> np.ndarray | None:
    entry = manifest["files"].get("phantom")
    return None if entry is None else read_pfm(root / entry["path"])
