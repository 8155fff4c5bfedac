"""Files on disk and a small benchmark sweep, driven through the CLI entry point.

Simulates a dataset with a checksummed manifest, reconstructs it, asks the
sensor for its weights, and runs a reduced comparison sweep whose CSV output
is identical for any worker count.

    python demos/06_benchmark_and_files.py [work_dir]
"""

import json
import sys
from pathlib import Path

from sparsedpc.cli import main

work = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_cli")
work.mkdir(parents=True, exist_ok=True)

sim = {
    "optics": {"width": 128, "height": 128},
    "phantom": {"kind": "bar-target", "phase_range": [0, 1]},
    "noise": {"mode": "snr-db", "level": 15, "seed": 3},
}
(work / "sim.json").write_text(json.dumps(sim, indent=2))
main(["simulate", str(work / "sim.json"), "--out", str(work / "data")])
main(["sensor", str(work / "data" / "manifest.json")])
for method in ("tikhonov", "dsp-hqs"):
    main(["reconstruct", str(work / "data" / "manifest.json"), "--method", method,
          "--out", str(work / f"recon_{method}")])

bench = {
    "optics": {"width": 64, "height": 64},
    "phantoms": [{"kind": "siemens-star", "phase_range": [0, 1]},
                 {"kind": "binary-blobs", "phase_range": [0, 1], "seed": 1, "id": "blobs"}],
    "snr_db": [10, 20],
    "methods": {"tikhonov": {"alpha": 1e-4}, "tv": {}, "dsp-hqs": {}, "dsp-rld": {}},
    "trials": 2,
    "master_seed": 7,
}
(work / "bench.json").write_text(json.dumps(bench, indent=2))
main(["benchmark", str(work / "bench.json"), "--out", str(work / "bench"), "--quiet"])
print((work / "bench" / "table.csv").read_text())
