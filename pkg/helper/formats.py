"""
Run directories, manifests and report files.

A run directory holds:
    config.yaml        normalized experiment config
    mask.frlm          binary mask, mask.json its descriptor
    snapshot_*.frlb    snapshots at the cadence (unless disabled)
    probes.csv         probe samples
    manifest.json      config hash, versions, step data, snapshot index
"""

import csv
import json
import logging
import math
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import scipy

from spreading.errors import CorruptSnapshotError
from spreading.solver import RunRecord
from spreading.storage import (
    read_descriptor,
    read_mask_binary,
    read_snapshot_header,
    write_descriptor,
    write_mask_binary,
)

from .config import ExperimentConfig, config_hash, dump_config, parse_config

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def make_serializable(obj: Any) -> Any:
    """Recursively convert objects to JSON-serializable format"""
    if isinstance(obj, dict):
        return {str(key): make_serializable(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [make_serializable(item) for item in obj]
    elif isinstance(obj, np.ndarray):
        return make_serializable(obj.tolist())
    elif isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    elif isinstance(obj, (np.integer,)):
        return int(obj)
    elif isinstance(obj, (float, np.floating)):
        value = float(obj)
        # JSON has no inf or nan
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    elif isinstance(obj, Path):
        return str(obj)
    elif hasattr(obj, "to_dict"):
        return make_serializable(obj.to_dict())
    elif hasattr(obj, "__dict__"):
        return {key: make_serializable(value) for key, value in obj.__dict__.items()}
    else:
        try:
            json.dumps(obj)
            return obj
        except (TypeError, ValueError):
            return str(obj)


def save_json(payload: Any, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(make_serializable(payload), indent=2, sort_keys=True) + "\n")
    return path


def write_rows_csv(rows: Sequence[Dict[str, Any]], path) -> Path:
    """Write dict rows with the union of their keys as header, in first-seen order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header: List[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=header)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: make_serializable(v) for k, v in row.items()})
    return path


def package_version() -> str:
    try:
        from ._version import version
        return version
    except ImportError:
        pass
    try:
        return metadata.version("lv-spreading-toolkit")
    except metadata.PackageNotFoundError:
        return "0.0.0+unknown"


def versions() -> Dict[str, str]:
    return {"lv-spreading-toolkit": package_version(), "numpy": np.__version__, "scipy": scipy.__version__}


def run_manifest(run: RunRecord, config: ExperimentConfig) -> Dict[str, Any]:
    return {
        "config_hash": config_hash(config),
        "config": config.to_dict(),
        "versions": versions(),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_time": run.wall_time,
        "dt": run.dt,
        "steps": run.steps,
        "edge_contacts": dict(run.edge_contacts),
        "times": list(run.times),
        "snapshots": [Path(p).name for p in run.snapshot_paths],
        "mask": {"binary": "mask.frlm", "descriptor": "mask.json", "inside_count": run.mask.inside_count},
        "probes": "probes.csv" if run.probe_rows else None,
    }


def write_run(run: RunRecord, config: ExperimentConfig, run_dir) -> Path:
    """
    Write everything except the snapshots, which evolve already streamed
    into run_dir.

    Returns:
        Path: the manifest file
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    dump_config(config, run_dir / "config.yaml")
    write_mask_binary(run_dir / "mask.frlm", run.mask)
    write_descriptor(run_dir / "mask.json", run.mask)
    if run.probe_rows:
        run.write_probes_csv(run_dir / "probes.csv")
    manifest = save_json(run_manifest(run, config), run_dir / MANIFEST)
    logger.info("run written to %s (%d snapshots)", run_dir, len(run.times))
    return manifest


def load_run(run_dir) -> RunRecord:
    """
    Rebuild a RunRecord backed by the snapshot files of a run directory.

    Raises:
        FileNotFoundError: no manifest in run_dir
        CorruptSnapshotError: a listed snapshot is missing or malformed
    """
    run_dir = Path(run_dir)
    manifest_path = run_dir / MANIFEST
    if not manifest_path.exists():
        raise FileNotFoundError(f"no {MANIFEST} in {run_dir}")
    manifest = json.loads(manifest_path.read_text())
    config = parse_config(manifest["config"])
    descriptor = read_descriptor(run_dir / manifest["mask"]["descriptor"])
    mask = read_mask_binary(run_dir / manifest["mask"]["binary"], descriptor)
    times = [float(t) for t in manifest["times"]]
    names = manifest["snapshots"]
    if not names:
        raise CorruptSnapshotError(run_dir, "run was written without snapshot files")
    if len(names) != len(times):
        raise CorruptSnapshotError(run_dir, f"{len(names)} snapshot files for {len(times)} times")
    paths = []
    for name, t in zip(names, times):
        header = read_snapshot_header(run_dir / name)
        if header["nx"] != mask.nx or header["ny"] != mask.ny:
            raise CorruptSnapshotError(run_dir / name, "grid does not match the mask")
        if abs(header["t"] - t) > 1e-9 * max(1.0, abs(t)):
            raise CorruptSnapshotError(run_dir / name, f"time {header['t']} does not match manifest {t}")
        paths.append(run_dir / name)
    return RunRecord(mask=mask, params=config.params, config=config.solver, times=times, snapshot_paths=paths,
                     dt=float(manifest["dt"]), steps=int(manifest["steps"]),
                     edge_contacts=dict(manifest["edge_contacts"]), wall_time=float(manifest["wall_time"]))
