"""
Binary and text codecs for snapshots and masks.

Snapshot layout (little-endian):
    magic b"FRLB", version u32, nx u32, ny u32, h f64, origin 2 x f64,
    t f64, species count u32, then row-major f64 values per species.
"""

import json
import struct
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from .domain import DomainMask
from .errors import CorruptSnapshotError

SNAPSHOT_MAGIC = b"FRLB"
SNAPSHOT_VERSION = 1
SNAPSHOT_HEADER = struct.Struct("<4sIIIddddI")

MASK_MAGIC = b"FRLM"
MASK_VERSION = 1
MASK_HEADER = struct.Struct("<4sIIIddd")


def write_snapshot(path, t: float, u: np.ndarray, v: np.ndarray, mask: DomainMask) -> Path:
    path = Path(path)
    header = SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, mask.nx, mask.ny, mask.h,
                                  mask.origin[0], mask.origin[1], float(t), 2)
    with open(path, "wb") as f:
        f.write(header)
        for field in (u, v):
            f.write(np.ascontiguousarray(field, dtype="<f8").tobytes())
    return path


def read_snapshot(path) -> Tuple[Dict, np.ndarray, np.ndarray]:
    """
    Read a snapshot file.

    Returns:
        tuple: (header dict, u, v)

    Raises:
        CorruptSnapshotError: bad magic, unsupported version, or truncated body
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CorruptSnapshotError(path, f"unreadable ({exc})") from exc
    if len(raw) < SNAPSHOT_HEADER.size:
        raise CorruptSnapshotError(path, "truncated header")
    magic, version, nx, ny, h, ox, oy, t, species = SNAPSHOT_HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise CorruptSnapshotError(path, f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise CorruptSnapshotError(path, f"unsupported version {version}")
    expected = SNAPSHOT_HEADER.size + species * nx * ny * 8
    if len(raw) != expected:
        raise CorruptSnapshotError(path, f"size {len(raw)} != expected {expected}")
    body = np.frombuffer(raw, dtype="<f8", offset=SNAPSHOT_HEADER.size).reshape(species, ny, nx)
    header = {"nx": nx, "ny": ny, "h": h, "origin": (ox, oy), "t": t, "species": species}
    return header, body[0].astype(np.float64), body[1].astype(np.float64)


def read_snapshot_header(path) -> Dict:
    """Check magic, version and file size without loading the fields."""
    path = Path(path)
    try:
        with open(path, "rb") as f:
            raw = f.read(SNAPSHOT_HEADER.size)
        size = path.stat().st_size
    except OSError as exc:
        raise CorruptSnapshotError(path, f"unreadable ({exc})") from exc
    if len(raw) < SNAPSHOT_HEADER.size:
        raise CorruptSnapshotError(path, "truncated header")
    magic, version, nx, ny, h, ox, oy, t, species = SNAPSHOT_HEADER.unpack(raw)
    if magic != SNAPSHOT_MAGIC:
        raise CorruptSnapshotError(path, f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise CorruptSnapshotError(path, f"unsupported version {version}")
    expected = SNAPSHOT_HEADER.size + species * nx * ny * 8
    if size != expected:
        raise CorruptSnapshotError(path, f"size {size} != expected {expected}")
    return {"nx": nx, "ny": ny, "h": h, "origin": (ox, oy), "t": t, "species": species}


def write_mask_text(path, mask: DomainMask) -> Path:
    """Bitmap-style text: header 'nx ny h ox oy', then one row of 0/1 per line, row-major."""
    path = Path(path)
    lines = [f"{mask.nx} {mask.ny} {mask.h!r} {mask.origin[0]!r} {mask.origin[1]!r}"]
    lines.extend("".join("1" if c else "0" for c in row) for row in mask.inside)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_mask_text(path, descriptor: Dict = None) -> DomainMask:
    lines = Path(path).read_text().splitlines()
    nx, ny, h, ox, oy = lines[0].split()
    rows = lines[1:1 + int(ny)]
    inside = np.array([[c == "1" for c in row] for row in rows], dtype=bool)
    if inside.shape != (int(ny), int(nx)):
        raise ValueError(f"mask body shape {inside.shape} does not match header {(int(ny), int(nx))}")
    return DomainMask(inside, float(h), (float(ox), float(oy)), descriptor or {})


def write_mask_binary(path, mask: DomainMask) -> Path:
    path = Path(path)
    header = MASK_HEADER.pack(MASK_MAGIC, MASK_VERSION, mask.nx, mask.ny, mask.h, *mask.origin)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.packbits(mask.inside.ravel()).tobytes())
    return path


def read_mask_binary(path, descriptor: Dict = None) -> DomainMask:
    raw = Path(path).read_bytes()
    magic, version, nx, ny, h, ox, oy = MASK_HEADER.unpack_from(raw)
    if magic != MASK_MAGIC or version != MASK_VERSION:
        raise ValueError(f"{path}: not a mask file")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8, offset=MASK_HEADER.size))[: nx * ny]
    return DomainMask(bits.reshape(ny, nx).astype(bool), h, (ox, oy), descriptor or {})


def write_descriptor(path, mask: DomainMask) -> Path:
    path = Path(path)
    payload = dict(mask.descriptor)
    payload.update({"nx": mask.nx, "ny": mask.ny, "h": mask.h, "origin": list(mask.origin),
                    "inside_count": mask.inside_count})
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    return path


def read_descriptor(path) -> Dict:
    return json.loads(Path(path).read_text())
