"""On-disk dataset container.

A dataset is a directory holding one manifest.json plus one binary file per
(condition, class) pair. Each binary file stores three records, one per
modality in manifest order. A record is a fixed 16-byte header

    magic  b"MMDG"   4 bytes
    rank   uint32    always 2
    dim0   uint32    number of samples
    dim1   uint32    flattened sample length

followed by dim0 * dim1 little-endian float32 values. Semantic shapes,
sampling rates, labels, and provenance live in the manifest.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import BinaryIO, Mapping

import numpy as np

MAGIC = b"MMDG"
_HEADER = struct.Struct("<4sIII")
MANIFEST_NAME = "manifest.json"


def write_record(fh: BinaryIO, arr: np.ndarray) -> None:
    """Append one [n, flat] float32 record to an open binary stream."""
    a = np.ascontiguousarray(arr, dtype="<f4")
    if a.ndim != 2:
        a = a.reshape(a.shape[0], -1)
    fh.write(_HEADER.pack(MAGIC, 2, a.shape[0], a.shape[1]))
    fh.write(a.tobytes())


def read_record(fh: BinaryIO) -> np.ndarray:
    """Read the next record; raises ValueError on bad magic/rank or truncation."""
    head = fh.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise ValueError("truncated record header")
    magic, rank, d0, d1 = _HEADER.unpack(head)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if rank != 2:
        raise ValueError(f"unsupported rank {rank}")
    payload = fh.read(4 * d0 * d1)
    if len(payload) != 4 * d0 * d1:
        raise ValueError("truncated record payload")
    return np.frombuffer(payload, dtype="<f4").reshape(d0, d1).copy()


def block_filename(condition_id: str, label: int) -> str:
    return f"{condition_id}__class{label}.bin"


def write_dataset(
    out_dir: str | Path,
    manifest: Mapping,
    blocks: Mapping[tuple[str, int], Mapping[str, np.ndarray]],
) -> Path:
    """Write a dataset directory.

    ``blocks`` maps (condition_id, label) to {modality: [n, ...] array}; arrays
    are flattened per sample on disk. The manifest must carry ``modalities``
    (record order) and ``shapes`` (modality -> per-sample shape).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest["blocks"] = []
    for (cond, label), arrays in sorted(blocks.items()):
        fname = block_filename(cond, label)
        with open(out / fname, "wb") as fh:
            for modality in manifest["modalities"]:
                write_record(fh, np.asarray(arrays[modality]))
        n = len(next(iter(arrays.values())))
        manifest["blocks"].append(
            {"file": fname, "condition": cond, "label": int(label), "n": int(n)}
        )
    with open(out / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return out


def read_manifest(path: str | Path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / MANIFEST_NAME
    with open(p) as fh:
        return json.load(fh)


def read_dataset(path: str | Path) -> tuple[dict, dict[tuple[str, int], dict[str, np.ndarray]]]:
    """Read a dataset directory back into (manifest, blocks).

    Arrays are restored to their semantic per-sample shapes from the manifest.
    Raises ValueError if a record's sample count or flattened length disagrees
    with the manifest.
    """
    root = Path(path)
    manifest = read_manifest(root)
    shapes = {m: tuple(s) for m, s in manifest["shapes"].items()}
    blocks: dict[tuple[str, int], dict[str, np.ndarray]] = {}
    for entry in manifest["blocks"]:
        arrays = {}
        with open(root / entry["file"], "rb") as fh:
            for modality in manifest["modalities"]:
                rec = read_record(fh)
                want_flat = int(np.prod(shapes[modality]))
                if rec.shape != (entry["n"], want_flat):
                    raise ValueError(
                        f"{entry['file']}/{modality}: record {rec.shape} but manifest "
                        f"says ({entry['n']}, {want_flat})"
                    )
                arrays[modality] = rec.reshape((entry["n"],) + shapes[modality])
        blocks[(entry["condition"], entry["label"])] = arrays
    return manifest, blocks
