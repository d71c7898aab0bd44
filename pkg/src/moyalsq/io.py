"""Snapshots, CSV tables and run manifests.

Snapshot layout (little-endian), version 1::

    magic  b"MSQS"
    u16    version
    u32    cutoff N
    f64    time
    u16    number of fields F
    F times: u16 name length, utf-8 name, (N+1)^2 complex64 row-major

A JSON sidecar ``<file>.json`` records the parameters and field names.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import struct
import time
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

MAGIC = b"MSQS"
SNAPSHOT_VERSION = 1


def write_snapshot(path: str | Path, t: float, fields: Mapping[str, np.ndarray], params: Mapping[str, Any]) -> Path:
    path = Path(path)
    arrays = {k: np.asarray(v) for k, v in fields.items()}
    sizes = {a.shape for a in arrays.values()}
    if len(sizes) != 1:
        raise ValueError("all fields must share one shape")
    (shape,) = sizes
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError("fields must be square matrices")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HIdH", SNAPSHOT_VERSION, shape[0] - 1, float(t), len(arrays)))
        for name, a in arrays.items():
            raw = name.encode()
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(np.ascontiguousarray(a, dtype="<c8").tobytes())
    side = {"version": SNAPSHOT_VERSION, "t": float(t), "cutoff": shape[0] - 1, "fields": list(arrays), "params": dict(params)}
    path.with_name(path.name + ".json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return path


def read_snapshot(path: str | Path) -> tuple[float, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a snapshot file")
    version, cutoff, t, count = struct.unpack_from("<HIdH", data, 4)
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    pos = 4 + struct.calcsize("<HIdH")
    size = cutoff + 1
    nbytes = size * size * 8
    fields = {}
    for _ in range(count):
        (ln,) = struct.unpack_from("<H", data, pos)
        pos += 2
        name = data[pos : pos + ln].decode()
        pos += ln
        fields[name] = np.frombuffer(data[pos : pos + nbytes], dtype="<c8").reshape(size, size).astype(complex)
        pos += nbytes
    return t, fields


def _fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """CSV with round-trip float formatting, so identical data gives identical bytes."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(x) for x in row])
    return path


def write_columns(path: str | Path, columns: Mapping[str, Sequence[Any]]) -> Path:
    names = list(columns)
    return write_csv(path, names, zip(*(columns[k] for k in names)))


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(head):
        col = [r[j] for r in body]
        try:
            out[name] = np.array([float(x) for x in col])
        except ValueError:
            out[name] = np.array(col, dtype=object)
    return out


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def versions() -> dict[str, str]:
    import matplotlib
    import scipy

    from . import __version__

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "matplotlib": matplotlib.__version__,
        "moyalsq": __version__,
    }


def write_manifest(
    directory: str | Path,
    command: str,
    config_text: str,
    seed: int,
    outputs: Sequence[str | Path],
    started: float,
    extra: Mapping[str, Any] | None = None,
) -> Path:
    """``manifest.json`` with everything needed to reproduce the outputs."""
    directory = Path(directory)
    doc = {
        "command": command,
        "config_sha256": config_hash(config_text),
        "config": config_text,
        "seed": int(seed),
        "versions": versions(),
        "wall_time_s": round(time.perf_counter() - started, 6),
        "outputs": sorted(Path(p).name for p in outputs),
    }
    if extra:
        doc["summary"] = dict(extra)
    path = directory / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(x: Any) -> Any:
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")
