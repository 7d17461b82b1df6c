"""Versioned on-disk artifact files: JSON header + flat numpy arrays + checksum."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class ArtifactError(ValueError):
    pass


def _digest(arrays: dict[str, np.ndarray]) -> str:
    h = hashlib.sha256()
    for name in sorted(arrays):
        h.update(name.encode("utf-8"))
        h.update(str(arrays[name].dtype).encode())
        h.update(str(arrays[name].shape).encode())
        h.update(np.ascontiguousarray(arrays[name]).tobytes())
    return h.hexdigest()


def save_artifact(path: str | Path, kind: str, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    """Write an npz with a JSON meta entry and a checksum over all arrays."""
    header = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "checksum": _digest(arrays),
        "meta": meta,
    }
    payload = {f"arr_{k}": v for k, v in arrays.items()}
    payload["__header__"] = np.frombuffer(
        json.dumps(header, ensure_ascii=False).encode("utf-8"), dtype=np.uint8
    )
    np.savez(path, **payload)


def load_artifact(path: str | Path, kind: str) -> tuple[dict, dict[str, np.ndarray]]:
    """Load and verify an artifact; returns (meta, arrays)."""
    with np.load(path, allow_pickle=False) as z:
        header = json.loads(bytes(z["__header__"]).decode("utf-8"))
        arrays = {k[4:]: z[k] for k in z.files if k.startswith("arr_")}
    if header.get("format_version") != FORMAT_VERSION:
        raise ArtifactError(f"{path}: unsupported format version")
    if header.get("kind") != kind:
        raise ArtifactError(f"{path}: expected {kind!r} artifact, got {header.get('kind')!r}")
    if header.get("checksum") != _digest(arrays):
        raise ArtifactError(f"{path}: checksum mismatch (corrupt artifact)")
    return header["meta"], arrays


def artifact_checksum(path: str | Path) -> str:
    with np.load(path, allow_pickle=False) as z:
        header = json.loads(bytes(z["__header__"]).decode("utf-8"))
    return header["checksum"]
