"""Run manifests: what went in, what came out, and with which parameters."""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

__all__ = ["sha256_file", "build_manifest", "write_manifest"]

from . import __version__


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(config_path, parameters: dict, inputs, outputs, notes=()) -> dict:
    config_path = Path(config_path)
    return {
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "code_version": __version__,
        "config_path": str(config_path),
        "config_sha256": sha256_file(config_path),
        "parameters": parameters,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": {str(Path(p).name): sha256_file(p) for p in outputs},
        "notes": list(notes),
    }


def write_manifest(out_dir, manifest: dict) -> Path:
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
