"""Run manifests: what ran, with which inputs, producing which outputs.

Every command that writes files drops a ``*.manifest.json`` next to its
output, recording the argv, the fully resolved configuration, the seeds,
SHA-256 digests of every input file, and the output paths.  Rerunning the
recorded argv against the same inputs reproduces the outputs byte for byte
(the manifest's own timestamp is the only thing that differs between runs).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(config: Mapping) -> str:
    """Stable hash of a resolved configuration mapping."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    seeds: dict[str, int]
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    version: str = ""
    timestamp: str = ""

    def to_json(self) -> str:
        body = {
            "command": self.command,
            "argv": self.argv,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "seeds": self.seeds,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "version": self.version,
            "timestamp": self.timestamp,
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def build_manifest(
    command: str,
    argv: Iterable[str],
    config: Mapping,
    seeds: Mapping[str, int],
    input_paths: Iterable[str | Path],
    output_paths: Iterable[str | Path],
    version: str,
) -> RunManifest:
    return RunManifest(
        command=command,
        argv=[str(a) for a in argv],
        config=dict(config),
        seeds=dict(seeds),
        inputs={str(p): sha256_file(p) for p in input_paths},
        outputs=[str(p) for p in output_paths],
        version=version,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def write_manifest(path: str | Path, manifest: RunManifest) -> None:
    atomic_write_text(path, manifest.to_json())
