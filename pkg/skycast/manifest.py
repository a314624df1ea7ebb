"""
Skycast - Run manifests
Digests, seeds, outputs and wall time of one CLI command.
"""
import datetime as dt
import hashlib
import json
import logging
import os
import time
from typing import Any, Dict, Optional

from . import __version__
from .schema.manifest import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ManifestRecorder:
    """Collects what a command read and wrote, then writes manifest.json."""

    def __init__(self, command: str, config_hash: str, config: Optional[Dict[str, Any]] = None,
                 seeds: Optional[Dict[str, int]] = None):
        self.manifest = RunManifest(
            command=command,
            config_hash=config_hash,
            seeds=dict(seeds or {}),
            code_version=__version__,
            started_at=dt.datetime.now(dt.timezone.utc).isoformat(),
            config=config or {},
        )
        self._started = time.perf_counter()

    def add_input(self, path: Optional[str]):
        if path and os.path.isfile(path):
            self.manifest.input_digests[os.path.abspath(path)] = file_digest(path)

    def add_output(self, path: str):
        self.manifest.outputs.append(os.path.abspath(path))

    def add_outputs(self, paths):
        for path in paths:
            self.add_output(path)

    def write(self, out_dir: str, status: str = "ok") -> str:
        self.manifest.status = status
        self.manifest.wall_time_s = time.perf_counter() - self._started
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, MANIFEST_FILE)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.manifest.to_dict(), f, indent=2)
        logger.info(f"🧾 Manifest written to {path} ({self.manifest.wall_time_s:.1f} s)")
        return path


def read_manifest(path: str) -> RunManifest:
    with open(path, "r", encoding="utf-8") as f:
        return RunManifest.from_dict(json.load(f))
