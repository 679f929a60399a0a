"""
Run manifests for deltajet outputs.

Every result file embeds a manifest: the command, the full parameter set, a
SHA-256 digest of each input and the tool version. The manifest digest is a
hash commitment to all of these, taken over deterministic JSON, so two runs
with equal manifest digests must produce byte-identical results.
"""

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


def canonical_json(value: Any) -> str:
    """Deterministic serialization: sorted keys, no whitespace variation."""
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, separators=(",", ":"), default=str)


def digest(value: Any) -> str:
    """SHA-256 of the canonical serialization of value."""
    return hashlib.sha256(canonical_json(value).encode()).hexdigest()


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """
    What produced a result file.

    Args:
        command: subcommand name, e.g. "witt mul"
        params: every parameter the command used (p, N, m, caps, ...)
        inputs: {input name: SHA-256 digest}
        version: deltajet version string
        wall_time: seconds spent; recorded but excluded from the digest
    """

    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)
    version: str = ""
    wall_time: Optional[float] = None

    def add_input_file(self, name: str, path: str) -> None:
        self.inputs[name] = file_digest(path)

    def add_input_value(self, name: str, value: Any) -> None:
        self.inputs[name] = digest(value)

    def body(self) -> Dict[str, Any]:
        return {"command": self.command, "params": self.params,
                "inputs": self.inputs, "version": self.version}

    @property
    def digest(self) -> str:
        return digest(self.body())

    def to_json(self) -> Dict[str, Any]:
        data = self.body()
        data["digest"] = self.digest
        data["wall_time"] = self.wall_time
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "RunManifest":
        return cls(data["command"], dict(data.get("params", {})), dict(data.get("inputs", {})),
                   data.get("version", ""), data.get("wall_time"))

    def verify(self, recorded: str) -> bool:
        """True if a recorded digest matches this manifest."""
        return self.digest == recorded


class Stopwatch:
    """Context manager filling a manifest's wall time."""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest
        self._start = 0.0

    def __enter__(self) -> RunManifest:
        self._start = time.perf_counter()
        return self.manifest

    def __exit__(self, *exc) -> bool:
        self.manifest.wall_time = round(time.perf_counter() - self._start, 6)
        logger.debug("%s finished in %.3fs", self.manifest.command, self.manifest.wall_time)
        return False


def render(result: Any, manifest: RunManifest) -> str:
    """The text of a result file: the result with its manifest, pretty-printed JSON."""
    return json.dumps({"manifest": manifest.to_json(), "result": result},
                      indent=2, sort_keys=True, default=str)


def read_result(path: str) -> Dict[str, Any]:
    """Load a result file and check that its manifest digest is consistent."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    manifest = RunManifest.from_json(data["manifest"])
    if not manifest.verify(data["manifest"].get("digest", "")):
        raise ValueError(f"manifest digest mismatch in {path}")
    return data
