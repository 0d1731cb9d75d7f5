"""Run manifests: what was run, with which inputs, producing which files."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__

__all__ = ["RunManifest", "sha256_file", "utc_now"]


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    model: dict
    parameters: dict
    seed: int | None = None
    tool_version: str = __version__
    started: str = field(default_factory=utc_now)
    finished: str | None = None
    outputs: dict = field(default_factory=dict)

    def add_output(self, path) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def verify(self, directory) -> bool:
        """True when every listed output exists in ``directory`` with the recorded digest."""
        directory = Path(directory)
        return all(
            (directory / name).exists() and sha256_file(directory / name) == digest
            for name, digest in self.outputs.items()
        )

    def write(self, path) -> Path:
        self.finished = utc_now()
        path = Path(path)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def read(cls, path) -> RunManifest:
        return cls(**json.loads(Path(path).read_text()))
