"""Run manifests: what was computed, from what, with which settings.

Every CLI run writes ``<output>.manifest.json`` next to its primary
output so a result file can be traced back to exact inputs and flags.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

__all__ = ["file_sha256", "write_manifest"]


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    primary_output,
    subcommand: str,
    argv: list[str],
    inputs: list,
    outputs: list,
    policy: str | None = None,
    seed: int | None = None,
    wall_seconds: float | None = None,
) -> str:
    from . import __version__

    payload = {
        "package": "momentrec",
        "version": __version__,
        "subcommand": subcommand,
        "argv": list(argv),
        "inputs": {str(p): file_sha256(p) for p in inputs if Path(p).is_file()},
        "outputs": {str(p): file_sha256(p) for p in outputs if Path(p).is_file()},
        "policy": policy,
        "seed": seed,
        "wall_seconds": wall_seconds,
    }
    out = str(primary_output) + ".manifest.json"
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
