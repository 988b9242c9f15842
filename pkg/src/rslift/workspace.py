"""Workspace plumbing: configuration, cache directory, artifact manifest.

Artifacts are canonical JSON (sorted keys, tight separators, one trailing
newline) written atomically via a temp file and os.replace.  The manifest
maps a content key derived from the full request to the artifact file;
entries are never overwritten, so repeating a request is a cache hit that
hands back the originally written bytes.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

ENV_CACHE = "RSLIFT_CACHE_DIR"
CONFIG_NAME = "rslift.cfg"
MANIFEST_NAME = "manifest.json"

# hard fallbacks when neither the command line nor the config file speaks
DEFAULTS = {"p": "5", "k": "2", "dmax": "400", "precision": "25"}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def atomic_write_text(path: Path, text: str) -> None:
    """Write-and-replace so readers never see a half-written file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_config(text: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno} is not key=value: {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def content_key(kind: str, params: dict) -> str:
    return hashlib.sha256(canonical_json({"kind": kind, "params": params}).encode()).hexdigest()


@dataclass
class Workspace:
    root: Path
    cache_dir: Path
    config: dict[str, str]

    @classmethod
    def open(cls, root: str | Path = ".", cache_override: str | None = None) -> "Workspace":
        root = Path(root)
        cfg_path = root / CONFIG_NAME
        config = parse_config(cfg_path.read_text()) if cfg_path.is_file() else {}
        cache = cache_override or os.environ.get(ENV_CACHE) or config.get("cache_dir")
        cache_dir = Path(cache) if cache else root / ".rslift-cache"
        cache_dir.mkdir(parents=True, exist_ok=True)
        return cls(root, cache_dir, config)

    def setting(self, name: str) -> str:
        if name in self.config:
            return self.config[name]
        if name in DEFAULTS:
            return DEFAULTS[name]
        raise KeyError(f"no setting named {name!r}")

    def setting_int(self, name: str) -> int:
        try:
            return int(self.setting(name))
        except ValueError:
            raise ValueError(f"config value for {name!r} is not an integer") from None

    # -- manifest -----------------------------------------------------------

    @property
    def manifest_path(self) -> Path:
        return self.cache_dir / MANIFEST_NAME

    def manifest(self) -> dict:
        if self.manifest_path.is_file():
            return json.loads(self.manifest_path.read_text())
        return {"entries": {}}

    def fetch(self, kind: str, params: dict, builder: Callable[[], dict]) -> tuple[Path, bool]:
        """Return (artifact path, cache hit) for the given request.

        On a miss the builder runs once and its canonical JSON is stored;
        on a hit the stored file is returned untouched, so identical
        requests always yield byte-identical artifacts.
        """
        key = content_key(kind, params)
        manifest = self.manifest()
        entry = manifest["entries"].get(key)
        if entry is not None:
            path = self.cache_dir / entry["file"]
            if path.is_file():
                return path, True
        fname = f"{kind}-{key[:12]}.json"
        path = self.cache_dir / fname
        atomic_write_text(path, canonical_json(builder()))
        manifest = self.manifest()
        if key not in manifest["entries"]:
            manifest["entries"][key] = {"kind": kind, "file": fname, "params": params}
            atomic_write_text(self.manifest_path, canonical_json(manifest))
        return path, False
