"""
Result Cache Module
Content-addressed on-disk store for weight-2 lattices and other expensive payloads
"""

from pathlib import Path
import hashlib
import json
import logging
import sys
import os
import tempfile
import threading

import pandas as pd

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


def canonical_json(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), default=str)


def checksum(value) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


class ResultCache:
    """JSON entries under <root>/<kind>/<key>.json

    The key hashes (kind, level, character key, order, precision, engine version),
    so a version bump makes every older entry unreachable; evict(stale=True) removes them.
    """

    def __init__(self, root=None, version: str = ENGINE_VERSION):
        self.root = Path(root) if root is not None else DEFAULT_CACHE_DIR
        self.version = version
        self.hits = 0
        self.misses = 0
        self._counter_lock = threading.Lock()

    def _count(self, hit: bool):
        with self._counter_lock:
            if hit:
                self.hits += 1
            else:
                self.misses += 1

    def key(self, kind: str, *parts) -> str:
        return checksum([kind, [list(p) if isinstance(p, tuple) else p for p in parts], self.version])

    def path(self, kind: str, *parts) -> Path:
        return self.root / kind / f"{self.key(kind, *parts)}.json"

    def get(self, kind: str, *parts):
        """Payload or None; corrupt or foreign-version entries count as misses"""
        path = self.path(kind, *parts)
        if not path.exists():
            self._count(False)
            return None
        try:
            with open(path) as handle:
                entry = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Unreadable cache entry {path.name}: {e}")
            self._count(False)
            return None
        if entry.get("version") != self.version or entry.get("checksum") != checksum(entry.get("payload")):
            logger.warning(f"Cache entry {path.name} failed its checksum or version check; rebuilding")
            self._count(False)
            return None
        self._count(True)
        return entry["payload"]

    def put(self, kind: str, *parts, payload):
        """Atomic write-rename so concurrent readers never see partial files"""
        path = self.path(kind, *parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"kind": kind, "parts": [list(p) if isinstance(p, tuple) else p for p in parts],
                 "version": self.version, "checksum": checksum(payload), "payload": payload}
        with tempfile.NamedTemporaryFile("w", dir=path.parent, prefix=path.stem, suffix=".tmp",
                                         delete=False) as handle:
            handle.write(canonical_json(entry))
        os.replace(handle.name, path)
        logger.debug(f"Cached {kind} entry {path.name}")

    def entries(self) -> list:
        if not self.root.exists():
            return []
        return sorted(self.root.glob("*/*.json"))

    def _read(self, path: Path):
        try:
            with open(path) as handle:
                return json.load(handle)
        except (OSError, json.JSONDecodeError):
            return None

    def verify(self) -> list:
        """Paths whose checksum no longer matches their payload"""
        corrupt = []
        for path in self.entries():
            entry = self._read(path)
            if entry is None or entry.get("checksum") != checksum(entry.get("payload")):
                corrupt.append(path)
                logger.warning(f"Corrupt cache entry: {path}")
        logger.info(f"Verified {len(self.entries())} cache entries, {len(corrupt)} corrupt")
        return corrupt

    def evict(self, kind: str = None, stale: bool = False, corrupt: bool = False) -> int:
        """Delete entries: all of them, one kind, other engine versions, or failed checksums"""
        bad = set(self.verify()) if corrupt else set()
        removed = 0
        for path in self.entries():
            if kind is not None and path.parent.name != kind:
                continue
            if stale or corrupt:
                entry = self._read(path)
                is_stale = stale and (entry is None or entry.get("version") != self.version)
                if not (is_stale or path in bad):
                    continue
            path.unlink()
            removed += 1
        logger.info(f"Evicted {removed} cache entries from {self.root}")
        return removed

    def status(self) -> pd.DataFrame:
        """One row per (kind, version) with entry counts and bytes on disk"""
        rows = []
        for path in self.entries():
            entry = self._read(path) or {}
            rows.append({"kind": path.parent.name, "version": entry.get("version", "unreadable"),
                         "entries": 1, "bytes": path.stat().st_size})
        if not rows:
            return pd.DataFrame(columns=["kind", "version", "entries", "bytes"])
        frame = pd.DataFrame(rows)
        return frame.groupby(["kind", "version"], as_index=False)[["entries", "bytes"]].sum()

    def warm(self, levels, compute) -> int:
        """Run compute(N) for every level so later runs only read; returns the new entry count"""
        before = len(self.entries())
        for N in levels:
            compute(N)
        added = len(self.entries()) - before
        logger.info(f"Warmed cache with {added} new entries")
        return added
