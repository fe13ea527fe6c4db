"""Coefficient memo tables and the persistent coefficient store.

Store format (version 1): a JSON-lines file. The first line is the header
``{"format": "bianchi-coefficient-cache", "version": 1}``; every further line
is one record, either

    {"kind": "coefficient", "form": label, "d": d, "gen": [a, b], "value": "..."}
    {"kind": "newform", "label": label, "data": {...}}

Records are only ever appended. Re-inserting an identical record is a no-op;
re-inserting a different value under an existing key raises CacheConflict.
"""
import json
import logging
from pathlib import Path
from threading import Lock
from typing import Any, Callable, Dict, Hashable, Optional, Tuple

import config
from errors import CacheConflict, ConfigError

log = logging.getLogger(__name__)

STORE_FORMAT = "bianchi-coefficient-cache"
STORE_VERSION = 1
STORE_FILENAME = "coefficients.jsonl"


class CoefficientMemo:
    """Thread-safe memo table: concurrent readers, atomic insert, idempotent recompute."""

    def __init__(self, store: Optional["CoefficientStore"] = None, form_label: Optional[str] = None, d: Optional[int] = None):
        """
        Initialize memo table.

        Args:
            store: Optional persistent store written through on insert
            form_label: Label under which entries are persisted
            d: Field parameter under which entries are persisted
        """
        self._values: Dict[Hashable, Any] = {}
        self.lock = Lock()
        self.store = store
        self.form_label = form_label
        self.d = d
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        with self.lock:
            return len(self._values)

    def __contains__(self, key: Hashable) -> bool:
        with self.lock:
            return key in self._values

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        """
        Return the memoised value for key, computing it at most once per winner.

        Two threads racing on the same key may both compute; the first insert
        wins and both return the same object.
        """
        with self.lock:
            if key in self._values:
                self.hits += 1
                return self._values[key]
        if self.store is not None and self.form_label is not None and isinstance(key, tuple) and len(key) == 2:
            stored = self.store.get_coefficient(self.form_label, self.d, key)
            if stored is not None:
                with self.lock:
                    return self._values.setdefault(key, int(stored))
        value = compute()
        with self.lock:
            self.misses += 1
            value = self._values.setdefault(key, value)
        if self.store is not None and self.form_label is not None and isinstance(key, tuple) and isinstance(value, int):
            self.store.put_coefficient(self.form_label, self.d, key, value)
        return value

    def clear(self):
        """Drop all memoised values (the persistent store is untouched)."""
        with self.lock:
            self._values.clear()


class CoefficientStore:
    """Append-only on-disk store keyed by (form label, field d, canonical generator)."""

    def __init__(self, cache_dir: Optional[Path] = None):
        """
        Initialize the store. Nothing is read until first use.

        Args:
            cache_dir: Directory holding the store file (defaults to config.CACHE_DIR)
        """
        self.cache_dir = Path(cache_dir) if cache_dir is not None else Path(config.CACHE_DIR)
        self.path = self.cache_dir / STORE_FILENAME
        self._index: Optional[Dict[Tuple, Any]] = None
        self.lock = Lock()

    # ─── Loading ────────────────────────────────────────────────────────────

    def _load_index(self) -> Dict[Tuple, Any]:
        """Read the store file if not already loaded. Caller holds the lock."""
        if self._index is not None:
            return self._index
        self._index = {}
        if not self.path.exists():
            return self._index
        with open(self.path, "r", encoding="utf-8") as f:
            header = f.readline()
            try:
                meta = json.loads(header)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{self.path}: unreadable store header: {e}") from e
            if meta.get("format") != STORE_FORMAT:
                raise ConfigError(f"{self.path} is not a coefficient store")
            if meta.get("version") != STORE_VERSION:
                raise ConfigError(
                    f"{self.path} has store version {meta.get('version')}, expected {STORE_VERSION}; "
                    f"remove it or point --cache-dir elsewhere"
                )
            for lineno, line in enumerate(f, start=2):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    # a torn final line from an interrupted writer
                    log.warning("%s:%d: skipping unreadable record", self.path, lineno)
                    continue
                key, value = self._record_key(record), self._record_value(record)
                self._index.setdefault(key, value)
        log.debug("loaded %d records from %s", len(self._index), self.path)
        return self._index

    @staticmethod
    def _record_key(record: Dict[str, Any]) -> Tuple:
        if record["kind"] == "coefficient":
            return ("coefficient", record["form"], record["d"], tuple(record["gen"]))
        return ("newform", record["label"])

    @staticmethod
    def _record_value(record: Dict[str, Any]) -> Any:
        return record["value"] if record["kind"] == "coefficient" else record["data"]

    def _append(self, record: Dict[str, Any]):
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        fresh = not self.path.exists()
        with open(self.path, "a", encoding="utf-8") as f:
            if fresh:
                f.write(json.dumps({"format": STORE_FORMAT, "version": STORE_VERSION}) + "\n")
            f.write(json.dumps(record, sort_keys=True) + "\n")
            f.flush()

    def _put(self, key: Tuple, value: Any, record: Dict[str, Any]) -> bool:
        with self.lock:
            index = self._load_index()
            if key in index:
                if index[key] != value:
                    raise CacheConflict(f"store already holds a different value for {key}")
                return False
            self._append(record)
            index[key] = value
            return True

    # ─── Coefficients ───────────────────────────────────────────────────────

    def get_coefficient(self, label: str, d: int, gen: Tuple[int, int]) -> Optional[str]:
        with self.lock:
            return self._load_index().get(("coefficient", label, d, tuple(gen)))

    def put_coefficient(self, label: str, d: int, gen: Tuple[int, int], value: int) -> bool:
        """Insert one coefficient; returns False if it was already present."""
        key = ("coefficient", label, d, tuple(gen))
        record = {"kind": "coefficient", "form": label, "d": d, "gen": list(gen), "value": str(value)}
        return self._put(key, str(value), record)

    # ─── Newforms ───────────────────────────────────────────────────────────

    def get_newform(self, label: str) -> Optional[Dict[str, Any]]:
        with self.lock:
            return self._load_index().get(("newform", label))

    def put_newform(self, label: str, data: Dict[str, Any]) -> bool:
        """Insert a validated newform record; returns False on an identical re-insert."""
        return self._put(("newform", label), data, {"kind": "newform", "label": label, "data": data})

    def count(self) -> int:
        with self.lock:
            return len(self._load_index())

    def reload(self):
        """Forget the in-memory index so the next access rereads the file."""
        with self.lock:
            self._index = None
