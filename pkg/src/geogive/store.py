"""Embedded file-backed store: versioned entities, append-only log, blobs.

One data directory per deployment:

    <data_dir>/
      manifest.json          store schema version + creation time
      entities/<kind>/<id>.json   one checksummed record per entity
      log/events.jsonl       the append-only telemetry log
      blobs/<sha256>         content-addressed binary blobs

Entity writes are compare-and-set on a per-record version counter and reach
disk through write-temp + fsync + atomic rename, so a crash leaves either
the old or the new version, never a hybrid. Log appends are fsynced before
being acknowledged; an interrupted (unacknowledged) trailing line is
truncated away on recovery.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

from .errors import StoreCorrupt, VersionConflict
from .util import now_utc, to_iso

STORE_SCHEMA_VERSION = 1

_SAFE_NAME = re.compile(r"^[A-Za-z0-9._:@+-]+$")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _checksum(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def _fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write a file so that readers only ever see old or new content."""
    tmp = path.with_name(path.name + f".tmp{os.getpid()}-{os.urandom(4).hex()}")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    _fsync_dir(path.parent)


def _append_durable(path: Path, line: bytes) -> None:
    with open(path, "ab") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


def _encode_name(name: str) -> str:
    if _SAFE_NAME.match(name):
        return name
    return "x" + hashlib.sha256(name.encode("utf-8")).hexdigest()[:32]


@dataclass(frozen=True)
class VersionedRecord:
    kind: str
    entity_id: str
    version: int
    payload: dict
    updated_at: str


class Store:
    """Thread-safe embedded store; safe to share across request handlers."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.entities_dir = self.data_dir / "entities"
        self.log_dir = self.data_dir / "log"
        self.blobs_dir = self.data_dir / "blobs"
        for d in (self.entities_dir, self.log_dir, self.blobs_dir):
            d.mkdir(parents=True, exist_ok=True)
        self._write_manifest()
        self._drop_temp_files()

        self._master_lock = threading.Lock()
        self._record_locks: dict[tuple[str, str], threading.Lock] = {}
        self._log_lock = threading.Lock()
        self._log_path = self.log_dir / "events.jsonl"
        self._next_seq = self._recover_log() + 1

    # -- setup ----------------------------------------------------------

    def _write_manifest(self) -> None:
        manifest = self.data_dir / "manifest.json"
        if manifest.exists():
            return
        _atomic_write_bytes(
            manifest,
            (canonical_json({"schema_version": STORE_SCHEMA_VERSION, "created_at": to_iso(now_utc())}) + "\n").encode(
                "utf-8"
            ),
        )

    def _drop_temp_files(self) -> None:
        # Leftovers from writes interrupted before their atomic rename.
        for tmp in self.data_dir.rglob("*.tmp*"):
            try:
                tmp.unlink()
            except OSError:
                pass

    def _recover_log(self) -> int:
        """Validate the log; truncate a torn trailing line. Returns last seq.

        Appends write "entry\\n" in one call and recovery runs before any new
        append, so only the final, unterminated segment can legitimately be
        partial. Any damaged newline-terminated line is real corruption.
        """
        if not self._log_path.exists():
            return 0
        raw = self._log_path.read_bytes()
        lines = raw.split(b"\n")
        last_seq = 0
        good_end = 0
        for line in lines[:-1]:  # every element here was newline-terminated
            entry = None
            if line:
                try:
                    entry = json.loads(line.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    entry = None
            valid = (
                isinstance(entry, dict)
                and isinstance(entry.get("seq"), int)
                and entry["seq"] > last_seq
                and entry.get("crc") == _checksum({"seq": entry["seq"], "event": entry.get("event")})
            )
            if not valid:
                raise StoreCorrupt(f"telemetry log damaged at byte {good_end}")
            last_seq = entry["seq"]
            good_end += len(line) + 1
        if lines[-1]:  # torn, never-acknowledged tail
            with open(self._log_path, "ab") as fh:
                fh.truncate(good_end)
                fh.flush()
                os.fsync(fh.fileno())
        return last_seq

    # -- entities ---------------------------------------------------------

    def _record_path(self, kind: str, entity_id: str) -> Path:
        return self.entities_dir / _encode_name(kind) / (_encode_name(entity_id) + ".json")

    def _lock_for(self, kind: str, entity_id: str) -> threading.Lock:
        key = (kind, entity_id)
        with self._master_lock:
            lock = self._record_locks.get(key)
            if lock is None:
                lock = self._record_locks[key] = threading.Lock()
            return lock

    def _load_record(self, path: Path, kind: str) -> VersionedRecord | None:
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreCorrupt(f"unreadable record {path}: {exc}") from exc
        body = {k: raw.get(k) for k in ("kind", "id", "version", "payload", "updated_at")}
        if raw.get("checksum") != _checksum(body):
            raise StoreCorrupt(f"checksum mismatch for {path}")
        return VersionedRecord(
            kind=raw["kind"],
            entity_id=raw["id"],
            version=raw["version"],
            payload=raw["payload"],
            updated_at=raw["updated_at"],
        )

    def get(self, kind: str, entity_id: str) -> VersionedRecord | None:
        return self._load_record(self._record_path(kind, entity_id), kind)

    def put_if_version(self, kind: str, entity_id: str, expected_version: int, payload: dict) -> int:
        """Atomic compare-and-set write; expected_version 0 means create."""
        path = self._record_path(kind, entity_id)
        with self._lock_for(kind, entity_id):
            current = self._load_record(path, kind)
            current_version = current.version if current else 0
            if current_version != expected_version:
                raise VersionConflict(
                    f"{kind}/{entity_id}: expected version {expected_version}, found {current_version}"
                )
            new_version = current_version + 1
            body = {
                "kind": kind,
                "id": entity_id,
                "version": new_version,
                "payload": payload,
                "updated_at": to_iso(now_utc()),
            }
            record = dict(body, checksum=_checksum(body))
            path.parent.mkdir(parents=True, exist_ok=True)
            _atomic_write_bytes(path, (canonical_json(record) + "\n").encode("utf-8"))
            return new_version

    def scan(self, kind: str, predicate: Callable[[VersionedRecord], bool] | None = None) -> Iterator[VersionedRecord]:
        """Iterate committed records of one kind, ordered by entity id."""
        kind_dir = self.entities_dir / _encode_name(kind)
        if not kind_dir.exists():
            return
        for path in sorted(kind_dir.glob("*.json")):
            record = self._load_record(path, kind)
            if record is None:
                continue
            if predicate is None or predicate(record):
                yield record

    # -- append-only log --------------------------------------------------

    def append_log(self, event: dict) -> int:
        """Durably append one event; returns its sequence number."""
        with self._log_lock:
            seq = self._next_seq
            entry = {"seq": seq, "event": event}
            entry["crc"] = _checksum(entry)
            _append_durable(self._log_path, (canonical_json(entry) + "\n").encode("utf-8"))
            self._next_seq = seq + 1
            return seq

    def read_log(self, from_seq: int = 0) -> list[tuple[int, dict]]:
        """All acknowledged events with seq >= from_seq, in order."""
        if not self._log_path.exists():
            return []
        with self._log_lock:
            # Appends hold the same lock, so the snapshot ends on a complete line.
            data = self._log_path.read_bytes()
        out = []
        for line in data.split(b"\n"):
            if not line:
                continue
            try:
                entry = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise StoreCorrupt(f"telemetry log unreadable: {exc}") from exc
            seq = entry.get("seq")
            if entry.get("crc") != _checksum({"seq": seq, "event": entry.get("event")}):
                raise StoreCorrupt(f"telemetry log checksum mismatch at seq {seq}")
            if seq >= from_seq:
                out.append((seq, entry["event"]))
        return out

    def next_log_seq(self) -> int:
        with self._log_lock:
            return self._next_seq

    # -- blobs --------------------------------------------------------------

    def put_blob(self, data: bytes) -> str:
        """Store content-addressed bytes; returns the hex digest name."""
        digest = hashlib.sha256(data).hexdigest()
        path = self.blobs_dir / digest
        if not path.exists():
            _atomic_write_bytes(path, data)
        return digest

    def get_blob(self, digest: str) -> bytes | None:
        path = self.blobs_dir / _encode_name(digest)
        if not path.exists():
            return None
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != digest:
            raise StoreCorrupt(f"blob {digest} fails its content hash")
        return data
