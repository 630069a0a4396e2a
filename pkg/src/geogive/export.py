"""Study dataset export: pseudonymized, line-delimited, deterministic.

Layout written under the output directory:

    dataset/
      manifest.json     record counts, snapshot timestamp, schema version
      users.jsonl       one user per line
      offers.jsonl
      reviews.jsonl
      surveys.jsonl
      telemetry.jsonl
    pseudonym_map.json  keyed mapping real id -> pseudonym (kept separate,
                        never part of the shareable dataset/ directory)

Field order within each line is fixed (see *_FIELDS below) and every file is
UTF-8 with one compact JSON object per line, so re-exporting an unchanged
store with the same key is byte-identical. Free-form identity data (names,
emails, raw contact details) is never exported.
"""

from __future__ import annotations

import hashlib
import hmac
import json
from pathlib import Path

from .store import Store
from .study import LSNS_ISOLATION_CUTOFF
from .telemetry import USER_ENTITY_ACTIONS

EXPORT_SCHEMA_VERSION = 1
STREAMS = ("users", "offers", "reviews", "surveys", "telemetry")

USER_FIELDS = (
    "user",
    "user_group",
    "locale",
    "approval_status",
    "rejection_reason",
    "completed_deliveries",
    "study_consent",
    "location_logging_consent",
    "demographics_done",
    "lsns_done",
    "blocked_count",
)
OFFER_FIELDS = (
    "offer_id",
    "owner",
    "collector",
    "status",
    "created_at",
    "completed_at",
    "pickup_lat",
    "pickup_lon",
    "title_length",
    "has_photo",
)
REVIEW_FIELDS = (
    "offer_id",
    "reviewer",
    "counterparty",
    "place",
    "place_category",
    "contact_channel",
    "satisfaction",
    "likely_repeat",
    "submitted_at",
)
SURVEY_FIELDS = ("user", "instrument", "submitted_at", "payload", "score")
TELEMETRY_FIELDS = ("seq", "user", "action", "entity_id", "at", "lat", "lon")


def pseudonym(key: bytes, real_id: str) -> str:
    digest = hmac.new(key, f"user:{real_id}".encode("utf-8"), hashlib.sha256).hexdigest()
    return "p_" + digest[:12]


def _line(fields: tuple[str, ...], values: dict) -> str:
    ordered = {name: values.get(name) for name in fields}
    return json.dumps(ordered, separators=(",", ":"), ensure_ascii=False) + "\n"


def _pos_fields(position: dict | None) -> tuple[float | None, float | None]:
    if not position:
        return None, None
    return position.get("lat"), position.get("lon")


def build_export(store: Store, key: bytes) -> dict[str, bytes]:
    """Build the export archive as {relative path: file bytes}.

    Deterministic for a given store content and key: records are ordered by
    their natural keys and the manifest timestamp is derived from the data
    (the latest record/event timestamp), not from the wall clock.
    """
    mapping: dict[str, str] = {}

    def pseud(real_id: str | None) -> str | None:
        if real_id is None:
            return None
        p = pseudonym(key, real_id)
        mapping[real_id] = p
        return p

    timestamps: list[str] = []

    def note_ts(value: str | None) -> None:
        if value:
            timestamps.append(value)

    users_lines = []
    for record in store.scan("user"):
        u = record.payload
        consent = u.get("consent", {})
        approval = u.get("approval", {})
        users_lines.append(
            _line(
                USER_FIELDS,
                {
                    "user": pseud(u["user_id"]),
                    "user_group": u.get("user_group"),
                    "locale": u.get("locale"),
                    "approval_status": approval.get("status"),
                    "rejection_reason": approval.get("reason"),
                    "completed_deliveries": u.get("completed_deliveries", 0),
                    "study_consent": consent.get("study_consent", False),
                    "location_logging_consent": consent.get("location_logging_consent", False),
                    "demographics_done": consent.get("demographics_done", False),
                    "lsns_done": consent.get("lsns_done", False),
                    "blocked_count": len(u.get("blocked_ids", [])),
                },
            )
        )
        note_ts(approval.get("decided_at"))
        note_ts(consent.get("consented_at"))
    users_lines.sort()

    offers_lines = []
    for record in sorted(store.scan("offer"), key=lambda r: r.entity_id):
        o = record.payload
        lat, lon = _pos_fields(o.get("pickup_position"))
        offers_lines.append(
            _line(
                OFFER_FIELDS,
                {
                    "offer_id": o["offer_id"],
                    "owner": pseud(o["owner_id"]),
                    "collector": pseud(o.get("collector_id")),
                    "status": o.get("status"),
                    "created_at": o.get("created_at"),
                    "completed_at": o.get("completed_at"),
                    "pickup_lat": lat,
                    "pickup_lon": lon,
                    "title_length": len(o.get("title", "")),
                    "has_photo": o.get("photo_ref") is not None,
                },
            )
        )
        note_ts(o.get("created_at"))
        note_ts(o.get("completed_at"))

    reviews_lines = []
    for record in sorted(store.scan("review"), key=lambda r: r.entity_id):
        r = record.payload
        reviews_lines.append(
            _line(
                REVIEW_FIELDS,
                {
                    "offer_id": r["offer_id"],
                    "reviewer": pseud(r["reviewer_id"]),
                    "counterparty": pseud(r.get("counterparty_id")),
                    "place": r.get("place"),
                    "place_category": r.get("place_category"),
                    "contact_channel": r.get("contact_channel"),
                    "satisfaction": r.get("satisfaction"),
                    "likely_repeat": r.get("likely_repeat"),
                    "submitted_at": r.get("submitted_at"),
                },
            )
        )
        note_ts(r.get("submitted_at"))

    surveys_lines = []
    for record in sorted(store.scan("survey"), key=lambda r: r.entity_id):
        s = record.payload
        surveys_lines.append(
            _line(
                SURVEY_FIELDS,
                {
                    "user": pseud(s["user_id"]),
                    "instrument": s.get("instrument"),
                    "submitted_at": s.get("submitted_at"),
                    "payload": s.get("payload"),
                    "score": s.get("score"),
                },
            )
        )
        note_ts(s.get("submitted_at"))

    telemetry_lines = []
    for seq, event in store.read_log(0):
        action = event.get("action")
        entity_id = event.get("entity_id")
        if action in {a.value for a in USER_ENTITY_ACTIONS} and entity_id:
            entity_id = pseud(entity_id)
        lat, lon = _pos_fields(event.get("position"))
        telemetry_lines.append(
            _line(
                TELEMETRY_FIELDS,
                {
                    "seq": seq,
                    "user": pseud(event["user_id"]),
                    "action": action,
                    "entity_id": entity_id,
                    "at": event.get("at"),
                    "lat": lat,
                    "lon": lon,
                },
            )
        )
        note_ts(event.get("at"))

    stream_lines = {
        "users": users_lines,
        "offers": offers_lines,
        "reviews": reviews_lines,
        "surveys": surveys_lines,
        "telemetry": telemetry_lines,
    }
    manifest = {
        "schema_version": EXPORT_SCHEMA_VERSION,
        "snapshot_at": max(timestamps) if timestamps else None,
        "counts": {name: len(stream_lines[name]) for name in STREAMS},
        "metadata": {"lsns_isolation_cutoff": LSNS_ISOLATION_CUTOFF},
    }

    files: dict[str, bytes] = {}
    for name in STREAMS:
        files[f"dataset/{name}.jsonl"] = "".join(stream_lines[name]).encode("utf-8")
    files["dataset/manifest.json"] = (
        json.dumps(manifest, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"
    ).encode("utf-8")
    # The keyed mapping stays outside dataset/ so the shareable archive never
    # carries the re-identification table.
    files["pseudonym_map.json"] = (
        json.dumps(dict(sorted(mapping.items())), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"
    ).encode("utf-8")
    return files


def export_dataset(store: Store, out_dir: str | Path, key: bytes) -> dict:
    """Write the export archive to disk; returns the manifest dict."""
    out_dir = Path(out_dir)
    files = build_export(store, key)
    for rel, data in files.items():
        target = out_dir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
    return json.loads(files["dataset/manifest.json"].decode("utf-8"))


def import_dataset(out_dir: str | Path) -> dict[str, list[dict]]:
    """Read an export archive back into per-stream record lists."""
    dataset_dir = Path(out_dir) / "dataset"
    data: dict[str, list[dict]] = {}
    for name in STREAMS:
        lines = (dataset_dir / f"{name}.jsonl").read_text(encoding="utf-8").splitlines()
        data[name] = [json.loads(line) for line in lines if line]
    data["manifest"] = [json.loads((dataset_dir / "manifest.json").read_text(encoding="utf-8"))]
    return data
