"""Outbound notification tasks and the background dispatch worker.

Delivery is delegated to an email client interface; the in-repo stub writes
one JSON file per message into a file-backed outbox. Dispatch is
at-least-once with idempotent state transitions, so a crash between send and
acknowledgment only re-sends the same deterministic file.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..domain import NotificationDraft
from ..errors import NotFound, VersionConflict
from ..localization import LocaleCatalog
from ..util import new_id, now_utc, to_iso
from .repos import KIND_CREDENTIAL, KIND_NOTIFICATION, Repos

MAX_ATTEMPTS = 5

STATE_QUEUED = "queued"
STATE_SENT = "sent"
STATE_FAILED = "failed"

_SUBJECT_KEYS = {
    "welcome_email": "email.welcome_subject",
    "approval_pending_notice": "email.pending_subject",
    "rejection_notice": "email.rejected_subject",
}
_BODY_KEYS = {
    "welcome_email": "email.welcome_body",
    "approval_pending_notice": "email.pending_body",
    "rejection_notice": "email.rejected_body",
}


class OutboxEmailClient:
    """Stub delivery: deterministically writes messages to an outbox dir."""

    def __init__(self, outbox_dir: str | Path):
        self.outbox_dir = Path(outbox_dir)
        self.outbox_dir.mkdir(parents=True, exist_ok=True)

    def send(self, task_id: str, message: dict) -> None:
        target = self.outbox_dir / f"{task_id}.json"
        target.write_text(json.dumps(message, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")


class NotificationWorker:
    """Consumes queued notification tasks; safe to drive manually or by thread."""

    def __init__(self, repos: Repos, locales: LocaleCatalog, client: OutboxEmailClient, interval_s: float = 0.25):
        self.repos = repos
        self.locales = locales
        self.client = client
        self.interval_s = interval_s
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def enqueue(self, draft: NotificationDraft) -> str:
        task_id = new_id("n")
        recipient = self.repos.find_user(draft.recipient_id)
        credential = self.repos.get_payload(KIND_CREDENTIAL, draft.recipient_id) or {}
        self.repos.create(
            KIND_NOTIFICATION,
            task_id,
            {
                "task_id": task_id,
                "kind": draft.kind.value,
                "recipient_id": draft.recipient_id,
                "recipient_email": credential.get("email"),
                "recipient_locale": recipient.locale if recipient else "en",
                "payload": dict(draft.payload),
                "state": STATE_QUEUED,
                "attempts": 0,
                "created_at": to_iso(now_utc()),
                "sent_at": None,
            },
        )
        return task_id

    def _render(self, task: dict) -> dict:
        bundle, _ = self.locales.get(task.get("recipient_locale") or "en")
        kind = task["kind"]
        return {
            "to": task.get("recipient_email"),
            "recipient_id": task["recipient_id"],
            "kind": kind,
            "subject": bundle.strings.get(_SUBJECT_KEYS[kind], kind),
            "body": bundle.strings.get(_BODY_KEYS[kind], ""),
            "extra": task.get("payload", {}),
        }

    def run_once(self) -> int:
        """Process every due task once; returns the number sent."""
        sent = 0
        for record in list(self.repos.store.scan(KIND_NOTIFICATION)):
            task = dict(record.payload)
            if task["state"] == STATE_SENT:
                continue
            if task["state"] == STATE_FAILED and task["attempts"] >= MAX_ATTEMPTS:
                continue
            try:
                self.client.send(task["task_id"], self._render(task))
            except Exception:
                task["attempts"] = task.get("attempts", 0) + 1
                task["state"] = STATE_FAILED
            else:
                task["state"] = STATE_SENT
                task["sent_at"] = to_iso(now_utc())
                sent += 1
            try:
                self.repos.store.put_if_version(KIND_NOTIFICATION, task["task_id"], record.version, task)
            except (VersionConflict, NotFound):
                pass  # someone else advanced the task; transitions are idempotent
        return sent

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()

        def loop():
            while not self._stop.wait(self.interval_s):
                try:
                    self.run_once()
                except Exception:
                    pass  # the worker must outlive transient store trouble

        self._thread = threading.Thread(target=loop, name="notification-worker", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2)
            self._thread = None
