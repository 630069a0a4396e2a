"""Shared service state: store, repos, telemetry, geofence, trial, sessions."""

from __future__ import annotations

import secrets
import threading
from datetime import datetime
from pathlib import Path

from ..config import ServiceConfig
from ..errors import InvalidTransition, RateLimited
from ..geo import GeofenceConfig, load_geofence_config
from ..localization import LocaleCatalog
from ..store import Store
from ..telemetry import TelemetryLog
from ..util import now_utc, to_iso
from .auth import DisabledIdentityProvider, StubIdentityProvider
from .notifications import NotificationWorker, OutboxEmailClient
from .repos import KIND_TRIAL, Repos

TRIAL_SCHEDULED = "scheduled"
TRIAL_OPEN = "open"
TRIAL_CLOSED = "closed"

TRIAL_ENTITY_ID = "trial"


class ServiceRuntime:
    """Everything a request handler needs, wired once per process."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = Store(config.data_dir)
        self.repos = Repos(self.store)
        self.geofence: GeofenceConfig = load_geofence_config(config.geofence_path)
        extra_locales = config.extra_locales_dir or str(Path(config.data_dir) / "locales")
        self.locales = LocaleCatalog(extra_dir=extra_locales)
        self.telemetry = TelemetryLog(
            self.store,
            user_exists=self.repos.user_exists,
            location_consent=self.repos.location_consent,
        )
        self.identity = StubIdentityProvider() if config.identity_stub_mode else DisabledIdentityProvider()
        self.notifications = NotificationWorker(
            self.repos,
            self.locales,
            OutboxEmailClient(Path(config.data_dir) / "outbox"),
            interval_s=config.notification_interval_s,
        )
        self.admin_token = self._load_admin_token(Path(config.admin_token_file))
        self._stamp_lock = threading.Lock()
        self._version_stamp = self.store.next_log_seq()
        self._rate_lock = threading.Lock()
        self._request_counts: dict[str, int] = {}

    # -- operator credential ------------------------------------------------

    @staticmethod
    def _load_admin_token(path: Path) -> str:
        if path.exists():
            token = path.read_text(encoding="utf-8").strip()
            if token:
                return token
        token = secrets.token_urlsafe(32)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(token + "\n", encoding="utf-8")
        return token

    # -- data version stamp ---------------------------------------------------

    @property
    def version_stamp(self) -> int:
        with self._stamp_lock:
            return self._version_stamp

    def bump_version(self) -> int:
        with self._stamp_lock:
            self._version_stamp += 1
            return self._version_stamp

    # -- per-session request ceiling ---------------------------------------

    def count_request(self, session_key: str) -> None:
        with self._rate_lock:
            n = self._request_counts.get(session_key, 0) + 1
            self._request_counts[session_key] = n
        if n > self.config.rate_ceiling:
            raise RateLimited("per-session request ceiling reached")

    # -- clock (injectable for tests) ------------------------------------------

    def now(self) -> datetime:
        return now_utc()

    # -- trial window ---------------------------------------------------------

    def trial_status(self) -> dict:
        payload = self.repos.get_payload(KIND_TRIAL, TRIAL_ENTITY_ID)
        if payload is None:
            return {"state": TRIAL_SCHEDULED, "opens_at": None, "closes_at": None}
        return payload

    def trial_open(self) -> dict:
        current = self.trial_status()
        if current["state"] == TRIAL_CLOSED:
            raise InvalidTransition("a closed trial cannot be reopened")
        if current["state"] == TRIAL_OPEN:
            return current
        payload = {"state": TRIAL_OPEN, "opens_at": to_iso(self.now()), "closes_at": None}
        self.repos.upsert(KIND_TRIAL, TRIAL_ENTITY_ID, payload)
        return payload

    def trial_close(self) -> dict:
        current = self.trial_status()
        if current["state"] == TRIAL_CLOSED:
            return current  # close is idempotent
        payload = {
            "state": TRIAL_CLOSED,
            "opens_at": current.get("opens_at"),
            "closes_at": to_iso(self.now()),
        }
        self.repos.upsert(KIND_TRIAL, TRIAL_ENTITY_ID, payload)
        return payload

    def trial_is_closed(self) -> bool:
        return self.trial_status()["state"] == TRIAL_CLOSED

    # -- lifecycle ------------------------------------------------------------

    def start(self) -> None:
        self.notifications.start()

    def shutdown(self) -> None:
        self.notifications.stop()
