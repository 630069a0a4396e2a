"""Typed access to stored entities, with compare-and-set retry loops."""

from __future__ import annotations

from typing import Callable, Iterable

from ..domain import Offer, UserProfile
from ..errors import Conflict, NotFound, VersionConflict
from ..store import Store, VersionedRecord
from ..study import HandOverReview, PendingReviewTask

MAX_CAS_RETRIES = 8

KIND_USER = "user"
KIND_CREDENTIAL = "credential"
KIND_EMAIL_INDEX = "email_index"
KIND_SUBJECT_INDEX = "subject_index"
KIND_OFFER = "offer"
KIND_TASK = "task"
KIND_REVIEW = "review"
KIND_SURVEY = "survey"
KIND_SESSION = "session"
KIND_NOTIFICATION = "notification"
KIND_REPORT = "report"
KIND_TRIAL = "trial"
KIND_IDEMPOTENCY = "idempotency"


class Repos:
    def __init__(self, store: Store):
        self.store = store

    # -- generic helpers -------------------------------------------------

    def create(self, kind: str, entity_id: str, payload: dict) -> None:
        self.store.put_if_version(kind, entity_id, 0, payload)

    def mutate(self, kind: str, entity_id: str, fn: Callable[[dict], dict]) -> dict:
        """Read-modify-write with bounded retry on version conflicts."""
        for _ in range(MAX_CAS_RETRIES):
            record = self.store.get(kind, entity_id)
            if record is None:
                raise NotFound(f"{kind} {entity_id} not found")
            updated = fn(dict(record.payload))
            try:
                self.store.put_if_version(kind, entity_id, record.version, updated)
                return updated
            except VersionConflict:
                continue
        raise Conflict(f"too much contention on {kind}/{entity_id}")

    def upsert(self, kind: str, entity_id: str, payload: dict) -> None:
        """Write regardless of current content (still CAS internally)."""
        for _ in range(MAX_CAS_RETRIES):
            record = self.store.get(kind, entity_id)
            version = record.version if record else 0
            try:
                self.store.put_if_version(kind, entity_id, version, payload)
                return
            except VersionConflict:
                continue
        raise Conflict(f"too much contention on {kind}/{entity_id}")

    def get_payload(self, kind: str, entity_id: str) -> dict | None:
        record = self.store.get(kind, entity_id)
        return dict(record.payload) if record else None

    # -- users ------------------------------------------------------------

    def user_exists(self, user_id: str) -> bool:
        return self.store.get(KIND_USER, user_id) is not None

    def load_user(self, user_id: str) -> UserProfile:
        payload = self.get_payload(KIND_USER, user_id)
        if payload is None:
            raise NotFound(f"user {user_id} not found")
        return UserProfile.from_dict(payload)

    def find_user(self, user_id: str) -> UserProfile | None:
        payload = self.get_payload(KIND_USER, user_id)
        return UserProfile.from_dict(payload) if payload else None

    def save_new_user(self, profile: UserProfile) -> None:
        self.create(KIND_USER, profile.user_id, profile.to_dict())

    def mutate_user(self, user_id: str, fn: Callable[[UserProfile], UserProfile]) -> UserProfile:
        updated = self.mutate(KIND_USER, user_id, lambda p: fn(UserProfile.from_dict(p)).to_dict())
        return UserProfile.from_dict(updated)

    def all_users(self) -> list[UserProfile]:
        return [UserProfile.from_dict(r.payload) for r in self.store.scan(KIND_USER)]

    def location_consent(self, user_id: str) -> bool:
        payload = self.get_payload(KIND_USER, user_id)
        if payload is None:
            return False
        return bool(payload.get("consent", {}).get("location_logging_consent", False))

    # -- offers -----------------------------------------------------------

    def load_offer(self, offer_id: str) -> Offer:
        payload = self.get_payload(KIND_OFFER, offer_id)
        if payload is None:
            raise NotFound(f"offer {offer_id} not found")
        return Offer.from_dict(payload)

    def save_new_offer(self, offer: Offer) -> None:
        self.create(KIND_OFFER, offer.offer_id, offer.to_dict())

    def mutate_offer(self, offer_id: str, fn: Callable[[Offer], Offer]) -> Offer:
        updated = self.mutate(KIND_OFFER, offer_id, lambda p: fn(Offer.from_dict(p)).to_dict())
        return Offer.from_dict(updated)

    def all_offers(self) -> list[Offer]:
        return [Offer.from_dict(r.payload) for r in self.store.scan(KIND_OFFER)]

    # -- review tasks and reviews ------------------------------------------

    def tasks_for_offer(self, offer_id: str) -> list[PendingReviewTask]:
        return [
            PendingReviewTask.from_dict(r.payload)
            for r in self.store.scan(KIND_TASK, lambda rec: rec.payload.get("offer_id") == offer_id)
        ]

    def tasks_for_user(self, user_id: str) -> list[PendingReviewTask]:
        return [
            PendingReviewTask.from_dict(r.payload)
            for r in self.store.scan(KIND_TASK, lambda rec: rec.payload.get("user_id") == user_id)
        ]

    def load_task(self, task_id: str) -> PendingReviewTask:
        payload = self.get_payload(KIND_TASK, task_id)
        if payload is None:
            raise NotFound(f"review task {task_id} not found")
        return PendingReviewTask.from_dict(payload)

    def save_task(self, task: PendingReviewTask, expected_version: int) -> None:
        self.store.put_if_version(KIND_TASK, task.task_id, expected_version, task.to_dict())

    def all_reviews(self) -> list[HandOverReview]:
        return [HandOverReview.from_dict(r.payload) for r in self.store.scan(KIND_REVIEW)]

    # -- surveys ------------------------------------------------------------

    def save_survey(self, user_id: str, instrument: str, payload: dict) -> None:
        self.upsert(KIND_SURVEY, f"{user_id}:{instrument}", payload)

    def surveys(self, instrument: str | None = None) -> list[dict]:
        records: Iterable[VersionedRecord] = self.store.scan(
            KIND_SURVEY,
            (lambda r: r.payload.get("instrument") == instrument) if instrument else None,
        )
        return [dict(r.payload) for r in records]
