"""Consent workflow, access gating, survey instruments, and their scoring."""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .domain import ConsentState, Offer, OfferStatus, UserProfile
from .errors import (
    DuplicateReview,
    NotApproved,
    OutOfRange,
    ReviewerMismatch,
    TaskNotPending,
    ValidationFailed,
)
from .util import from_iso, to_iso

# Reported in export metadata only; scores are used descriptively, no
# isolation classification is applied in the platform itself.
LSNS_ISOLATION_CUTOFF = 12

GATE_STEPS = ("consent", "demographics", "lsns")


# ---------------------------------------------------------------------------
# instrument responses


@dataclass(frozen=True)
class Lsns6Response:
    """Six social-network items, each answered on a 0..5 anchor scale."""

    items: tuple[int, ...]

    def __post_init__(self):
        if len(self.items) != 6:
            raise ValidationFailed("LSNS-6 requires exactly six items")
        if any(not (0 <= v <= 5) for v in self.items):
            raise ValidationFailed("LSNS-6 items must be in [0, 5]")


@dataclass(frozen=True)
class SusResponse:
    """Ten usability items on a 5-point agreement scale (1..5)."""

    items: tuple[int, ...]

    def __post_init__(self):
        if len(self.items) != 10:
            raise ValidationFailed("SUS requires exactly ten items")
        if any(not (1 <= v <= 5) for v in self.items):
            raise ValidationFailed("SUS items must be in [1, 5]")


class UsefulnessDimension(str, Enum):
    INCREASED_CONTACT = "increased_contact"
    CONTACT_WITH_STRANGERS = "contact_with_strangers"
    SOLIDARITY = "solidarity"
    RELIABILITY = "reliability"
    TRUST = "trust"
    COMMUNITY = "community"
    NEW_FRIENDSHIPS = "new_friendships"
    NETWORK_SIZE = "network_size"
    REDUCED_ISOLATION = "reduced_isolation"


@dataclass(frozen=True)
class UsefulnessResponse:
    """Nine perceived-usefulness dimensions, each rated 1..5."""

    ratings: Mapping[UsefulnessDimension, int]

    def __post_init__(self):
        keys = set(self.ratings)
        expected = set(UsefulnessDimension)
        if keys != expected:
            raise ValidationFailed("usefulness response must rate all nine dimensions exactly once")
        if any(not (1 <= v <= 5) for v in self.ratings.values()):
            raise ValidationFailed("usefulness ratings must be in [1, 5]")


class ContactChannelUsed(str, Enum):
    EMAIL = "email"
    FACEBOOK = "facebook"
    PHONE = "phone"
    WHATSAPP = "whatsapp"
    OTHER = "other"


class PlaceCategory(str, Enum):
    MY_HOME = "my_home"
    THEIR_HOME = "their_home"
    PUBLIC_PLACE = "public_place"
    OTHER = "other"


@dataclass(frozen=True)
class HandOverReview:
    """Post-completion review of an in-person hand-over."""

    offer_id: str
    reviewer_id: str
    place: str
    contact_channel: ContactChannelUsed
    satisfaction: int
    likely_repeat: int
    submitted_at: datetime
    counterparty_id: str | None = None
    place_category: PlaceCategory | None = None

    def __post_init__(self):
        if not (1 <= self.satisfaction <= 5):
            raise ValidationFailed("satisfaction must be in [1, 5]")
        if not (1 <= self.likely_repeat <= 5):
            raise ValidationFailed("likely_repeat must be in [1, 5]")

    def to_dict(self) -> dict:
        return {
            "offer_id": self.offer_id,
            "reviewer_id": self.reviewer_id,
            "counterparty_id": self.counterparty_id,
            "place": self.place,
            "place_category": self.place_category.value if self.place_category else None,
            "contact_channel": self.contact_channel.value,
            "satisfaction": self.satisfaction,
            "likely_repeat": self.likely_repeat,
            "submitted_at": to_iso(self.submitted_at),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "HandOverReview":
        return cls(
            offer_id=raw["offer_id"],
            reviewer_id=raw["reviewer_id"],
            counterparty_id=raw.get("counterparty_id"),
            place=raw.get("place", ""),
            place_category=PlaceCategory(raw["place_category"]) if raw.get("place_category") else None,
            contact_channel=ContactChannelUsed(raw["contact_channel"]),
            satisfaction=raw["satisfaction"],
            likely_repeat=raw["likely_repeat"],
            submitted_at=from_iso(raw["submitted_at"]),
        )


class ReviewTaskState(str, Enum):
    PENDING = "pending"
    DONE = "done"
    DISMISSED = "dismissed"


@dataclass(frozen=True)
class PendingReviewTask:
    task_id: str
    user_id: str
    offer_id: str
    created_at: datetime
    state: ReviewTaskState = ReviewTaskState.PENDING

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "user_id": self.user_id,
            "offer_id": self.offer_id,
            "created_at": to_iso(self.created_at),
            "state": self.state.value,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PendingReviewTask":
        return cls(
            task_id=raw["task_id"],
            user_id=raw["user_id"],
            offer_id=raw["offer_id"],
            created_at=from_iso(raw["created_at"]),
            state=ReviewTaskState(raw["state"]),
        )


# ---------------------------------------------------------------------------
# consent and gating


def record_consent(
    user: UserProfile,
    study_consent: bool,
    location_logging_consent: bool,
    locale_shown: str,
    now: datetime,
) -> ConsentState:
    """Store a consent decision for an approved user.

    Location logging is a separate, stricter permission: it is forced off
    whenever study consent itself is withheld.
    """
    from .domain import ApprovalStatus

    if user.approval.status is not ApprovalStatus.APPROVED:
        raise NotApproved(f"user {user.user_id} is not approved")
    return ConsentState(
        study_consent=study_consent,
        location_logging_consent=location_logging_consent and study_consent,
        consented_at=now,
        locale_shown=locale_shown,
        demographics_done=user.consent.demographics_done,
        lsns_done=user.consent.lsns_done,
    )


@dataclass(frozen=True)
class AccessDecision:
    full: bool
    missing: tuple[str, ...] = ()


def gate_access(consent: ConsentState) -> AccessDecision:
    """Full access only after consent plus both onboarding surveys."""
    missing = []
    if not consent.study_consent:
        missing.append("consent")
    if not consent.demographics_done:
        missing.append("demographics")
    if not consent.lsns_done:
        missing.append("lsns")
    return AccessDecision(full=not missing, missing=tuple(missing))


# ---------------------------------------------------------------------------
# scoring


def score_lsns6(r: Lsns6Response) -> int:
    """Total score: plain sum of the six items, range [0, 30]."""
    return sum(r.items)


def score_sus(r: SusResponse) -> float:
    """Standard SUS scoring.

    Odd items (1-indexed) contribute (value - 1), even items (5 - value);
    the raw sum is scaled by 2.5 onto [0, 100].
    """
    raw = 0
    for idx, value in enumerate(r.items, start=1):
        raw += (value - 1) if idx % 2 == 1 else (5 - value)
    return raw * 2.5


# Adjective bands use the published adjective anchor means as lower edges;
# letter bands follow the curved grading scale. Both are plain data and can
# be overridden per deployment. The lowest band must start at 0.
DEFAULT_ADJECTIVE_BANDS: tuple[tuple[float, str], ...] = (
    (0.0, "worst imaginable"),
    (12.5, "awful"),
    (20.3, "poor"),
    (35.7, "ok"),
    (71.4, "good"),
    (85.5, "excellent"),
    (90.9, "best imaginable"),
)

DEFAULT_LETTER_BANDS: tuple[tuple[float, str], ...] = (
    (0.0, "F"),
    (51.7, "D"),
    (62.7, "C-"),
    (65.0, "C"),
    (71.1, "C+"),
    (72.6, "B-"),
    (74.1, "B"),
    (77.2, "B+"),
    (78.9, "A-"),
    (80.8, "A"),
    (84.1, "A+"),
)


def _band_lookup(score: float, bands: tuple[tuple[float, str], ...]) -> str:
    label = bands[0][1]
    for lower, name in bands:
        if score >= lower:
            label = name
    return label


def sus_grade(
    score: float,
    adjective_bands: tuple[tuple[float, str], ...] = DEFAULT_ADJECTIVE_BANDS,
    letter_bands: tuple[tuple[float, str], ...] = DEFAULT_LETTER_BANDS,
) -> tuple[str, str]:
    """Map a SUS score to (adjective rating, curved letter grade)."""
    if not (0.0 <= score <= 100.0):
        raise OutOfRange(f"SUS score {score} outside [0, 100]")
    return _band_lookup(score, adjective_bands), _band_lookup(score, letter_bands)


# ---------------------------------------------------------------------------
# usefulness aggregation


@dataclass(frozen=True)
class DimensionSummary:
    median: float
    agree: int
    neutral: int
    disagree: int

    @property
    def total(self) -> int:
        return self.agree + self.neutral + self.disagree


def aggregate_usefulness(
    labelled: Iterable[tuple[UsefulnessResponse, str]],
) -> dict[UsefulnessDimension, dict[str, DimensionSummary]]:
    """Per-dimension, per-group median plus agree/neutral/disagree counts.

    Agreement buckets: agree >= 4, neutral == 3, disagree <= 2. Groups with
    zero responses simply do not appear.
    """
    values: dict[UsefulnessDimension, dict[str, list[int]]] = {dim: {} for dim in UsefulnessDimension}
    for response, group in labelled:
        for dim, rating in response.ratings.items():
            values[dim].setdefault(group, []).append(rating)

    out: dict[UsefulnessDimension, dict[str, DimensionSummary]] = {}
    for dim in UsefulnessDimension:
        groups = {}
        for group in sorted(values[dim]):
            ratings = values[dim][group]
            groups[group] = DimensionSummary(
                median=float(statistics.median(ratings)),
                agree=sum(1 for v in ratings if v >= 4),
                neutral=sum(1 for v in ratings if v == 3),
                disagree=sum(1 for v in ratings if v <= 2),
            )
        out[dim] = groups
    return out


# ---------------------------------------------------------------------------
# review tasks


def create_pending_review(
    offer: Offer,
    existing_tasks: Iterable[PendingReviewTask],
    now: datetime,
    task_id_for: Callable[[str], str],
) -> list[PendingReviewTask]:
    """Create review prompts for a completed offer.

    One task for the owner and one for the collector when known. Idempotent
    under replay: a (offer, user) pair never gets a second task.
    """
    if offer.status is not OfferStatus.COMPLETED:
        raise ValidationFailed("review tasks are created only for completed offers")
    already = {(t.offer_id, t.user_id) for t in existing_tasks}
    recipients = [offer.owner_id]
    if offer.collector_id:
        recipients.append(offer.collector_id)
    tasks = []
    for user_id in recipients:
        if (offer.offer_id, user_id) in already:
            continue
        tasks.append(
            PendingReviewTask(
                task_id=task_id_for(user_id), user_id=user_id, offer_id=offer.offer_id, created_at=now
            )
        )
    return tasks


def submit_review(
    task: PendingReviewTask,
    review: HandOverReview,
    existing_reviews: Iterable[HandOverReview],
) -> tuple[HandOverReview, PendingReviewTask]:
    """Attach a hand-over review to its pending task and mark the task done."""
    for existing in existing_reviews:
        if existing.offer_id == review.offer_id and existing.reviewer_id == review.reviewer_id:
            raise DuplicateReview("this user already reviewed this offer")
    if task.state is not ReviewTaskState.PENDING:
        raise TaskNotPending(f"task {task.task_id} is {task.state.value}")
    if review.reviewer_id != task.user_id or review.offer_id != task.offer_id:
        raise ReviewerMismatch("review does not match the task's user and offer")
    return review, replace(task, state=ReviewTaskState.DONE)


def dismiss_review(task: PendingReviewTask) -> PendingReviewTask:
    if task.state is not ReviewTaskState.PENDING:
        raise TaskNotPending(f"task {task.task_id} is {task.state.value}")
    return replace(task, state=ReviewTaskState.DISMISSED)


# ---------------------------------------------------------------------------
# instrument definitions (item keys resolve through the localization bundle)


@dataclass(frozen=True)
class InstrumentDefinition:
    instrument_id: str
    item_keys: tuple[str, ...]
    scale_min: int | None
    scale_max: int | None
    anchor_keys: tuple[str, ...] = ()


def _instruments_path() -> Path:
    return Path(str(resources.files("geogive").joinpath("data/instruments.json")))


def load_instrument_definitions(path: str | Path | None = None) -> tuple[InstrumentDefinition, ...]:
    path = Path(path) if path else _instruments_path()
    raw = json.loads(path.read_text(encoding="utf-8"))
    defs = []
    for entry in raw["instruments"]:
        scale = entry.get("scale") or {}
        defs.append(
            InstrumentDefinition(
                instrument_id=entry["id"],
                item_keys=tuple(entry["item_keys"]),
                scale_min=scale.get("min"),
                scale_max=scale.get("max"),
                anchor_keys=tuple(entry.get("anchor_keys", ())),
            )
        )
    return tuple(defs)


def instruments_checksum(path: str | Path | None = None) -> str:
    """SHA-256 of the shipped instrument definition file."""
    path = Path(path) if path else _instruments_path()
    return hashlib.sha256(path.read_bytes()).hexdigest()
