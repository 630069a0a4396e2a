"""Core entities and their lifecycle rules.

Everything here is an immutable value; transitions return new versions and
leave persistence concerns to the store layer. Operations raise
:class:`~geogive.errors.GeogiveError` subclasses with stable codes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from enum import Enum
from typing import Callable, Iterable, NamedTuple

from .errors import (
    InvalidDetail,
    InvalidPosition,
    MissingReason,
    NotAuthorized,
    NotOpen,
    NotPending,
    SelfBlock,
    UnknownUser,
    ValidationFailed,
)
from .util import from_iso, to_iso

MAX_TITLE_LENGTH = 120
# Positions reported this far ahead of the server clock are still accepted.
CLOCK_SKEW_TOLERANCE = timedelta(minutes=5)

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")
_E164_RE = re.compile(r"^\+[1-9][0-9]{6,14}$")


# ---------------------------------------------------------------------------
# positions


@dataclass(frozen=True)
class GeoPosition:
    """A point on the globe plus the moment it was observed."""

    lat: float
    lon: float
    recorded_at: datetime

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise InvalidPosition(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise InvalidPosition(f"longitude {self.lon} outside [-180, 180]")

    @classmethod
    def ingest(cls, lat: float, lon: float, recorded_at: datetime, now: datetime) -> "GeoPosition":
        """Build a position from client input, rejecting future timestamps.

        Timestamps up to CLOCK_SKEW_TOLERANCE ahead of the server clock are
        tolerated; anything further ahead is rejected.
        """
        if recorded_at - now > CLOCK_SKEW_TOLERANCE:
            raise InvalidPosition("recorded_at is in the future")
        return cls(lat=lat, lon=lon, recorded_at=recorded_at)

    def to_dict(self) -> dict:
        return {"lat": self.lat, "lon": self.lon, "recorded_at": to_iso(self.recorded_at)}

    @classmethod
    def from_dict(cls, raw: dict) -> "GeoPosition":
        return cls(lat=raw["lat"], lon=raw["lon"], recorded_at=from_iso(raw["recorded_at"]))


# ---------------------------------------------------------------------------
# contact methods and link generation

CONTACT_CHANNELS = ("email", "facebook", "phone", "whatsapp")


@dataclass(frozen=True)
class ContactChannel:
    enabled: bool = False
    detail: str = ""

    def to_dict(self) -> dict:
        return {"enabled": self.enabled, "detail": self.detail}

    @classmethod
    def from_dict(cls, raw: dict) -> "ContactChannel":
        return cls(enabled=raw.get("enabled", False), detail=raw.get("detail", ""))


@dataclass(frozen=True)
class ContactMethods:
    """Per-channel opt-in contact details; the offer owner picks the channel."""

    email: ContactChannel = ContactChannel()
    facebook: ContactChannel = ContactChannel()
    phone: ContactChannel = ContactChannel()
    whatsapp: ContactChannel = ContactChannel()

    def channel(self, name: str) -> ContactChannel:
        return getattr(self, name)

    def enabled_channels(self) -> list[str]:
        return [name for name in CONTACT_CHANNELS if self.channel(name).enabled]

    def to_dict(self) -> dict:
        return {name: self.channel(name).to_dict() for name in CONTACT_CHANNELS}

    @classmethod
    def from_dict(cls, raw: dict) -> "ContactMethods":
        return cls(**{name: ContactChannel.from_dict(raw.get(name, {})) for name in CONTACT_CHANNELS})


def normalize_phone(raw: str) -> str:
    """Normalize a phone-like detail to international +country form.

    Accepts spaces, dots, dashes and parentheses as separators and a leading
    ``00`` as alias for ``+``. Raises InvalidDetail if the result is not a
    plausible E.164 number.
    """
    cleaned = re.sub(r"[\s.\-()/]", "", raw)
    if cleaned.startswith("00"):
        cleaned = "+" + cleaned[2:]
    if not _E164_RE.match(cleaned):
        raise InvalidDetail(f"not an international phone number: {raw!r}")
    return cleaned


def normalize_contact_methods(cm: ContactMethods) -> ContactMethods:
    """Validate and normalize every enabled channel; raises InvalidDetail."""
    updates: dict[str, ContactChannel] = {}
    for name in CONTACT_CHANNELS:
        ch = cm.channel(name)
        if not ch.enabled:
            continue
        detail = ch.detail.strip()
        if not detail:
            raise InvalidDetail(f"channel {name} enabled without detail")
        if name == "email":
            if not _EMAIL_RE.match(detail):
                raise InvalidDetail(f"not an email address: {detail!r}")
            detail = detail.lower()
        elif name == "facebook":
            if any(c.isspace() for c in detail) or len(detail) < 2:
                raise InvalidDetail(f"not a profile handle or URL: {detail!r}")
        else:  # phone, whatsapp
            detail = normalize_phone(detail)
        if detail != ch.detail:
            updates[name] = ContactChannel(enabled=True, detail=detail)
    return replace(cm, **updates) if updates else cm


class ContactLink(NamedTuple):
    channel: str
    label: str
    uri: str


def build_contact_links(cm: ContactMethods) -> list[ContactLink]:
    """One clickable link per enabled channel, in fixed channel order."""
    cm = normalize_contact_methods(cm)
    links: list[ContactLink] = []
    for name in CONTACT_CHANNELS:
        ch = cm.channel(name)
        if not ch.enabled:
            continue
        detail = ch.detail
        if name == "email":
            uri = f"mailto:{detail}"
        elif name == "facebook":
            uri = detail if detail.startswith(("http://", "https://")) else f"https://www.facebook.com/{detail}"
        elif name == "phone":
            uri = f"tel:{detail}"
        else:  # whatsapp click-to-chat takes the number without '+'
            uri = f"https://wa.me/{detail.lstrip('+')}"
        links.append(ContactLink(channel=name, label=detail, uri=uri))
    return links


# ---------------------------------------------------------------------------
# approval

class ApprovalStatus(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    REJECTED = "rejected"


class RejectionReason(str, Enum):
    OUTSIDE_REGION = "outside_region"
    INSUFFICIENT_INFO = "insufficient_info"
    DUPLICATE_IDENTITY = "duplicate_identity"
    OTHER = "other"


@dataclass(frozen=True)
class ApprovalState:
    status: ApprovalStatus = ApprovalStatus.PENDING
    reason: RejectionReason | None = None
    decided_at: datetime | None = None
    decided_by: str | None = None

    def __post_init__(self):
        if self.status is ApprovalStatus.REJECTED and self.reason is None:
            raise ValidationFailed("rejected approval requires a reason")
        if self.status is ApprovalStatus.PENDING and self.reason is not None:
            raise ValidationFailed("pending approval must not carry a reason")

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "reason": self.reason.value if self.reason else None,
            "decided_at": to_iso(self.decided_at),
            "decided_by": self.decided_by,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ApprovalState":
        return cls(
            status=ApprovalStatus(raw["status"]),
            reason=RejectionReason(raw["reason"]) if raw.get("reason") else None,
            decided_at=from_iso(raw.get("decided_at")),
            decided_by=raw.get("decided_by"),
        )


# ---------------------------------------------------------------------------
# consent

@dataclass(frozen=True)
class ConsentState:
    study_consent: bool = False
    location_logging_consent: bool = False
    consented_at: datetime | None = None
    locale_shown: str = "en"
    demographics_done: bool = False
    lsns_done: bool = False

    def __post_init__(self):
        if self.location_logging_consent and not self.study_consent:
            raise ValidationFailed("location logging consent requires study consent")

    def to_dict(self) -> dict:
        return {
            "study_consent": self.study_consent,
            "location_logging_consent": self.location_logging_consent,
            "consented_at": to_iso(self.consented_at),
            "locale_shown": self.locale_shown,
            "demographics_done": self.demographics_done,
            "lsns_done": self.lsns_done,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ConsentState":
        return cls(
            study_consent=raw.get("study_consent", False),
            location_logging_consent=raw.get("location_logging_consent", False),
            consented_at=from_iso(raw.get("consented_at")),
            locale_shown=raw.get("locale_shown", "en"),
            demographics_done=raw.get("demographics_done", False),
            lsns_done=raw.get("lsns_done", False),
        )


# ---------------------------------------------------------------------------
# users

class UserGroup(str, Enum):
    FORCED_MIGRANT = "forced_migrant"
    LOCAL_FREECYCLER = "local_freecycler"
    MODERATOR = "moderator"
    UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    display_name: str
    contact_methods: ContactMethods = ContactMethods()
    locale: str = "en"
    picture_ref: str | None = None
    home_position: GeoPosition | None = None
    last_position: GeoPosition | None = None
    approval: ApprovalState = ApprovalState()
    completed_deliveries: int = 0
    blocked_ids: frozenset[str] = frozenset()
    consent: ConsentState = ConsentState()
    user_group: UserGroup = UserGroup.UNSPECIFIED

    def __post_init__(self):
        if not self.display_name.strip():
            raise ValidationFailed("display_name must be non-empty")
        if self.completed_deliveries < 0:
            raise ValidationFailed("completed_deliveries must be non-negative")
        if self.user_id in self.blocked_ids:
            raise ValidationFailed("a user cannot block themselves")

    @property
    def is_moderator(self) -> bool:
        return self.user_group is UserGroup.MODERATOR

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "display_name": self.display_name,
            "contact_methods": self.contact_methods.to_dict(),
            "locale": self.locale,
            "picture_ref": self.picture_ref,
            "home_position": self.home_position.to_dict() if self.home_position else None,
            "last_position": self.last_position.to_dict() if self.last_position else None,
            "approval": self.approval.to_dict(),
            "completed_deliveries": self.completed_deliveries,
            "blocked_ids": sorted(self.blocked_ids),
            "consent": self.consent.to_dict(),
            "user_group": self.user_group.value,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "UserProfile":
        return cls(
            user_id=raw["user_id"],
            display_name=raw["display_name"],
            contact_methods=ContactMethods.from_dict(raw.get("contact_methods", {})),
            locale=raw.get("locale", "en"),
            picture_ref=raw.get("picture_ref"),
            home_position=GeoPosition.from_dict(raw["home_position"]) if raw.get("home_position") else None,
            last_position=GeoPosition.from_dict(raw["last_position"]) if raw.get("last_position") else None,
            approval=ApprovalState.from_dict(raw["approval"]) if raw.get("approval") else ApprovalState(),
            completed_deliveries=raw.get("completed_deliveries", 0),
            blocked_ids=frozenset(raw.get("blocked_ids", [])),
            consent=ConsentState.from_dict(raw["consent"]) if raw.get("consent") else ConsentState(),
            user_group=UserGroup(raw.get("user_group", "unspecified")),
        )


# ---------------------------------------------------------------------------
# offers

class OfferStatus(str, Enum):
    OPEN = "open"
    COMPLETED = "completed"
    WITHDRAWN = "withdrawn"
    REMOVED = "removed"


TERMINAL_OFFER_STATES = frozenset({OfferStatus.COMPLETED, OfferStatus.WITHDRAWN, OfferStatus.REMOVED})


@dataclass(frozen=True)
class Offer:
    offer_id: str
    owner_id: str
    title: str
    pickup_position: GeoPosition
    created_at: datetime
    description: str = ""
    photo_ref: str | None = None
    status: OfferStatus = OfferStatus.OPEN
    completed_at: datetime | None = None
    collector_id: str | None = None
    removed_by: str | None = None

    def __post_init__(self):
        if not self.title.strip():
            raise ValidationFailed("title must be non-empty")
        if len(self.title) > MAX_TITLE_LENGTH:
            raise ValidationFailed(f"title longer than {MAX_TITLE_LENGTH} characters")
        if self.collector_id is not None and self.collector_id == self.owner_id:
            raise ValidationFailed("collector cannot be the owner")
        if self.status is OfferStatus.COMPLETED:
            if self.completed_at is None or self.completed_at < self.created_at:
                raise ValidationFailed("completed offer requires completed_at >= created_at")
        if self.status is OfferStatus.REMOVED and self.removed_by is None:
            raise ValidationFailed("removed offer requires removed_by")

    def to_dict(self) -> dict:
        return {
            "offer_id": self.offer_id,
            "owner_id": self.owner_id,
            "title": self.title,
            "description": self.description,
            "photo_ref": self.photo_ref,
            "pickup_position": self.pickup_position.to_dict(),
            "status": self.status.value,
            "created_at": to_iso(self.created_at),
            "completed_at": to_iso(self.completed_at),
            "collector_id": self.collector_id,
            "removed_by": self.removed_by,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Offer":
        return cls(
            offer_id=raw["offer_id"],
            owner_id=raw["owner_id"],
            title=raw["title"],
            description=raw.get("description", ""),
            photo_ref=raw.get("photo_ref"),
            pickup_position=GeoPosition.from_dict(raw["pickup_position"]),
            status=OfferStatus(raw["status"]),
            created_at=from_iso(raw["created_at"]),
            completed_at=from_iso(raw.get("completed_at")),
            collector_id=raw.get("collector_id"),
            removed_by=raw.get("removed_by"),
        )


# ---------------------------------------------------------------------------
# notifications emitted by transitions (persisted by the service layer)

class NotificationKind(str, Enum):
    WELCOME_EMAIL = "welcome_email"
    APPROVAL_PENDING_NOTICE = "approval_pending_notice"
    REJECTION_NOTICE = "rejection_notice"


@dataclass(frozen=True)
class NotificationDraft:
    kind: NotificationKind
    recipient_id: str
    payload: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# operations

class ApprovalDecision(str, Enum):
    APPROVE = "approve"
    REJECT = "reject"


@dataclass(frozen=True)
class ApprovalTransition:
    user: UserProfile
    notifications: tuple[NotificationDraft, ...]


def transition_approval(
    user: UserProfile,
    decision: ApprovalDecision,
    moderator_id: str,
    now: datetime,
    reason: RejectionReason | None = None,
) -> ApprovalTransition:
    """Decide a pending account. Approval queues a welcome email."""
    if user.approval.status is not ApprovalStatus.PENDING:
        raise NotPending(f"user {user.user_id} already {user.approval.status.value}")
    if decision is ApprovalDecision.REJECT and reason is None:
        raise MissingReason("rejection requires a reason")

    if decision is ApprovalDecision.APPROVE:
        approval = ApprovalState(status=ApprovalStatus.APPROVED, decided_at=now, decided_by=moderator_id)
        note = NotificationDraft(kind=NotificationKind.WELCOME_EMAIL, recipient_id=user.user_id)
    else:
        approval = ApprovalState(
            status=ApprovalStatus.REJECTED, reason=reason, decided_at=now, decided_by=moderator_id
        )
        note = NotificationDraft(
            kind=NotificationKind.REJECTION_NOTICE,
            recipient_id=user.user_id,
            payload={"reason": reason.value},
        )
    return ApprovalTransition(user=replace(user, approval=approval), notifications=(note,))


class OfferEventKind(str, Enum):
    COMPLETE = "complete"
    WITHDRAW = "withdraw"
    REMOVE = "remove"


@dataclass(frozen=True)
class OfferEvent:
    kind: OfferEventKind
    collector_id: str | None = None


def transition_offer(
    offer: Offer,
    event: OfferEvent,
    actor_id: str,
    now: datetime,
    actor_is_moderator: bool = False,
) -> Offer:
    """Apply a lifecycle event to an open offer.

    Terminal states never transition further. Complete and Withdraw are
    owner-only; Remove is moderator-only. Star-count bookkeeping and review
    task creation are orchestrated by the caller.
    """
    if offer.status is not OfferStatus.OPEN:
        raise NotOpen(f"offer {offer.offer_id} is {offer.status.value}")

    if event.kind is OfferEventKind.COMPLETE:
        if actor_id != offer.owner_id:
            raise NotAuthorized("only the owner can complete an offer")
        return replace(offer, status=OfferStatus.COMPLETED, completed_at=now, collector_id=event.collector_id)
    if event.kind is OfferEventKind.WITHDRAW:
        if actor_id != offer.owner_id:
            raise NotAuthorized("only the owner can withdraw an offer")
        return replace(offer, status=OfferStatus.WITHDRAWN)
    # REMOVE
    if not actor_is_moderator:
        raise NotAuthorized("only a moderator can remove an offer")
    return replace(offer, status=OfferStatus.REMOVED, removed_by=actor_id)


def block_user(actor: UserProfile, target_id: str, user_exists: Callable[[str], bool]) -> UserProfile:
    """Add ``target_id`` to the actor's block set. Idempotent."""
    if target_id == actor.user_id:
        raise SelfBlock("cannot block yourself")
    if not user_exists(target_id):
        raise UnknownUser(f"no such user: {target_id}")
    if target_id in actor.blocked_ids:
        return actor
    return replace(actor, blocked_ids=actor.blocked_ids | {target_id})


def is_visible(offer: Offer, viewer: UserProfile, owner: UserProfile, owner_available: bool) -> bool:
    """Pure visibility predicate for one offer and one viewer.

    Owners always see their own open offers, even while unavailable. For
    everyone else the offer must be open, the owner available, and neither
    party may have blocked the other.
    """
    if offer.status is not OfferStatus.OPEN:
        return False
    if viewer.user_id == offer.owner_id:
        return True
    if not owner_available:
        return False
    if offer.owner_id in viewer.blocked_ids:
        return False
    if viewer.user_id in owner.blocked_ids:
        return False
    return True


def derive_star_count(user_id: str, offers: Iterable[Offer]) -> int:
    """Count of offers this user owned and successfully delivered."""
    return sum(1 for o in offers if o.owner_id == user_id and o.status is OfferStatus.COMPLETED)


def increment_deliveries(user: UserProfile) -> UserProfile:
    return replace(user, completed_deliveries=user.completed_deliveries + 1)
