"""Consent-aware passive-sampling event log and trial statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Callable, Iterable

from .domain import GeoPosition
from .errors import BadWindow, EmptyGroup, NoUsers, UnknownUser
from .util import from_iso, to_iso


class Action(str, Enum):
    SIGNUP = "signup"
    LOGIN = "login"
    UPDATE_PROFILE = "update_profile"
    UPDATE_SETTINGS = "update_settings"
    UPDATE_LOCATION = "update_location"
    CREATE_OFFER = "create_offer"
    COMPLETE_OFFER = "complete_offer"
    WITHDRAW_OFFER = "withdraw_offer"
    VIEW_MAP = "view_map"
    VIEW_LIST = "view_list"
    REFRESH = "refresh"
    SUBMIT_REVIEW = "submit_review"
    DISMISS_REVIEW = "dismiss_review"
    BLOCK_USER = "block_user"
    CHANGE_LOCALE = "change_locale"
    # Extensions beyond the base vocabulary (the action set is open-ended):
    RECORD_CONSENT = "record_consent"
    SUBMIT_SURVEY = "submit_survey"
    APPROVE_USER = "approve_user"
    REJECT_USER = "reject_user"
    REMOVE_OFFER = "remove_offer"


# Actions whose entity_id refers to a user (relevant for pseudonymization).
USER_ENTITY_ACTIONS = frozenset({Action.BLOCK_USER, Action.APPROVE_USER, Action.REJECT_USER})


@dataclass(frozen=True)
class TelemetryEvent:
    event_id: int
    user_id: str
    action: Action
    at: datetime
    entity_id: str | None = None
    position: GeoPosition | None = None

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "user_id": self.user_id,
            "action": self.action.value,
            "entity_id": self.entity_id,
            "at": to_iso(self.at),
            "position": self.position.to_dict() if self.position else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TelemetryEvent":
        return cls(
            event_id=raw["event_id"],
            user_id=raw["user_id"],
            action=Action(raw["action"]),
            entity_id=raw.get("entity_id"),
            at=from_iso(raw["at"]),
            position=GeoPosition.from_dict(raw["position"]) if raw.get("position") else None,
        )


class TelemetryLog:
    """Append-only event log with consent stripping at write time.

    Positions are persisted only when the user's location-logging consent is
    true at the moment the event is logged; stripping is therefore
    irreversible. Sequencing and durability come from the underlying store.
    """

    def __init__(
        self,
        store,
        user_exists: Callable[[str], bool],
        location_consent: Callable[[str], bool],
    ):
        self._store = store
        self._user_exists = user_exists
        self._location_consent = location_consent

    def log(
        self,
        user_id: str,
        action: Action,
        at: datetime,
        entity_id: str | None = None,
        position: GeoPosition | None = None,
    ) -> TelemetryEvent:
        if not self._user_exists(user_id):
            raise UnknownUser(f"no such user: {user_id}")
        if position is not None and not self._location_consent(user_id):
            position = None
        draft = {
            "user_id": user_id,
            "action": action.value,
            "entity_id": entity_id,
            "at": to_iso(at),
            "position": position.to_dict() if position else None,
        }
        seq = self._store.append_log(draft)
        return TelemetryEvent(
            event_id=seq, user_id=user_id, action=action, entity_id=entity_id, at=at, position=position
        )

    def read(self, from_seq: int = 0) -> list[TelemetryEvent]:
        events = []
        for seq, raw in self._store.read_log(from_seq):
            events.append(TelemetryEvent.from_dict({"event_id": seq, **raw}))
        return events


# ---------------------------------------------------------------------------
# tally analysis


@dataclass(frozen=True)
class TallyReport:
    by_action: dict[str, int]
    by_user: dict[str, int]
    by_action_user: dict[tuple[str, str], int]
    window: tuple[datetime, datetime]

    @property
    def total(self) -> int:
        return sum(self.by_action.values())


def tally(events: Iterable[TelemetryEvent], start: datetime, end: datetime) -> TallyReport:
    """Count events by action, by user, and by (action, user) within a window."""
    if start > end:
        raise BadWindow("window start is after its end")
    by_action: dict[str, int] = {}
    by_user: dict[str, int] = {}
    by_action_user: dict[tuple[str, str], int] = {}
    for ev in events:
        if not (start <= ev.at <= end):
            continue
        by_action[ev.action.value] = by_action.get(ev.action.value, 0) + 1
        by_user[ev.user_id] = by_user.get(ev.user_id, 0) + 1
        key = (ev.action.value, ev.user_id)
        by_action_user[key] = by_action_user.get(key, 0) + 1
    return TallyReport(by_action=by_action, by_user=by_user, by_action_user=by_action_user, window=(start, end))


# ---------------------------------------------------------------------------
# trial statistics


def round_half_up(value: float | Decimal, decimals: int = 1) -> float:
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class PostingRate:
    posts_per_user: float
    users_per_post: float  # math.inf when nothing was posted
    rendered: str


def render_posting_rate(offer_creations: int, user_count: int) -> str:
    """Human rendering of the posting ratio, "1 post per N users".

    N is users/posts rounded to the nearest integer; the approximation mark
    appears only when the ratio is not exact.
    """
    if offer_creations == 0:
        return "no posts"
    exact = user_count % offer_creations == 0
    n = int(round_half_up(user_count / offer_creations, 0))
    prefix = "" if exact else "≈"
    return f"{prefix}1 post per {n} users"


def posting_rate(offer_creations: int, user_count: int) -> PostingRate:
    if user_count <= 0:
        raise NoUsers("posting rate requires at least one user")
    users_per_post = math.inf if offer_creations == 0 else user_count / offer_creations
    return PostingRate(
        posts_per_user=offer_creations / user_count,
        users_per_post=users_per_post,
        rendered=render_posting_rate(offer_creations, user_count),
    )


def lsns_group_stats(scores_by_group: Iterable[tuple[str, int]]) -> dict[str, float]:
    """Arithmetic mean per group, rounded half-up to one decimal."""
    sums: dict[str, list[int]] = {}
    for group, score in scores_by_group:
        sums.setdefault(group, []).append(score)
    if not sums:
        raise EmptyGroup("no scores to aggregate")
    return {
        group: round_half_up(Decimal(sum(values)) / Decimal(len(values)))
        for group, values in sorted(sums.items())
    }
