"""Offer browsing and lifecycle, plus hand-over review tasks."""

from __future__ import annotations

import hashlib
from datetime import timezone
from typing import Callable

from fastapi import APIRouter, Depends, Header, Query, Request

from ..domain import (
    GeoPosition,
    Offer,
    OfferEvent,
    OfferEventKind,
    increment_deliveries,
    is_visible,
    transition_offer,
)
from ..errors import NoContactMethod, NotFound, NoViewerPosition, UnknownUser, ValidationFailed, VersionConflict
from ..geo import derive_availability, offers_with_distance
from ..study import (
    ContactChannelUsed,
    HandOverReview,
    PlaceCategory,
    ReviewTaskState,
    create_pending_review,
    dismiss_review,
    submit_review,
)
from ..telemetry import Action
from ..util import new_id
from .http import AuthContext, get_runtime, require_full_access, require_session
from .repos import KIND_IDEMPOTENCY, KIND_REVIEW, KIND_TASK
from .routes_account import contact_links_view
from .schemas import CompleteBody, OfferBody, ReviewBody

router = APIRouter()


def _offer_card(rt, offer: Offer, owner, distance_km: float) -> dict:
    return {
        "offer_id": offer.offer_id,
        "title": offer.title,
        "description": offer.description,
        "photo_ref": offer.photo_ref,
        "pickup_position": offer.pickup_position.to_dict(),
        "created_at": offer.created_at.astimezone(timezone.utc).isoformat().replace("+00:00", "Z"),
        "distance_km": round(distance_km, 1),
        "owner": {
            "user_id": owner.user_id,
            "display_name": owner.display_name,
            "star_count": owner.completed_deliveries,
            "contact_links": contact_links_view(owner.contact_methods),
        },
    }


@router.get("/v1/offers")
def list_offers(
    request: Request,
    ctx: AuthContext = Depends(require_session),
    lat: float | None = Query(default=None),
    lon: float | None = Query(default=None),
    view: str = Query(default="list"),
    refresh: bool = Query(default=False),
):
    rt = get_runtime(request)
    require_full_access(ctx.user)

    if lat is not None and lon is not None:
        viewer_pos = GeoPosition(lat=lat, lon=lon, recorded_at=rt.now())
    elif ctx.user.last_position is not None:
        viewer_pos = ctx.user.last_position
    else:
        raise NoViewerPosition("no stored position and no lat/lon override supplied")

    now = rt.now()
    owners: dict[str, object] = {}
    availability: dict[str, bool] = {}
    visible = []
    for offer in rt.repos.all_offers():
        owner = owners.get(offer.owner_id)
        if owner is None:
            owner = rt.repos.find_user(offer.owner_id)
            if owner is None:
                continue
            owners[offer.owner_id] = owner
            availability[offer.owner_id] = derive_availability(owner, rt.geofence, now)
        if is_visible(offer, ctx.user, owner, availability[offer.owner_id]):
            visible.append(offer)

    ranked = offers_with_distance(viewer_pos, visible)
    cards = [_offer_card(rt, offer, owners[offer.owner_id], d) for offer, d in ranked]

    if refresh:
        action = Action.REFRESH
    else:
        action = Action.VIEW_MAP if view == "map" else Action.VIEW_LIST
    rt.telemetry.log(ctx.user.user_id, action, at=now)
    return {"data_version": rt.version_stamp, "region": rt.geofence.region_label, "offers": cards}


@router.post("/v1/offers", status_code=201)
def create_offer(request: Request, body: OfferBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    if not ctx.user.contact_methods.enabled_channels():
        raise NoContactMethod("enable at least one contact channel before posting an offer")
    if body.photo_ref is not None and rt.store.get_blob(body.photo_ref) is None:
        raise ValidationFailed("photo_ref does not name an uploaded blob")

    now = rt.now()
    recorded_at = body.pickup_position.recorded_at or now
    if recorded_at.tzinfo is None:
        recorded_at = recorded_at.replace(tzinfo=timezone.utc)
    pickup = GeoPosition.ingest(body.pickup_position.lat, body.pickup_position.lon, recorded_at, now)
    offer = Offer(
        offer_id=new_id("o"),
        owner_id=ctx.user.user_id,
        title=body.title,
        description=body.description,
        photo_ref=body.photo_ref,
        pickup_position=pickup,
        created_at=now,
    )
    rt.repos.save_new_offer(offer)
    rt.telemetry.log(ctx.user.user_id, Action.CREATE_OFFER, at=now, entity_id=offer.offer_id)
    rt.bump_version()
    return offer.to_dict()


def _task_id_for(offer_id: str) -> Callable[[str], str]:
    # Natural-key task ids make duplicate completion deliveries collide on
    # create instead of spawning second tasks.
    return lambda user_id: f"rt_{offer_id}_{user_id}"


@router.post("/v1/offers/{offer_id}/complete")
def complete_offer(
    request: Request,
    offer_id: str,
    body: CompleteBody,
    ctx: AuthContext = Depends(require_session),
    idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
):
    rt = get_runtime(request)
    require_full_access(ctx.user)

    idem_id = None
    if idempotency_key:
        idem_id = hashlib.sha256(f"complete:{ctx.user.user_id}:{idempotency_key}".encode()).hexdigest()
        stored = rt.repos.get_payload(KIND_IDEMPOTENCY, idem_id)
        if stored is not None:
            return stored["response"]

    if body.collector_id is not None and not rt.repos.user_exists(body.collector_id):
        raise UnknownUser(f"collector {body.collector_id} does not exist")

    now = rt.now()
    event = OfferEvent(kind=OfferEventKind.COMPLETE, collector_id=body.collector_id)
    offer = rt.repos.mutate_offer(
        offer_id, lambda o: transition_offer(o, event, ctx.user.user_id, now)
    )
    rt.repos.mutate_user(offer.owner_id, increment_deliveries)

    existing = rt.repos.tasks_for_offer(offer_id)
    tasks = create_pending_review(offer, existing, now, _task_id_for(offer_id))
    for task in tasks:
        try:
            rt.repos.save_task(task, 0)
        except VersionConflict:
            pass  # concurrent duplicate delivery of the same completion

    rt.telemetry.log(ctx.user.user_id, Action.COMPLETE_OFFER, at=now, entity_id=offer_id)
    rt.bump_version()
    response = {
        "offer": offer.to_dict(),
        "review_tasks": [t.to_dict() for t in sorted(tasks, key=lambda t: t.task_id)],
    }
    if idem_id:
        try:
            rt.repos.create(KIND_IDEMPOTENCY, idem_id, {"response": response})
        except VersionConflict:
            pass
    return response


@router.post("/v1/offers/{offer_id}/withdraw")
def withdraw_offer(request: Request, offer_id: str, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    now = rt.now()
    event = OfferEvent(kind=OfferEventKind.WITHDRAW)
    offer = rt.repos.mutate_offer(offer_id, lambda o: transition_offer(o, event, ctx.user.user_id, now))
    rt.telemetry.log(ctx.user.user_id, Action.WITHDRAW_OFFER, at=now, entity_id=offer_id)
    rt.bump_version()
    return offer.to_dict()


@router.get("/v1/reviews/pending")
def pending_reviews(request: Request, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    tasks = [t for t in rt.repos.tasks_for_user(ctx.user.user_id) if t.state is ReviewTaskState.PENDING]
    out = []
    for task in sorted(tasks, key=lambda t: t.created_at):
        try:
            title = rt.repos.load_offer(task.offer_id).title
        except NotFound:
            title = None
        entry = task.to_dict()
        entry["offer_title"] = title
        out.append(entry)
    return {"tasks": out}


@router.post("/v1/reviews", status_code=201)
def submit_handover_review(request: Request, body: ReviewBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    task = rt.repos.load_task(body.task_id)

    try:
        channel = ContactChannelUsed(body.contact_channel)
    except ValueError:
        raise ValidationFailed(f"unknown contact channel {body.contact_channel!r}")
    category = None
    if body.place_category is not None:
        try:
            category = PlaceCategory(body.place_category)
        except ValueError:
            raise ValidationFailed(f"unknown place category {body.place_category!r}")

    review = HandOverReview(
        offer_id=task.offer_id,
        reviewer_id=ctx.user.user_id,
        counterparty_id=body.counterparty_id,
        place=body.place,
        place_category=category,
        contact_channel=channel,
        satisfaction=body.satisfaction,
        likely_repeat=body.likely_repeat,
        submitted_at=rt.now(),
    )
    stored, done_task = submit_review(task, review, rt.repos.all_reviews())

    record = rt.store.get(KIND_TASK, task.task_id)
    rt.repos.create(KIND_REVIEW, f"{review.offer_id}:{review.reviewer_id}", stored.to_dict())
    rt.store.put_if_version(KIND_TASK, task.task_id, record.version, done_task.to_dict())

    rt.telemetry.log(ctx.user.user_id, Action.SUBMIT_REVIEW, at=rt.now(), entity_id=task.offer_id)
    rt.bump_version()
    return {"review": stored.to_dict(), "task": done_task.to_dict()}


@router.post("/v1/reviews/{task_id}/dismiss")
def dismiss_review_task(request: Request, task_id: str, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    task = rt.repos.load_task(task_id)
    if task.user_id != ctx.user.user_id:
        raise ValidationFailed("this review task belongs to another user")
    record = rt.store.get(KIND_TASK, task_id)
    dismissed = dismiss_review(task)
    rt.store.put_if_version(KIND_TASK, task_id, record.version, dismissed.to_dict())
    rt.telemetry.log(ctx.user.user_id, Action.DISMISS_REVIEW, at=rt.now(), entity_id=task.offer_id)
    rt.bump_version()
    return dismissed.to_dict()
