"""Moderation endpoints plus the operator (admin token) surface."""

from __future__ import annotations

from dataclasses import replace
from datetime import datetime

from fastapi import APIRouter, Depends, Query, Request

from ..domain import (
    ApprovalDecision,
    ApprovalStatus,
    OfferEvent,
    OfferEventKind,
    RejectionReason,
    UserGroup,
    transition_offer,
    transition_approval,
)
from ..errors import MissingReason, ValidationFailed
from ..export import build_export
from ..telemetry import Action
from ..util import from_iso
from .http import ModerationActor, get_runtime, require_admin, require_moderation
from .repos import KIND_REPORT
from .schemas import LocaleAddBody, RejectBody
from .stats import compute_stats

router = APIRouter()


# ---------------------------------------------------------------------------
# moderation


def _user_summary(rt, user) -> dict:
    annotations = [
        dict(r.payload)
        for r in rt.repos.store.scan(KIND_REPORT, lambda rec: rec.payload.get("user_id") == user.user_id)
    ]
    return {
        "user_id": user.user_id,
        "display_name": user.display_name,
        "locale": user.locale,
        "user_group": user.user_group.value,
        "approval": user.approval.to_dict(),
        "annotations": annotations,
    }


@router.get("/v1/moderation/users")
def list_users(
    request: Request,
    actor: ModerationActor = Depends(require_moderation),
    status: str = Query(default="pending"),
):
    rt = get_runtime(request)
    if status not in ("pending", "approved", "rejected", "all"):
        raise ValidationFailed("status must be pending, approved, rejected, or all")
    users = rt.repos.all_users()
    if status != "all":
        users = [u for u in users if u.approval.status.value == status]
    return {"users": [_user_summary(rt, u) for u in sorted(users, key=lambda u: u.user_id)]}


@router.post("/v1/moderation/users/{user_id}/approve")
def approve_user(request: Request, user_id: str, actor: ModerationActor = Depends(require_moderation)):
    rt = get_runtime(request)
    now = rt.now()
    pending_notes = []

    def apply(user):
        result = transition_approval(user, ApprovalDecision.APPROVE, actor.actor_id, now)
        pending_notes[:] = result.notifications
        return result.user

    user = rt.repos.mutate_user(user_id, apply)
    for note in pending_notes:
        rt.notifications.enqueue(note)
    if not actor.is_operator:
        rt.telemetry.log(actor.actor_id, Action.APPROVE_USER, at=now, entity_id=user_id)
    rt.bump_version()
    return {"user_id": user_id, "approval": user.approval.to_dict()}


@router.post("/v1/moderation/users/{user_id}/reject")
def reject_user(
    request: Request, user_id: str, body: RejectBody, actor: ModerationActor = Depends(require_moderation)
):
    rt = get_runtime(request)
    if not body.reason:
        raise MissingReason("rejection requires a reason")
    try:
        reason = RejectionReason(body.reason.replace("-", "_"))
    except ValueError:
        raise ValidationFailed(
            f"unknown reason {body.reason!r}; expected one of "
            + ", ".join(r.value for r in RejectionReason)
        )
    now = rt.now()
    pending_notes = []

    def apply(user):
        result = transition_approval(user, ApprovalDecision.REJECT, actor.actor_id, now, reason=reason)
        pending_notes[:] = result.notifications
        return result.user

    user = rt.repos.mutate_user(user_id, apply)
    for note in pending_notes:
        rt.notifications.enqueue(note)
    if not actor.is_operator:
        rt.telemetry.log(actor.actor_id, Action.REJECT_USER, at=now, entity_id=user_id)
    rt.bump_version()
    return {"user_id": user_id, "approval": user.approval.to_dict()}


@router.post("/v1/moderation/offers/{offer_id}/remove")
def remove_offer(request: Request, offer_id: str, actor: ModerationActor = Depends(require_moderation)):
    rt = get_runtime(request)
    now = rt.now()
    event = OfferEvent(kind=OfferEventKind.REMOVE)
    offer = rt.repos.mutate_offer(
        offer_id, lambda o: transition_offer(o, event, actor.actor_id, now, actor_is_moderator=True)
    )
    if not actor.is_operator:
        rt.telemetry.log(actor.actor_id, Action.REMOVE_OFFER, at=now, entity_id=offer_id)
    rt.bump_version()
    return offer.to_dict()


@router.get("/v1/moderation/reports")
def list_reports(request: Request, actor: ModerationActor = Depends(require_moderation)):
    rt = get_runtime(request)
    reports = [dict(r.payload) for r in rt.repos.store.scan(KIND_REPORT)]
    reports.sort(key=lambda r: (r.get("created_at") or "", r.get("report_id") or ""))
    return {"reports": reports}


# ---------------------------------------------------------------------------
# operator-only surface


@router.get("/v1/admin/trial")
def trial_status(request: Request, _=Depends(require_admin)):
    rt = get_runtime(request)
    status = rt.trial_status()
    users = rt.repos.all_users()
    approved = sum(1 for u in users if u.approval.status is ApprovalStatus.APPROVED)
    return {
        **status,
        "counts": {
            "users_total": len(users),
            "users_approved": approved,
            "offers": len(rt.repos.all_offers()),
            "reviews": len(rt.repos.all_reviews()),
        },
    }


@router.post("/v1/admin/trial/open")
def trial_open(request: Request, _=Depends(require_admin)):
    rt = get_runtime(request)
    status = rt.trial_open()
    rt.bump_version()
    return status


@router.post("/v1/admin/trial/close")
def trial_close(request: Request, _=Depends(require_admin)):
    rt = get_runtime(request)
    status = rt.trial_close()
    rt.bump_version()
    return status


@router.get("/v1/admin/export")
def admin_export(request: Request, _=Depends(require_admin)):
    rt = get_runtime(request)
    key_path = rt.store.data_dir / "export_key"
    if key_path.exists():
        key = bytes.fromhex(key_path.read_text(encoding="utf-8").strip())
    else:
        import os

        key = os.urandom(32)
        key_path.write_text(key.hex() + "\n", encoding="utf-8")
    files = build_export(rt.store, key)
    return {"files": {path: data.decode("utf-8") for path, data in files.items()}}


def _parse_ts(raw: str | None) -> datetime | None:
    if raw is None:
        return None
    try:
        return from_iso(raw)
    except ValueError as exc:
        raise ValidationFailed(f"bad timestamp {raw!r}: {exc}")


@router.get("/v1/admin/stats")
def admin_stats(
    request: Request,
    _=Depends(require_admin),
    window_start: str | None = Query(default=None),
    window_end: str | None = Query(default=None),
):
    rt = get_runtime(request)
    return compute_stats(
        rt.repos,
        rt.telemetry,
        window_start=_parse_ts(window_start),
        window_end=_parse_ts(window_end),
        now=rt.now(),
    )


@router.post("/v1/admin/locales", status_code=201)
def add_locale(request: Request, body: LocaleAddBody, _=Depends(require_admin)):
    rt = get_runtime(request)
    bundle = rt.locales.add_dict(body.bundle)
    rt.bump_version()
    return {"locale": bundle.locale, "keys": len(bundle.strings)}


@router.get("/v1/admin/locales/check")
def check_locales(request: Request, _=Depends(require_admin)):
    rt = get_runtime(request)
    report = rt.locales.check_all()
    return {"ok": True, "locales": rt.locales.locales, "report": report}


@router.post("/v1/admin/users/{user_id}/promote")
def promote_user(request: Request, user_id: str, _=Depends(require_admin)):
    rt = get_runtime(request)
    user = rt.repos.mutate_user(user_id, lambda u: replace(u, user_group=UserGroup.MODERATOR))
    rt.bump_version()
    return {"user_id": user_id, "user_group": user.user_group.value}


@router.get("/v1/admin/outbox")
def outbox_status(request: Request, _=Depends(require_admin)):
    rt = get_runtime(request)
    sent = sorted(p.name for p in rt.notifications.client.outbox_dir.glob("*.json"))
    return {"sent": sent}
