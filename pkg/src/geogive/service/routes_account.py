"""Authenticated account surface: own profile, settings, location, blocks."""

from __future__ import annotations

from dataclasses import replace

from fastapi import APIRouter, Depends, Request, Response

from ..domain import (
    ContactChannel,
    ContactMethods,
    GeoPosition,
    OfferStatus,
    UserProfile,
    block_user,
    build_contact_links,
    normalize_contact_methods,
)
from ..errors import (
    NoContactMethod,
    NotFound,
    PayloadTooLarge,
    UnknownLocale,
    UnsupportedMedia,
    ValidationFailed,
)
from ..geo import derive_availability
from ..study import gate_access
from ..telemetry import Action
from ..util import to_iso
from .http import AuthContext, get_runtime, require_full_access, require_session
from .repos import KIND_SESSION
from .schemas import BlockBody, PositionBody, SettingsBody

router = APIRouter()

ALLOWED_IMAGE_TYPES = ("image/jpeg", "image/png", "image/gif", "image/webp")


def me_view(rt, user: UserProfile) -> dict:
    decision = gate_access(user.consent)
    return {
        "user_id": user.user_id,
        "display_name": user.display_name,
        "picture_ref": user.picture_ref,
        "locale": user.locale,
        "user_group": user.user_group.value,
        "moderator": user.is_moderator,
        "contact_methods": user.contact_methods.to_dict(),
        "home_position": user.home_position.to_dict() if user.home_position else None,
        "last_position": user.last_position.to_dict() if user.last_position else None,
        "approval": user.approval.to_dict(),
        "star_count": user.completed_deliveries,
        "blocked_ids": sorted(user.blocked_ids),
        "consent": user.consent.to_dict(),
        "gate": {"full": decision.full, "missing": list(decision.missing)},
        "available": derive_availability(user, rt.geofence, rt.now()),
    }


@router.get("/v1/users/me")
def get_me(request: Request, ctx: AuthContext = Depends(require_session)):
    return me_view(get_runtime(request), ctx.user)


@router.patch("/v1/users/me")
def update_me(request: Request, body: SettingsBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    provided = body.model_fields_set
    if not provided:
        raise ValidationFailed("nothing to update")

    # Language must be switchable before consent; everything else is gated.
    if provided != {"locale"}:
        require_full_access(ctx.user)

    if "locale" in provided and not rt.locales.has(body.locale):
        raise UnknownLocale(f"no bundle for locale {body.locale!r}")

    new_cm: ContactMethods | None = None
    if "contact_methods" in provided and body.contact_methods is not None:
        new_cm = normalize_contact_methods(
            ContactMethods(
                **{
                    name: ContactChannel(enabled=ch.enabled, detail=ch.detail)
                    for name, ch in (
                        ("email", body.contact_methods.email),
                        ("facebook", body.contact_methods.facebook),
                        ("phone", body.contact_methods.phone),
                        ("whatsapp", body.contact_methods.whatsapp),
                    )
                }
            )
        )
        if not new_cm.enabled_channels():
            has_open_offer = any(
                o.owner_id == ctx.user.user_id and o.status is OfferStatus.OPEN for o in rt.repos.all_offers()
            )
            if has_open_offer:
                raise NoContactMethod("you have open offers; keep at least one contact channel enabled")

    home: GeoPosition | None = None
    if "home_position" in provided and body.home_position is not None:
        home = GeoPosition.ingest(
            body.home_position.lat, body.home_position.lon, body.home_position.recorded_at or rt.now(), rt.now()
        )

    if "picture_ref" in provided and body.picture_ref is not None:
        if rt.store.get_blob(body.picture_ref) is None:
            raise ValidationFailed("picture_ref does not name an uploaded blob")

    def apply(user: UserProfile) -> UserProfile:
        changes = {}
        if "display_name" in provided and body.display_name is not None:
            changes["display_name"] = body.display_name
        if "picture_ref" in provided:
            changes["picture_ref"] = body.picture_ref
        if "contact_methods" in provided and new_cm is not None:
            changes["contact_methods"] = new_cm
        if "locale" in provided:
            changes["locale"] = body.locale
        if "home_position" in provided:
            changes["home_position"] = home
        return replace(user, **changes)

    user = rt.repos.mutate_user(ctx.user.user_id, apply)

    settings_fields = {"contact_methods", "locale", "home_position"}
    if provided == {"locale"}:
        action = Action.CHANGE_LOCALE
    elif provided & settings_fields:
        action = Action.UPDATE_SETTINGS
    else:
        action = Action.UPDATE_PROFILE
    rt.telemetry.log(user.user_id, action, at=rt.now())
    rt.bump_version()
    return me_view(rt, user)


@router.patch("/v1/users/me/location")
def update_location(request: Request, body: PositionBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    recorded_at = body.recorded_at or rt.now()
    if recorded_at.tzinfo is None:
        from datetime import timezone

        recorded_at = recorded_at.replace(tzinfo=timezone.utc)
    position = GeoPosition.ingest(body.lat, body.lon, recorded_at, rt.now())

    user = rt.repos.mutate_user(ctx.user.user_id, lambda u: replace(u, last_position=position))
    available = derive_availability(user, rt.geofence, rt.now())
    rt.telemetry.log(user.user_id, Action.UPDATE_LOCATION, at=rt.now(), position=position)
    rt.bump_version()
    return {"available": available, "position": position.to_dict(), "region": rt.geofence.region_label}


@router.post("/v1/users/me/blocks")
def add_block(request: Request, body: BlockBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    user = rt.repos.mutate_user(
        ctx.user.user_id, lambda u: block_user(u, body.user_id, rt.repos.user_exists)
    )
    rt.telemetry.log(user.user_id, Action.BLOCK_USER, at=rt.now(), entity_id=body.user_id)
    rt.bump_version()
    return {"blocked_ids": sorted(user.blocked_ids)}


@router.delete("/v1/sessions/current")
def logout(request: Request, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    rt.repos.mutate(KIND_SESSION, ctx.session_key, lambda s: {**s, "expires_at": to_iso(rt.now())})
    return {"ok": True}


@router.post("/v1/blobs", status_code=201)
async def upload_blob(request: Request, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    content_type = request.headers.get("content-type", "").split(";")[0].strip()
    if content_type not in ALLOWED_IMAGE_TYPES:
        raise UnsupportedMedia(f"content type {content_type!r} not allowed; use one of {ALLOWED_IMAGE_TYPES}")
    data = await request.body()
    if len(data) > rt.config.max_blob_bytes:
        raise PayloadTooLarge(f"blob exceeds {rt.config.max_blob_bytes} bytes")
    if not data:
        raise ValidationFailed("empty upload")
    digest = rt.store.put_blob(data)
    rt.repos.upsert("blob_meta", digest, {"content_type": content_type, "size": len(data)})
    return {"blob_id": digest, "size": len(data)}


@router.get("/v1/blobs/{blob_id}")
def get_blob(request: Request, blob_id: str, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    data = rt.store.get_blob(blob_id)
    if data is None:
        raise NotFound(f"no blob {blob_id}")
    meta = rt.repos.get_payload("blob_meta", blob_id) or {}
    return Response(content=data, media_type=meta.get("content_type", "application/octet-stream"))


def contact_links_view(cm: ContactMethods) -> list[dict]:
    return [{"channel": l.channel, "label": l.label, "uri": l.uri} for l in build_contact_links(cm)]
