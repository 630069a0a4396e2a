"""Auth dependencies, error mapping, and response helpers for the API."""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import Request
from fastapi.responses import JSONResponse

from ..domain import UserProfile
from ..errors import (
    AccountRejected,
    ConsentIncomplete,
    GeogiveError,
    NotAdmin,
    NotModerator,
    Unauthenticated,
)
from ..study import gate_access
from ..util import from_iso
from .repos import KIND_SESSION
from .runtime import ServiceRuntime

STATUS_BY_CODE = {
    "unauthenticated": 401,
    "bad_credentials": 401,
    "provider_verification_failed": 401,
    "account_rejected": 403,
    "consent_incomplete": 403,
    "not_moderator": 403,
    "not_admin": 403,
    "not_authorized": 403,
    "trial_closed": 403,
    "not_approved": 403,
    "reviewer_mismatch": 403,
    "not_found": 404,
    "unknown_user": 404,
    "not_pending": 409,
    "not_open": 409,
    "duplicate_email": 409,
    "duplicate_review": 409,
    "task_not_pending": 409,
    "version_conflict": 409,
    "conflict": 409,
    "invalid_transition": 409,
    "payload_too_large": 413,
    "unsupported_media": 415,
    "validation_failed": 422,
    "missing_reason": 422,
    "invalid_detail": 422,
    "invalid_position": 422,
    "weak_password": 422,
    "self_block": 422,
    "no_viewer_position": 422,
    "no_contact_method": 422,
    "unknown_locale": 422,
    "bad_window": 422,
    "out_of_range": 422,
    "empty_group": 422,
    "no_users": 422,
    "key_parity_violation": 422,
    "parse_error": 422,
    "geofence_config_invalid": 422,
    "rate_limited": 429,
    "store_corrupt": 500,
}


def error_response(exc: GeogiveError) -> JSONResponse:
    body = {"code": exc.code, "message": exc.message}
    if exc.details:
        body["details"] = exc.details
    return JSONResponse(status_code=STATUS_BY_CODE.get(exc.code, 500), content=body)


def get_runtime(request: Request) -> ServiceRuntime:
    return request.app.state.runtime


@dataclass
class AuthContext:
    user: UserProfile
    session_key: str


def _bearer_token(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip() or None
    return None


def require_session(request: Request) -> AuthContext:
    """Resolve the bearer token to a live session and its user."""
    from .auth import token_key

    rt = get_runtime(request)
    token = _bearer_token(request)
    if not token:
        raise Unauthenticated("missing bearer token")
    key = token_key(token)
    session = rt.repos.get_payload(KIND_SESSION, key)
    if session is None:
        raise Unauthenticated("unknown session")
    if from_iso(session["expires_at"]) <= rt.now():
        raise Unauthenticated("session expired")
    rt.count_request(key)
    user = rt.repos.find_user(session["user_id"])
    if user is None:
        raise Unauthenticated("session user no longer exists")
    if user.approval.status.value == "rejected":
        raise AccountRejected(
            "account was rejected",
            details={"reason": user.approval.reason.value if user.approval.reason else None},
        )
    return AuthContext(user=user, session_key=key)


def require_full_access(user: UserProfile) -> None:
    decision = gate_access(user.consent)
    if not decision.full:
        raise ConsentIncomplete(
            "complete consent and the onboarding surveys first",
            details={"missing": list(decision.missing)},
        )


def is_admin_request(request: Request) -> bool:
    rt = get_runtime(request)
    supplied = request.headers.get("x-admin-token")
    return bool(supplied) and supplied == rt.admin_token


def require_admin(request: Request) -> None:
    if not is_admin_request(request):
        raise NotAdmin("admin token required")


@dataclass
class ModerationActor:
    actor_id: str
    user: UserProfile | None  # None when acting via the operator token

    @property
    def is_operator(self) -> bool:
        return self.user is None


def require_moderation(request: Request) -> ModerationActor:
    """Moderation endpoints accept a moderator session or the admin token."""
    if is_admin_request(request):
        return ModerationActor(actor_id="_operator", user=None)
    if _bearer_token(request) is None:
        raise Unauthenticated("missing bearer token or admin token")
    ctx = require_session(request)
    if not ctx.user.is_moderator:
        raise NotModerator("moderator role required")
    return ModerationActor(actor_id=ctx.user.user_id, user=ctx.user)
