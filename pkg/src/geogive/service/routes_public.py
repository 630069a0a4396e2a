"""Unauthenticated surface: signup, login, localization, version stamp."""

from __future__ import annotations

from datetime import timedelta

from fastapi import APIRouter, Request

from ..domain import ApprovalStatus, NotificationDraft, NotificationKind, UserProfile
from ..errors import (
    AccountRejected,
    BadCredentials,
    DuplicateEmail,
    ValidationFailed,
    VersionConflict,
    WeakPassword,
)
from ..telemetry import Action
from ..util import new_id, to_iso
from .auth import hash_password, new_session_token, token_key, verify_password
from .http import get_runtime
from .repos import (
    KIND_CREDENTIAL,
    KIND_EMAIL_INDEX,
    KIND_REPORT,
    KIND_SESSION,
    KIND_SUBJECT_INDEX,
)
from .schemas import LoginBody, SignupBody

router = APIRouter()

MIN_PASSWORD_LENGTH = 10

# Verified against this when the account does not exist, so the response
# time does not reveal whether an email address is registered.
_DUMMY_CREDENTIAL = hash_password("timing-equalizer", n=4096)


def _normalize_email(email: str) -> str:
    email = email.strip().lower()
    if "@" not in email or email.startswith("@") or email.endswith("@"):
        raise ValidationFailed("not a valid email address")
    return email


@router.post("/v1/users", status_code=201)
def signup(request: Request, body: SignupBody):
    rt = get_runtime(request)

    if body.method == "email":
        if not body.email:
            raise ValidationFailed("email is required for email signup")
        if not body.password or len(body.password) < MIN_PASSWORD_LENGTH:
            raise WeakPassword(f"password must be at least {MIN_PASSWORD_LENGTH} characters")
        email = _normalize_email(body.email)
        subject = None
        provider = None
        credential = {"method": "email", "email": email, "password": hash_password(body.password, n=rt.config.scrypt_n)}
    else:
        if not body.provider or not body.token:
            raise ValidationFailed("provider and token are required for provider signup")
        assertion = rt.identity.verify(body.provider, body.token)
        email = _normalize_email(assertion.email)
        subject = assertion.subject
        provider = assertion.provider
        credential = {"method": "provider", "email": email, "provider": provider, "subject": subject}

    locale = body.locale if rt.locales.has(body.locale) else "en"
    user = UserProfile(user_id=new_id("u"), display_name=body.display_name, locale=locale)

    try:
        rt.repos.create(KIND_EMAIL_INDEX, email, {"user_id": user.user_id})
    except VersionConflict:
        raise DuplicateEmail(f"{email} already has an account")

    annotations = _duplicate_identity_annotations(rt, user, provider, subject)

    rt.repos.save_new_user(user)
    rt.repos.create(KIND_CREDENTIAL, user.user_id, credential)
    if provider and subject:
        try:
            rt.repos.create(KIND_SUBJECT_INDEX, f"{provider}:{subject}", {"user_id": user.user_id})
        except VersionConflict:
            pass  # keep the first mapping; the annotation records the clash

    for note in annotations:
        rt.repos.create(KIND_REPORT, note["report_id"], note)

    rt.notifications.enqueue(
        NotificationDraft(kind=NotificationKind.APPROVAL_PENDING_NOTICE, recipient_id=user.user_id)
    )
    rt.telemetry.log(user.user_id, Action.SIGNUP, at=rt.now())
    rt.bump_version()
    return {"user_id": user.user_id, "state": "await_approval", "annotations": len(annotations)}


def _duplicate_identity_annotations(rt, user: UserProfile, provider: str | None, subject: str | None) -> list[dict]:
    """Heuristic flags for the moderation queue, never a hard block."""
    notes = []
    if provider and subject:
        existing = rt.repos.get_payload(KIND_SUBJECT_INDEX, f"{provider}:{subject}")
        if existing:
            notes.append(
                {
                    "report_id": new_id("rep"),
                    "kind": "duplicate_identity",
                    "user_id": user.user_id,
                    "related_user_id": existing["user_id"],
                    "note": f"same {provider} identity as an existing account, signed up under a different email",
                    "created_at": to_iso(rt.now()),
                }
            )
    wanted = user.display_name.casefold()
    for other in rt.repos.all_users():
        if other.user_id != user.user_id and other.display_name.casefold() == wanted:
            notes.append(
                {
                    "report_id": new_id("rep"),
                    "kind": "duplicate_identity",
                    "user_id": user.user_id,
                    "related_user_id": other.user_id,
                    "note": "display name matches an existing account",
                    "created_at": to_iso(rt.now()),
                }
            )
            break
    return notes


@router.post("/v1/sessions", status_code=201)
def login(request: Request, body: LoginBody):
    rt = get_runtime(request)

    if body.method == "email":
        if not body.email or body.password is None:
            raise ValidationFailed("email and password are required")
        index = rt.repos.get_payload(KIND_EMAIL_INDEX, _normalize_email(body.email))
        credential = rt.repos.get_payload(KIND_CREDENTIAL, index["user_id"]) if index else None
        if credential is None or credential.get("method") != "email":
            verify_password(body.password, _DUMMY_CREDENTIAL)
            raise BadCredentials("wrong email or password")
        if not verify_password(body.password, credential["password"]):
            raise BadCredentials("wrong email or password")
        user_id = index["user_id"]
        auth_method = "email_password"
    else:
        if not body.provider or not body.token:
            raise ValidationFailed("provider and token are required")
        assertion = rt.identity.verify(body.provider, body.token)
        index = rt.repos.get_payload(KIND_SUBJECT_INDEX, f"{assertion.provider}:{assertion.subject}")
        if index is None:
            raise BadCredentials("no account for this identity")
        user_id = index["user_id"]
        auth_method = f"identity_provider:{assertion.provider}"

    user = rt.repos.load_user(user_id)
    if user.approval.status is ApprovalStatus.REJECTED:
        raise AccountRejected(
            "account was rejected",
            details={"reason": user.approval.reason.value if user.approval.reason else None},
        )

    token = new_session_token()
    now = rt.now()
    expires_at = now + timedelta(days=rt.config.session_ttl_days)
    rt.repos.create(
        KIND_SESSION,
        token_key(token),
        {
            "user_id": user_id,
            "created_at": to_iso(now),
            "expires_at": to_iso(expires_at),
            "auth_method": auth_method,
        },
    )
    rt.telemetry.log(user_id, Action.LOGIN, at=now)
    return {"token": token, "user_id": user_id, "expires_at": to_iso(expires_at)}


@router.get("/v1/localizations/{locale}")
def get_localization(request: Request, locale: str):
    rt = get_runtime(request)
    bundle, fallback = rt.locales.get(locale)
    return {**bundle.to_dict(), "fallback": fallback, "requested": locale, "available": rt.locales.locales}


@router.get("/v1/version-stamp")
def version_stamp(request: Request):
    return {"stamp": get_runtime(request).version_stamp}
