"""Consent and survey endpoints: the onboarding ladder and end-of-study forms."""

from __future__ import annotations

from dataclasses import replace

from fastapi import APIRouter, Depends, Request

from ..domain import UserGroup
from ..errors import ConsentIncomplete, ValidationFailed
from ..study import (
    Lsns6Response,
    SusResponse,
    UsefulnessDimension,
    UsefulnessResponse,
    gate_access,
    record_consent,
    score_lsns6,
    score_sus,
)
from ..telemetry import Action
from ..util import to_iso
from .http import AuthContext, get_runtime, require_full_access, require_session
from .schemas import ConsentBody, DemographicsBody, ItemsBody, UsefulnessBody

router = APIRouter()


@router.get("/v1/study/gate")
def get_gate(request: Request, ctx: AuthContext = Depends(require_session)):
    decision = gate_access(ctx.user.consent)
    return {
        "full": decision.full,
        "missing": list(decision.missing),
        "consent": ctx.user.consent.to_dict(),
    }


@router.post("/v1/study/consent")
def post_consent(request: Request, body: ConsentBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    locale_shown = body.locale_shown if rt.locales.has(body.locale_shown) else "en"
    now = rt.now()
    # Validates approval state; raises NotApproved for pending/rejected users.
    record_consent(ctx.user, body.study_consent, body.location_logging_consent, locale_shown, now)

    def apply(user):
        consent = record_consent(user, body.study_consent, body.location_logging_consent, locale_shown, now)
        return replace(user, consent=consent)

    user = rt.repos.mutate_user(ctx.user.user_id, apply)
    rt.telemetry.log(user.user_id, Action.RECORD_CONSENT, at=now)
    rt.bump_version()
    decision = gate_access(user.consent)
    return {
        "consent": user.consent.to_dict(),
        "gate": {"full": decision.full, "missing": list(decision.missing)},
    }


def _require_study_consent(user) -> None:
    if not user.consent.study_consent:
        decision = gate_access(user.consent)
        raise ConsentIncomplete(
            "study consent is required before the onboarding surveys",
            details={"missing": list(decision.missing)},
        )


@router.post("/v1/study/surveys/demographics", status_code=201)
def submit_demographics(request: Request, body: DemographicsBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    _require_study_consent(ctx.user)
    now = rt.now()
    rt.repos.save_survey(
        ctx.user.user_id,
        "demographics",
        {
            "user_id": ctx.user.user_id,
            "instrument": "demographics",
            "submitted_at": to_iso(now),
            "payload": {
                "age_range": body.age_range,
                "gender": body.gender,
                "origin_country": body.origin_country,
                "user_group": body.user_group,
            },
            "score": None,
        },
    )

    def apply(user):
        consent = replace(user.consent, demographics_done=True)
        group = user.user_group
        # Self-report may classify a user once, and never as a moderator.
        if group is UserGroup.UNSPECIFIED and body.user_group != "unspecified":
            group = UserGroup(body.user_group)
        return replace(user, consent=consent, user_group=group)

    user = rt.repos.mutate_user(ctx.user.user_id, apply)
    rt.telemetry.log(user.user_id, Action.SUBMIT_SURVEY, at=now, entity_id="demographics")
    rt.bump_version()
    decision = gate_access(user.consent)
    return {"gate": {"full": decision.full, "missing": list(decision.missing)}}


@router.post("/v1/study/surveys/lsns6", status_code=201)
def submit_lsns6(request: Request, body: ItemsBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    _require_study_consent(ctx.user)
    response = Lsns6Response(items=tuple(body.items))
    score = score_lsns6(response)
    now = rt.now()
    rt.repos.save_survey(
        ctx.user.user_id,
        "lsns6",
        {
            "user_id": ctx.user.user_id,
            "instrument": "lsns6",
            "submitted_at": to_iso(now),
            "payload": {"items": list(response.items)},
            "score": score,
        },
    )
    user = rt.repos.mutate_user(
        ctx.user.user_id, lambda u: replace(u, consent=replace(u.consent, lsns_done=True))
    )
    rt.telemetry.log(user.user_id, Action.SUBMIT_SURVEY, at=now, entity_id="lsns6")
    rt.bump_version()
    decision = gate_access(user.consent)
    return {"score": score, "gate": {"full": decision.full, "missing": list(decision.missing)}}


@router.post("/v1/study/surveys/sus", status_code=201)
def submit_sus(request: Request, body: ItemsBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    response = SusResponse(items=tuple(body.items))
    score = score_sus(response)
    now = rt.now()
    rt.repos.save_survey(
        ctx.user.user_id,
        "sus",
        {
            "user_id": ctx.user.user_id,
            "instrument": "sus",
            "submitted_at": to_iso(now),
            "payload": {"items": list(response.items)},
            "score": score,
        },
    )
    rt.telemetry.log(ctx.user.user_id, Action.SUBMIT_SURVEY, at=now, entity_id="sus")
    rt.bump_version()
    return {"score": score}


@router.post("/v1/study/surveys/usefulness", status_code=201)
def submit_usefulness(request: Request, body: UsefulnessBody, ctx: AuthContext = Depends(require_session)):
    rt = get_runtime(request)
    require_full_access(ctx.user)
    try:
        ratings = {UsefulnessDimension(k): v for k, v in body.ratings.items()}
    except ValueError as exc:
        raise ValidationFailed(f"unknown usefulness dimension: {exc}")
    UsefulnessResponse(ratings=ratings)  # validates completeness and ranges
    now = rt.now()
    rt.repos.save_survey(
        ctx.user.user_id,
        "usefulness",
        {
            "user_id": ctx.user.user_id,
            "instrument": "usefulness",
            "submitted_at": to_iso(now),
            "payload": {"ratings": {k.value: v for k, v in ratings.items()}},
            "score": None,
        },
    )
    rt.telemetry.log(ctx.user.user_id, Action.SUBMIT_SURVEY, at=now, entity_id="usefulness")
    rt.bump_version()
    return {"ok": True}
