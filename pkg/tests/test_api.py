"""HTTP surface: auth, gating, offers, settings, moderation, trial close."""

from __future__ import annotations

import itertools
import json

from fastapi.testclient import TestClient

from geogive.service import create_app
from geogive.telemetry import Action

from conftest import (
    approve_user,
    enable_whatsapp,
    full_member,
    make_config,
    set_location,
    signup_user,
)

INSIDE = {"lat": 51.96, "lon": 7.62}
OUTSIDE = {"lat": 52.52, "lon": 13.40}  # Berlin


def events(runtime):
    return runtime.telemetry.read(0)


# ---------------------------------------------------------------------------
# signup and login


def test_signup_fresh_email(client):
    r = client.post(
        "/v1/users",
        json={"display_name": "Fresh", "method": "email", "email": "fresh@example.org", "password": "x" * 12},
    )
    assert r.status_code == 201
    body = r.json()
    assert body["state"] == "await_approval"
    assert body["user_id"].startswith("u_")


def test_signup_duplicate_email(client):
    payload = {"display_name": "Dup", "method": "email", "email": "dup@example.org", "password": "x" * 12}
    assert client.post("/v1/users", json=payload).status_code == 201
    r = client.post("/v1/users", json=payload)
    assert r.status_code == 409
    assert r.json()["code"] == "duplicate_email"


def test_signup_weak_password(client):
    r = client.post(
        "/v1/users",
        json={"display_name": "Weak", "method": "email", "email": "weak@example.org", "password": "short"},
    )
    assert r.status_code == 422
    assert r.json()["code"] == "weak_password"


def test_signup_provider_stub_and_duplicate_subject_annotation(client, admin_headers):
    r = client.post(
        "/v1/users",
        json={"display_name": "Provider One", "method": "provider", "provider": "facebook",
              "token": "stub:subj1:one@example.org"},
    )
    assert r.status_code == 201
    # Same provider subject, different email: flagged for the moderators.
    r = client.post(
        "/v1/users",
        json={"display_name": "Different Name", "method": "provider", "provider": "facebook",
              "token": "stub:subj1:two@example.org"},
    )
    assert r.status_code == 201
    flagged_id = r.json()["user_id"]
    r = client.get("/v1/moderation/reports", headers=admin_headers)
    reports = r.json()["reports"]
    assert any(rep["user_id"] == flagged_id and rep["kind"] == "duplicate_identity" for rep in reports)


def test_signup_provider_bad_token(client):
    r = client.post(
        "/v1/users",
        json={"display_name": "Bad", "method": "provider", "provider": "google", "token": "garbage"},
    )
    assert r.status_code == 401
    assert r.json()["code"] == "provider_verification_failed"


def test_signup_duplicate_display_name_annotation(client, admin_headers):
    signup_user(client, display_name="Same Name")
    second = signup_user(client, display_name="same name")
    r = client.get("/v1/moderation/users", headers=admin_headers, params={"status": "pending"})
    flagged = [u for u in r.json()["users"] if u["user_id"] == second.user_id]
    assert flagged and flagged[0]["annotations"]


def test_login_wrong_password(client):
    actor = signup_user(client)
    r = client.post("/v1/sessions", json={"method": "email", "email": actor.email, "password": "wrong-password"})
    assert r.status_code == 401
    assert r.json()["code"] == "bad_credentials"


def test_login_unknown_email_same_error(client):
    r = client.post("/v1/sessions", json={"method": "email", "email": "nobody@example.org", "password": "pw" * 6})
    assert r.status_code == 401
    assert r.json()["code"] == "bad_credentials"


def test_login_rejected_account_carries_reason(client, admin_headers):
    actor = signup_user(client)
    r = client.post(
        f"/v1/moderation/users/{actor.user_id}/reject",
        json={"reason": "outside-region"},
        headers=admin_headers,
    )
    assert r.status_code == 200
    r = client.post("/v1/sessions", json={"method": "email", "email": actor.email, "password": actor.password})
    assert r.status_code == 403
    assert r.json()["code"] == "account_rejected"
    assert r.json()["details"]["reason"] == "outside_region"


def test_login_pending_account_is_restricted_not_blocked(client):
    actor = signup_user(client)
    r = client.get("/v1/study/gate", headers=actor.headers)
    assert r.status_code == 200
    assert r.json()["missing"] == ["consent", "demographics", "lsns"]
    r = client.get("/v1/offers", headers=actor.headers)
    assert r.status_code == 403
    assert r.json()["code"] == "consent_incomplete"


def test_logout_invalidates_session(client):
    actor = signup_user(client)
    assert client.delete("/v1/sessions/current", headers=actor.headers).status_code == 200
    assert client.get("/v1/users/me", headers=actor.headers).status_code == 401


def test_unauthenticated_request(client):
    assert client.get("/v1/users/me").status_code == 401
    assert client.get("/v1/users/me", headers={"Authorization": "Bearer nonsense"}).status_code == 401


# ---------------------------------------------------------------------------
# consent ladder


def test_consent_requires_approval(client):
    actor = signup_user(client)
    r = client.post("/v1/study/consent", json={"study_consent": True}, headers=actor.headers)
    assert r.status_code == 403
    assert r.json()["code"] == "not_approved"


def test_consent_location_forced_off_without_study(client, admin_headers):
    actor = signup_user(client)
    approve_user(client, admin_headers, actor.user_id)
    r = client.post(
        "/v1/study/consent",
        json={"study_consent": False, "location_logging_consent": True},
        headers=actor.headers,
    )
    assert r.status_code == 200
    consent = r.json()["consent"]
    assert consent["study_consent"] is False and consent["location_logging_consent"] is False


def test_gate_ladder_order(client, admin_headers):
    actor = signup_user(client)
    approve_user(client, admin_headers, actor.user_id)
    r = client.post("/v1/study/consent", json={"study_consent": True}, headers=actor.headers)
    assert r.json()["gate"]["missing"] == ["demographics", "lsns"]
    r = client.post("/v1/study/surveys/demographics", json={}, headers=actor.headers)
    assert r.json()["gate"]["missing"] == ["lsns"]
    r = client.post("/v1/study/surveys/lsns6", json={"items": [1, 2, 3, 4, 5, 0]}, headers=actor.headers)
    assert r.json()["gate"] == {"full": True, "missing": []}


def test_surveys_before_consent_rejected(client, admin_headers):
    actor = signup_user(client)
    approve_user(client, admin_headers, actor.user_id)
    r = client.post("/v1/study/surveys/lsns6", json={"items": [0] * 6}, headers=actor.headers)
    assert r.status_code == 403
    assert r.json()["code"] == "consent_incomplete"


def test_lsns_items_validated(client, admin_headers):
    actor = signup_user(client)
    approve_user(client, admin_headers, actor.user_id)
    client.post("/v1/study/consent", json={"study_consent": True}, headers=actor.headers)
    r = client.post("/v1/study/surveys/lsns6", json={"items": [0, 0, 0, 0, 0, 9]}, headers=actor.headers)
    assert r.status_code == 422


def test_demographics_sets_group_once_never_moderator(client, admin_headers):
    actor = full_member(client, admin_headers, user_group="forced_migrant")
    me = client.get("/v1/users/me", headers=actor.headers).json()
    assert me["user_group"] == "forced_migrant"
    # A second self-report does not overwrite the recorded group.
    r = client.post("/v1/study/surveys/demographics", json={"user_group": "local_freecycler"}, headers=actor.headers)
    assert r.status_code == 201
    me = client.get("/v1/users/me", headers=actor.headers).json()
    assert me["user_group"] == "forced_migrant"
    # "moderator" is not even accepted by the schema.
    r = client.post("/v1/study/surveys/demographics", json={"user_group": "moderator"}, headers=actor.headers)
    assert r.status_code == 422


def test_consent_gate_all_eight_combinations(client, admin_headers, runtime):
    """Endpoint access must mirror gate_access exactly, combo by combo."""
    from dataclasses import replace as dc_replace

    from geogive.domain import ConsentState
    from geogive.study import gate_access

    actor = signup_user(client)
    approve_user(client, admin_headers, actor.user_id)

    gated_requests = [
        ("GET", "/v1/offers", None),
        ("POST", "/v1/offers", {"title": "x", "pickup_position": INSIDE}),
        ("PATCH", "/v1/users/me/location", INSIDE),
        ("GET", "/v1/reviews/pending", None),
        ("POST", "/v1/users/me/blocks", {"user_id": "nobody"}),
        ("PATCH", "/v1/users/me", {"display_name": "New Name"}),
        ("POST", "/v1/study/surveys/sus", {"items": [3] * 10}),
        ("POST", "/v1/study/surveys/usefulness", {"ratings": {}}),
    ]

    for study, demo, lsns in itertools.product([False, True], repeat=3):
        consent = ConsentState(study_consent=study, demographics_done=demo, lsns_done=lsns)
        runtime.repos.mutate_user(actor.user_id, lambda u: dc_replace(u, consent=consent))
        decision = gate_access(consent)
        for method, path, body in gated_requests:
            r = client.request(method, path, headers=actor.headers, json=body)
            blocked = r.status_code == 403 and r.json().get("code") == "consent_incomplete"
            assert blocked == (not decision.full), (study, demo, lsns, path, r.status_code, r.text)
            if blocked:
                assert r.json()["details"]["missing"] == list(decision.missing)


# ---------------------------------------------------------------------------
# location and availability


def test_update_location_inside_and_outside(client, admin_headers):
    actor = full_member(client, admin_headers)
    assert set_location(client, actor, **INSIDE)["available"] is True
    assert set_location(client, actor, **OUTSIDE)["available"] is False


def test_update_location_validates_bounds(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = client.patch("/v1/users/me/location", json={"lat": 95, "lon": 0}, headers=actor.headers)
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_position"


def test_update_location_rejects_far_future_timestamp(client, admin_headers):
    from datetime import timedelta

    from geogive.util import now_utc, to_iso

    actor = full_member(client, admin_headers)
    future = to_iso(now_utc() + timedelta(minutes=10))
    r = client.patch(
        "/v1/users/me/location", json={**INSIDE, "recorded_at": future}, headers=actor.headers
    )
    assert r.status_code == 422


# ---------------------------------------------------------------------------
# offers


def post_offer(client, actor, title="Blue bike", lat=51.96, lon=7.63, **extra):
    r = client.post(
        "/v1/offers",
        json={"title": title, "pickup_position": {"lat": lat, "lon": lon}, **extra},
        headers=actor.headers,
    )
    return r


def ready_owner(client, admin_headers, lat=51.96, lon=7.62):
    owner = full_member(client, admin_headers)
    enable_whatsapp(client, owner)
    set_location(client, owner, lat, lon)
    return owner


def test_create_offer_requires_contact_channel(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = post_offer(client, actor)
    assert r.status_code == 422
    assert r.json()["code"] == "no_contact_method"


def test_create_offer_title_cap(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    r = post_offer(client, owner, title="x" * 300)
    assert r.status_code == 422
    assert r.json()["code"] == "validation_failed"


def test_list_offers_sorted_with_distance_and_links(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    assert post_offer(client, owner, title="Near", lat=51.9636, lon=7.62).status_code == 201
    assert post_offer(client, owner, title="Far", lat=51.9708, lon=7.62).status_code == 201

    viewer = full_member(client, admin_headers)
    set_location(client, viewer, 51.96, 7.62)
    r = client.get("/v1/offers", headers=viewer.headers)
    assert r.status_code == 200
    body = r.json()
    assert "data_version" in body
    titles = [o["title"] for o in body["offers"]]
    assert titles == ["Near", "Far"]
    assert [o["distance_km"] for o in body["offers"]] == [0.4, 1.2]
    links = body["offers"][0]["owner"]["contact_links"]
    assert links == [{"channel": "whatsapp", "label": "+4915112345678", "uri": "https://wa.me/4915112345678"}]
    assert body["offers"][0]["owner"]["star_count"] == 0


def test_list_offers_hides_unavailable_owner_but_not_from_owner(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    post_offer(client, owner)
    viewer = full_member(client, admin_headers)
    set_location(client, viewer, 51.96, 7.62)
    assert len(client.get("/v1/offers", headers=viewer.headers).json()["offers"]) == 1

    set_location(client, owner, **OUTSIDE)  # owner leaves the fence
    assert client.get("/v1/offers", headers=viewer.headers).json()["offers"] == []
    own = client.get("/v1/offers", headers=owner.headers).json()["offers"]
    assert len(own) == 1  # owners always see their own open offers


def test_list_offers_respects_blocks_both_ways(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    post_offer(client, owner)
    viewer = full_member(client, admin_headers)
    set_location(client, viewer, 51.96, 7.62)
    r = client.post("/v1/users/me/blocks", json={"user_id": owner.user_id}, headers=viewer.headers)
    assert r.status_code == 200
    assert client.get("/v1/offers", headers=viewer.headers).json()["offers"] == []

    enable_whatsapp(client, viewer)
    set_location(client, viewer, 51.96, 7.62)
    post_offer(client, viewer, title="From the blocker")
    # The blocked owner cannot see the blocker's offers either.
    titles = [o["title"] for o in client.get("/v1/offers", headers=owner.headers).json()["offers"]]
    assert "From the blocker" not in titles


def test_block_self_and_unknown(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = client.post("/v1/users/me/blocks", json={"user_id": actor.user_id}, headers=actor.headers)
    assert r.status_code == 422 and r.json()["code"] == "self_block"
    r = client.post("/v1/users/me/blocks", json={"user_id": "u_ghost"}, headers=actor.headers)
    assert r.status_code == 404 and r.json()["code"] == "unknown_user"


def test_list_offers_requires_viewer_position(client, admin_headers):
    viewer = full_member(client, admin_headers)
    r = client.get("/v1/offers", headers=viewer.headers)
    assert r.status_code == 422
    assert r.json()["code"] == "no_viewer_position"
    # Override position works without a stored one.
    r = client.get("/v1/offers", params=INSIDE, headers=viewer.headers)
    assert r.status_code == 200


def test_photo_blob_flow(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    png = b"\x89PNG\r\n\x1a\n" + b"0" * 64
    r = client.post("/v1/blobs", content=png, headers={**owner.headers, "Content-Type": "image/png"})
    assert r.status_code == 201
    blob_id = r.json()["blob_id"]
    r = post_offer(client, owner, photo_ref=blob_id)
    assert r.status_code == 201
    r = client.get(f"/v1/blobs/{blob_id}", headers=owner.headers)
    assert r.status_code == 200 and r.content == png and r.headers["content-type"].startswith("image/png")

    r = client.post("/v1/blobs", content=b"plain", headers={**owner.headers, "Content-Type": "text/plain"})
    assert r.status_code == 415
    r = post_offer(client, owner, title="ghost photo", photo_ref="0" * 64)
    assert r.status_code == 422


def test_complete_offer_full_flow(client, admin_headers, runtime):
    owner = ready_owner(client, admin_headers)
    collector = full_member(client, admin_headers)
    offer_id = post_offer(client, owner).json()["offer_id"]

    r = client.post(
        f"/v1/offers/{offer_id}/complete", json={"collector_id": collector.user_id}, headers=owner.headers
    )
    assert r.status_code == 200
    body = r.json()
    assert body["offer"]["status"] == "completed"
    assert len(body["review_tasks"]) == 2
    assert {t["user_id"] for t in body["review_tasks"]} == {owner.user_id, collector.user_id}

    me = client.get("/v1/users/me", headers=owner.headers).json()
    assert me["star_count"] == 1

    # Completed offers leave every list view.
    viewer = full_member(client, admin_headers)
    assert client.get("/v1/offers", params=INSIDE, headers=viewer.headers).json()["offers"] == []


def test_complete_offer_authorization_and_terminality(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    other = full_member(client, admin_headers)
    offer_id = post_offer(client, owner).json()["offer_id"]

    r = client.post(f"/v1/offers/{offer_id}/withdraw", headers=other.headers)
    assert r.status_code == 403 and r.json()["code"] == "not_authorized"

    assert client.post(f"/v1/offers/{offer_id}/complete", json={}, headers=owner.headers).status_code == 200
    r = client.post(f"/v1/offers/{offer_id}/complete", json={}, headers=owner.headers)
    assert r.status_code == 409 and r.json()["code"] == "not_open"


def test_complete_offer_idempotency_key(client, admin_headers, runtime):
    owner = ready_owner(client, admin_headers)
    offer_id = post_offer(client, owner).json()["offer_id"]
    headers = {**owner.headers, "Idempotency-Key": "retry-123"}
    first = client.post(f"/v1/offers/{offer_id}/complete", json={}, headers=headers)
    assert first.status_code == 200
    replay = client.post(f"/v1/offers/{offer_id}/complete", json={}, headers=headers)
    assert replay.status_code == 200
    assert replay.json() == first.json()
    tasks = runtime.repos.tasks_for_offer(offer_id)
    assert len(tasks) == 1  # owner only; no duplicates from the retry


def test_unknown_collector_rejected(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    offer_id = post_offer(client, owner).json()["offer_id"]
    r = client.post(f"/v1/offers/{offer_id}/complete", json={"collector_id": "u_ghost"}, headers=owner.headers)
    assert r.status_code == 404


# ---------------------------------------------------------------------------
# reviews


def completed_with_tasks(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    collector = full_member(client, admin_headers)
    offer_id = post_offer(client, owner).json()["offer_id"]
    body = client.post(
        f"/v1/offers/{offer_id}/complete", json={"collector_id": collector.user_id}, headers=owner.headers
    ).json()
    return owner, collector, offer_id, body["review_tasks"]


def test_review_submission_flow(client, admin_headers):
    owner, collector, offer_id, tasks = completed_with_tasks(client, admin_headers)
    r = client.get("/v1/reviews/pending", headers=owner.headers)
    mine = r.json()["tasks"]
    assert len(mine) == 1 and mine[0]["offer_id"] == offer_id and mine[0]["offer_title"] == "Blue bike"

    review = {
        "task_id": mine[0]["task_id"],
        "place": "my kitchen",
        "place_category": "my_home",
        "contact_channel": "whatsapp",
        "satisfaction": 5,
        "likely_repeat": 4,
        "counterparty_id": collector.user_id,
    }
    r = client.post("/v1/reviews", json=review, headers=owner.headers)
    assert r.status_code == 201
    assert r.json()["task"]["state"] == "done"
    assert client.get("/v1/reviews/pending", headers=owner.headers).json()["tasks"] == []

    # Second submission on the same task: the review already exists.
    r = client.post("/v1/reviews", json=review, headers=owner.headers)
    assert r.status_code == 409 and r.json()["code"] == "duplicate_review"


def test_review_by_non_participant(client, admin_headers):
    owner, collector, offer_id, tasks = completed_with_tasks(client, admin_headers)
    outsider = full_member(client, admin_headers)
    owner_task = next(t for t in tasks if t["user_id"] == owner.user_id)
    r = client.post(
        "/v1/reviews",
        json={"task_id": owner_task["task_id"], "contact_channel": "other", "satisfaction": 3, "likely_repeat": 3},
        headers=outsider.headers,
    )
    assert r.status_code == 403 and r.json()["code"] == "reviewer_mismatch"


def test_review_dismissal(client, admin_headers):
    owner, collector, offer_id, tasks = completed_with_tasks(client, admin_headers)
    collector_task = next(t for t in tasks if t["user_id"] == collector.user_id)
    r = client.post(f"/v1/reviews/{collector_task['task_id']}/dismiss", headers=collector.headers)
    assert r.status_code == 200 and r.json()["state"] == "dismissed"
    r = client.post(f"/v1/reviews/{collector_task['task_id']}/dismiss", headers=collector.headers)
    assert r.status_code == 409  # already decided


# ---------------------------------------------------------------------------
# settings


def test_settings_invalid_email_detail(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = client.patch(
        "/v1/users/me",
        json={"contact_methods": {"email": {"enabled": True, "detail": "not-an-address"}}},
        headers=actor.headers,
    )
    assert r.status_code == 422 and r.json()["code"] == "invalid_detail"


def test_settings_locale_allowed_pre_consent(client, admin_headers, runtime):
    actor = signup_user(client)
    approve_user(client, admin_headers, actor.user_id)
    r = client.patch("/v1/users/me", json={"locale": "ar"}, headers=actor.headers)
    assert r.status_code == 200
    assert r.json()["locale"] == "ar"
    assert events(runtime)[-1].action is Action.CHANGE_LOCALE
    # Anything beyond locale stays gated pre-consent.
    r = client.patch("/v1/users/me", json={"locale": "de", "display_name": "X Y"}, headers=actor.headers)
    assert r.status_code == 403 and r.json()["code"] == "consent_incomplete"


def test_settings_unknown_locale(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = client.patch("/v1/users/me", json={"locale": "xx"}, headers=actor.headers)
    assert r.status_code == 422 and r.json()["code"] == "unknown_locale"


def test_settings_disable_all_channels_with_open_offer(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    post_offer(client, owner)
    r = client.patch(
        "/v1/users/me",
        json={"contact_methods": {"whatsapp": {"enabled": False, "detail": ""}}},
        headers=owner.headers,
    )
    assert r.status_code == 422 and r.json()["code"] == "no_contact_method"


def test_settings_home_position(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = client.patch("/v1/users/me", json={"home_position": INSIDE}, headers=actor.headers)
    assert r.status_code == 200
    assert r.json()["home_position"]["lat"] == INSIDE["lat"]


# ---------------------------------------------------------------------------
# localization endpoint


def test_localization_bundles(client):
    r = client.get("/v1/localizations/de")
    body = r.json()
    assert body["locale"] == "de" and body["fallback"] is False
    en = client.get("/v1/localizations/en").json()
    assert set(body["strings"]) == set(en["strings"])
    r = client.get("/v1/localizations/xx")
    body = r.json()
    assert body["locale"] == "en" and body["fallback"] is True and body["requested"] == "xx"
    assert client.get("/v1/localizations/ar").json()["direction"] == "rtl"


# ---------------------------------------------------------------------------
# moderation


def test_moderation_requires_role_or_token(client, admin_headers):
    actor = full_member(client, admin_headers)
    r = client.get("/v1/moderation/users", headers=actor.headers)
    assert r.status_code == 403 and r.json()["code"] == "not_moderator"
    assert client.get("/v1/moderation/users").status_code == 401

    # Promotion is operator-only; afterwards the session works.
    r = client.post(f"/v1/admin/users/{actor.user_id}/promote", headers=admin_headers)
    assert r.status_code == 200
    r = client.get("/v1/moderation/users", headers=actor.headers)
    assert r.status_code == 200


def test_moderator_approval_queues_welcome_email(client, admin_headers, runtime):
    pending = signup_user(client)
    r = client.post(f"/v1/moderation/users/{pending.user_id}/approve", headers=admin_headers)
    assert r.status_code == 200 and r.json()["approval"]["status"] == "approved"
    runtime.notifications.run_once()
    outbox = runtime.notifications.client.outbox_dir
    kinds = [json.loads(p.read_text())["kind"] for p in outbox.glob("*.json")]
    assert "welcome_email" in kinds

    r = client.post(f"/v1/moderation/users/{pending.user_id}/approve", headers=admin_headers)
    assert r.status_code == 409 and r.json()["code"] == "not_pending"


def test_reject_reasons_validated(client, admin_headers):
    pending = signup_user(client)
    r = client.post(f"/v1/moderation/users/{pending.user_id}/reject", json={}, headers=admin_headers)
    assert r.status_code == 422 and r.json()["code"] == "missing_reason"
    r = client.post(
        f"/v1/moderation/users/{pending.user_id}/reject", json={"reason": "bogus"}, headers=admin_headers
    )
    assert r.status_code == 422
    r = client.post(
        f"/v1/moderation/users/{pending.user_id}/reject", json={"reason": "duplicate-identity"}, headers=admin_headers
    )
    assert r.status_code == 200 and r.json()["approval"]["reason"] == "duplicate_identity"


def test_moderator_removes_offer(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    offer_id = post_offer(client, owner).json()["offer_id"]
    viewer = full_member(client, admin_headers)
    r = client.post(f"/v1/moderation/offers/{offer_id}/remove", headers=admin_headers)
    assert r.status_code == 200 and r.json()["status"] == "removed"
    assert client.get("/v1/offers", params=INSIDE, headers=viewer.headers).json()["offers"] == []
    # Hidden from the owner too: removed is terminal, not merely unavailable.
    assert client.get("/v1/offers", headers=owner.headers).json()["offers"] == []


def test_moderation_list_never_contains_emails(client, admin_headers):
    signup_user(client)
    r = client.get("/v1/moderation/users", headers=admin_headers, params={"status": "all"})
    assert "@" not in json.dumps(r.json())


# ---------------------------------------------------------------------------
# telemetry properties


def test_every_mutating_endpoint_emits_exactly_one_event(client, admin_headers, runtime):
    owner = ready_owner(client, admin_headers)
    collector = full_member(client, admin_headers)
    enable_whatsapp(client, collector)

    def count_since(mark, fn):
        before = len(events(runtime))
        fn()
        return len(events(runtime)) - before

    offer_holder = {}

    checks = [
        ("signup", lambda: signup_user(client)),
        ("update_settings", lambda: enable_whatsapp(client, owner, "+4915112340000")),
        ("update_location", lambda: set_location(client, owner, 51.95, 7.60)),
        ("create_offer", lambda: offer_holder.update(oid=post_offer(client, owner).json()["offer_id"])),
        ("view", lambda: client.get("/v1/offers", headers=owner.headers)),
        (
            "complete",
            lambda: client.post(
                f"/v1/offers/{offer_holder['oid']}/complete",
                json={"collector_id": collector.user_id},
                headers=owner.headers,
            ),
        ),
        (
            "block",
            lambda: client.post("/v1/users/me/blocks", json={"user_id": collector.user_id}, headers=owner.headers),
        ),
        ("consent", lambda: client.post("/v1/study/consent", json={"study_consent": True}, headers=owner.headers)),
        ("sus", lambda: client.post("/v1/study/surveys/sus", json={"items": [4] * 10}, headers=owner.headers)),
    ]
    for name, fn in checks:
        emitted = count_since(name, fn)
        assert emitted in (1, 2) if name == "signup" else emitted == 1, name
        # signup helper also logs in, hence two events there
    assert events(runtime)[-1].action is Action.SUBMIT_SURVEY


def test_view_actions_logged_by_kind(client, admin_headers, runtime):
    viewer = full_member(client, admin_headers)
    set_location(client, viewer, 51.96, 7.62)
    client.get("/v1/offers", params={"view": "map"}, headers=viewer.headers)
    assert events(runtime)[-1].action is Action.VIEW_MAP
    client.get("/v1/offers", params={"view": "list"}, headers=viewer.headers)
    assert events(runtime)[-1].action is Action.VIEW_LIST
    client.get("/v1/offers", params={"refresh": "true"}, headers=viewer.headers)
    assert events(runtime)[-1].action is Action.REFRESH


def test_location_events_respect_consent(client, admin_headers, runtime):
    consenting = full_member(client, admin_headers)
    set_location(client, consenting, 51.96, 7.62)
    assert events(runtime)[-1].position is not None

    declining = signup_user(client)
    approve_user(client, admin_headers, declining.user_id)
    client.post(
        "/v1/study/consent",
        json={"study_consent": True, "location_logging_consent": False},
        headers=declining.headers,
    )
    onboard_no_location(client, declining)
    set_location(client, declining, 51.96, 7.62)
    assert events(runtime)[-1].action is Action.UPDATE_LOCATION
    assert events(runtime)[-1].position is None


def onboard_no_location(client, actor):
    client.post("/v1/study/surveys/demographics", json={}, headers=actor.headers)
    client.post("/v1/study/surveys/lsns6", json={"items": [3] * 6}, headers=actor.headers)


def test_session_token_never_in_telemetry(client, admin_headers, runtime):
    actor = full_member(client, admin_headers)
    raw = json.dumps([e.to_dict() for e in events(runtime)])
    assert actor.token not in raw


# ---------------------------------------------------------------------------
# version stamp and refresh cycle


def test_version_stamp_moves_on_mutation(client, admin_headers):
    r1 = client.get("/v1/version-stamp").json()["stamp"]
    signup_user(client)
    r2 = client.get("/v1/version-stamp").json()["stamp"]
    assert r2 > r1


def test_availability_flip_reflected_within_one_request(client, admin_headers):
    owner = ready_owner(client, admin_headers)
    post_offer(client, owner)
    viewer = full_member(client, admin_headers)
    set_location(client, viewer, 51.96, 7.62)
    assert len(client.get("/v1/offers", headers=viewer.headers).json()["offers"]) == 1
    set_location(client, owner, **OUTSIDE)
    # The very next read reflects the flip; no background job involved.
    assert client.get("/v1/offers", headers=viewer.headers).json()["offers"] == []


# ---------------------------------------------------------------------------
# trial window


def test_trial_close_gates_mutations_but_not_reviews(tmp_path, admin_headers_factory=None):
    config = make_config(tmp_path)
    app = create_app(config)
    with TestClient(app) as client:
        admin = {"X-Admin-Token": app.state.runtime.admin_token}
        owner = full_member(client, admin)
        enable_whatsapp(client, owner)
        set_location(client, owner, 51.96, 7.62)
        offer_id = post_offer(client, owner).json()["offer_id"]
        tasks = client.post(f"/v1/offers/{offer_id}/complete", json={}, headers=owner.headers).json()["review_tasks"]

        assert client.post("/v1/admin/trial/open", headers=admin).status_code == 200
        assert client.post("/v1/admin/trial/close", headers=admin).status_code == 200
        # Idempotent close.
        assert client.post("/v1/admin/trial/close", headers=admin).status_code == 200
        r = client.post("/v1/admin/trial/open", headers=admin)
        assert r.status_code == 409 and r.json()["code"] == "invalid_transition"

        # Mutations are rejected while closed.
        r = post_offer(client, owner, title="late offer")
        assert r.status_code == 403 and r.json()["code"] == "trial_closed"
        r = client.patch("/v1/users/me/location", json=INSIDE, headers=owner.headers)
        assert r.status_code == 403
        r = client.post("/v1/users", json={"display_name": "Late", "method": "email",
                                           "email": "late@example.org", "password": "x" * 12})
        assert r.status_code == 403

        # Sessions and review submission stay open.
        r = client.post("/v1/sessions", json={"method": "email", "email": owner.email, "password": owner.password})
        assert r.status_code == 201
        review = {
            "task_id": tasks[0]["task_id"],
            "contact_channel": "other",
            "satisfaction": 4,
            "likely_repeat": 4,
        }
        assert client.post("/v1/reviews", json=review, headers=owner.headers).status_code == 201
        # Dismissal is a non-review mutation: blocked while closed.
        r = client.post(f"/v1/reviews/{tasks[0]['task_id']}/dismiss", headers=owner.headers)
        assert r.status_code == 403

        # Reads still work.
        assert client.get("/v1/offers", headers=owner.headers).status_code == 200


# ---------------------------------------------------------------------------
# rate ceiling


def test_rate_ceiling(tmp_path):
    config = make_config(tmp_path, rate_ceiling=5)
    app = create_app(config)
    with TestClient(app) as client:
        actor = signup_user(client)
        codes = [client.get("/v1/users/me", headers=actor.headers).status_code for _ in range(8)]
        assert 429 in codes
        assert codes[0] == 200


# ---------------------------------------------------------------------------
# no credential leakage


def test_offer_cards_expose_only_enabled_channels(client, admin_headers):
    owner = ready_owner(client, admin_headers)  # whatsapp only
    # Owner also stores an email detail but leaves the channel disabled.
    r = client.patch(
        "/v1/users/me",
        json={"contact_methods": {
            "whatsapp": {"enabled": True, "detail": "+4915112345678"},
            "email": {"enabled": False, "detail": "secret@example.org"},
        }},
        headers=owner.headers,
    )
    assert r.status_code == 200
    viewer = full_member(client, admin_headers)
    body = client.get("/v1/offers", params=INSIDE, headers=viewer.headers).json()
    post_offer(client, owner)
    body = client.get("/v1/offers", params=INSIDE, headers=viewer.headers).json()
    dumped = json.dumps(body)
    assert "secret@example.org" not in dumped
    assert owner.email not in dumped  # login credential never appears
    channels = [l["channel"] for o in body["offers"] for l in o["owner"]["contact_links"]]
    assert channels == ["whatsapp"]
