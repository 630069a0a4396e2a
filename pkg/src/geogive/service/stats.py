"""Trial statistics assembled from the store: tallies, rates, scores."""

from __future__ import annotations

from datetime import datetime, timezone

from ..domain import ApprovalStatus, OfferStatus
from ..errors import BadWindow
from ..study import (
    SusResponse,
    UsefulnessDimension,
    UsefulnessResponse,
    aggregate_usefulness,
    score_sus,
    sus_grade,
)
from ..telemetry import TelemetryLog, lsns_group_stats, posting_rate, round_half_up, tally
from ..util import from_iso, to_iso
from .repos import Repos

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def compute_stats(
    repos: Repos,
    telemetry: TelemetryLog,
    window_start: datetime | None = None,
    window_end: datetime | None = None,
    now: datetime | None = None,
) -> dict:
    """The full stats report the admin CLI renders."""
    start = window_start or EPOCH
    end = window_end or now or datetime.now(timezone.utc)
    if start > end:
        raise BadWindow("window start is after its end")

    users = repos.all_users()
    by_id = {u.user_id: u for u in users}
    offers = repos.all_offers()
    reviews = repos.all_reviews()

    approval_counts = {status.value: 0 for status in ApprovalStatus}
    for u in users:
        approval_counts[u.approval.status.value] += 1

    offer_counts = {status.value: 0 for status in OfferStatus}
    for o in offers:
        offer_counts[o.status.value] += 1

    report = tally(telemetry.read(0), start, end)
    by_action_user: dict[str, dict[str, int]] = {}
    for (action, user_id), count in sorted(report.by_action_user.items()):
        by_action_user.setdefault(action, {})[user_id] = count

    creations = report.by_action.get("create_offer", 0)
    approved = approval_counts[ApprovalStatus.APPROVED.value]
    posting = None
    if approved > 0:
        rate = posting_rate(creations, approved)
        posting = {
            "posts": creations,
            "users": approved,
            "posts_per_user": rate.posts_per_user,
            "users_per_post": None if rate.users_per_post == float("inf") else rate.users_per_post,
            "rendered": rate.rendered,
        }

    def group_of(user_id: str) -> str:
        user = by_id.get(user_id)
        return user.user_group.value if user else "unspecified"

    lsns_scores = [
        (group_of(s["user_id"]), s["score"])
        for s in repos.surveys("lsns6")
        if _in_window(s.get("submitted_at"), start, end)
    ]
    lsns = (
        {"group_means": lsns_group_stats(lsns_scores), "count": len(lsns_scores)}
        if lsns_scores
        else None
    )

    sus_rows = [s for s in repos.surveys("sus") if _in_window(s.get("submitted_at"), start, end)]
    sus = None
    if sus_rows:
        scores = [score_sus(SusResponse(items=tuple(s["payload"]["items"]))) for s in sus_rows]
        mean = round_half_up(sum(scores) / len(scores))
        adjective, grade = sus_grade(mean)
        sus = {"mean": mean, "adjective": adjective, "grade": grade, "count": len(scores)}

    usefulness_rows = [
        s for s in repos.surveys("usefulness") if _in_window(s.get("submitted_at"), start, end)
    ]
    usefulness = None
    if usefulness_rows:
        labelled = [
            (
                UsefulnessResponse(
                    ratings={UsefulnessDimension(k): v for k, v in s["payload"]["ratings"].items()}
                ),
                group_of(s["user_id"]),
            )
            for s in usefulness_rows
        ]
        aggregated = aggregate_usefulness(labelled)
        usefulness = {
            dim.value: {
                group: {
                    "median": summary.median,
                    "agree": summary.agree,
                    "neutral": summary.neutral,
                    "disagree": summary.disagree,
                }
                for group, summary in groups.items()
            }
            for dim, groups in aggregated.items()
            if groups
        }

    return {
        "window": {"start": to_iso(start), "end": to_iso(end)},
        "users": {"total": len(users), **approval_counts},
        "offers": {"total": len(offers), **offer_counts},
        "reviews": len(reviews),
        "posting": posting,
        "tally": {
            "total": report.total,
            "by_action": dict(sorted(report.by_action.items())),
            "by_user": dict(sorted(report.by_user.items())),
            "by_action_user": by_action_user,
        },
        "lsns": lsns,
        "sus": sus,
        "usefulness": usefulness,
    }


def _in_window(submitted_at: str | None, start: datetime, end: datetime) -> bool:
    if submitted_at is None:
        return True
    ts = from_iso(submitted_at)
    return start <= ts <= end
