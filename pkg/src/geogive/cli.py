"""Operator CLI: moderation, trial lifecycle, locales, export, and stats.

A thin HTTP client of the running service; no business logic lives here.
Exit codes: 0 success, 1 domain error (machine-parsable JSON on stderr),
2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

DEFAULT_SERVER = "http://127.0.0.1:8077"


class AdminClient:
    def __init__(self, server: str, token: str, as_json: bool):
        self.server = server.rstrip("/")
        self.token = token
        self.as_json = as_json
        self.http = httpx.Client(base_url=self.server, headers={"X-Admin-Token": token}, timeout=30.0)

    def call(self, method: str, path: str, **kwargs) -> dict:
        try:
            response = self.http.request(method, path, **kwargs)
        except httpx.HTTPError as exc:
            _fail({"code": "server_unreachable", "message": str(exc)})
        if response.status_code >= 400:
            try:
                _fail(response.json())
            except json.JSONDecodeError:
                _fail({"code": "http_error", "message": response.text, "status": response.status_code})
        return response.json()


def _fail(error: dict) -> None:
    click.echo(json.dumps(error, ensure_ascii=False), err=True)
    sys.exit(1)


def _emit(client: AdminClient, data: dict, human: str) -> None:
    if client.as_json:
        click.echo(json.dumps(data, ensure_ascii=False, sort_keys=True))
    else:
        click.echo(human)


@click.group()
@click.option("--server", envvar="GEOGIVE_SERVER", default=DEFAULT_SERVER, show_default=True, help="Base URL of the running service.")
@click.option("--admin-token-file", envvar="GEOGIVE_ADMIN_TOKEN_FILE", default="./admin_token", show_default=True, help="Path to the local operator token file.")
@click.option("--json", "as_json", is_flag=True, default=False, help="Emit machine-readable JSON output.")
@click.pass_context
def main(ctx: click.Context, server: str, admin_token_file: str, as_json: bool) -> None:
    """Operator tooling for the freecycling service."""
    token_path = Path(admin_token_file)
    if not token_path.exists():
        raise click.UsageError(f"admin token file not found: {token_path}")
    token = token_path.read_text(encoding="utf-8").strip()
    ctx.obj = AdminClient(server, token, as_json)


# ---------------------------------------------------------------------------
# moderation


@main.group()
def moderate() -> None:
    """Review and decide pending user accounts; remove offers."""


@moderate.command("list")
@click.option("--status", default="pending", show_default=True, type=click.Choice(["pending", "approved", "rejected", "all"]))
@click.pass_obj
def moderate_list(client: AdminClient, status: str) -> None:
    data = client.call("GET", "/v1/moderation/users", params={"status": status})
    if client.as_json:
        click.echo(json.dumps(data, ensure_ascii=False, sort_keys=True))
        return
    users = data["users"]
    if not users:
        click.echo(f"no {status} users")
        return
    for u in users:
        flags = " [duplicate-identity?]" if u["annotations"] else ""
        click.echo(f"{u['user_id']}  {u['approval']['status']:<9} {u['display_name']}{flags}")


@moderate.command("approve")
@click.argument("user_id")
@click.pass_obj
def moderate_approve(client: AdminClient, user_id: str) -> None:
    data = client.call("POST", f"/v1/moderation/users/{user_id}/approve")
    _emit(client, data, f"approved {user_id}")


@moderate.command("reject")
@click.argument("user_id")
@click.option("--reason", required=True, type=click.Choice(["outside-region", "insufficient-info", "duplicate-identity", "other"]))
@click.pass_obj
def moderate_reject(client: AdminClient, user_id: str, reason: str) -> None:
    data = client.call("POST", f"/v1/moderation/users/{user_id}/reject", json={"reason": reason})
    _emit(client, data, f"rejected {user_id} ({reason})")


@moderate.command("remove-offer")
@click.argument("offer_id")
@click.pass_obj
def moderate_remove_offer(client: AdminClient, offer_id: str) -> None:
    data = client.call("POST", f"/v1/moderation/offers/{offer_id}/remove")
    _emit(client, data, f"removed offer {offer_id}")


@moderate.command("reports")
@click.pass_obj
def moderate_reports(client: AdminClient) -> None:
    data = client.call("GET", "/v1/moderation/reports")
    if client.as_json:
        click.echo(json.dumps(data, ensure_ascii=False, sort_keys=True))
        return
    if not data["reports"]:
        click.echo("no reports")
        return
    for r in data["reports"]:
        click.echo(f"{r['report_id']}  {r['kind']}  user={r['user_id']} related={r.get('related_user_id')}  {r['note']}")


# ---------------------------------------------------------------------------
# trial lifecycle


@main.group()
def trial() -> None:
    """Open, close, or inspect the trial window."""


@trial.command("open")
@click.pass_obj
def trial_open(client: AdminClient) -> None:
    data = client.call("POST", "/v1/admin/trial/open")
    _emit(client, data, f"trial open (since {data.get('opens_at')})")


@trial.command("close")
@click.pass_obj
def trial_close(client: AdminClient) -> None:
    data = client.call("POST", "/v1/admin/trial/close")
    _emit(client, data, f"trial closed (at {data.get('closes_at')})")


@trial.command("status")
@click.pass_obj
def trial_status(client: AdminClient) -> None:
    data = client.call("GET", "/v1/admin/trial")
    counts = data.get("counts", {})
    human = (
        f"trial {data['state']}  window={data.get('opens_at')}..{data.get('closes_at')}\n"
        f"users: {counts.get('users_approved', 0)} approved / {counts.get('users_total', 0)} total; "
        f"offers: {counts.get('offers', 0)}; reviews: {counts.get('reviews', 0)}"
    )
    _emit(client, data, human)


# ---------------------------------------------------------------------------
# locales


@main.group()
def locale() -> None:
    """Manage localization bundles."""


@locale.command("add")
@click.argument("bundle_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def locale_add(client: AdminClient, bundle_file: str) -> None:
    try:
        bundle = json.loads(Path(bundle_file).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _fail({"code": "parse_error", "message": f"cannot parse {bundle_file}: {exc}"})
    data = client.call("POST", "/v1/admin/locales", json={"bundle": bundle})
    _emit(client, data, f"added locale {data['locale']} ({data['keys']} keys)")


@locale.command("check")
@click.pass_obj
def locale_check(client: AdminClient) -> None:
    data = client.call("GET", "/v1/admin/locales/check")
    _emit(client, data, "key parity ok for: " + ", ".join(data["locales"]))


# ---------------------------------------------------------------------------
# export and stats


@main.command("export")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_obj
def export_cmd(client: AdminClient, out_dir: str) -> None:
    """Write the pseudonymized study dataset to a directory."""
    data = client.call("GET", "/v1/admin/export")
    out = Path(out_dir)
    written = []
    for rel, content in sorted(data["files"].items()):
        target = out / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(content.encode("utf-8"))
        written.append(rel)
    _emit(client, {"out": str(out), "files": written}, f"wrote {len(written)} files to {out}")


def _render_stats(data: dict) -> str:
    lines = []
    w = data["window"]
    lines.append(f"window: {w['start']} .. {w['end']}")
    u = data["users"]
    lines.append(f"users: total={u['total']} approved={u['approved']} pending={u['pending']} rejected={u['rejected']}")
    o = data["offers"]
    lines.append(
        f"offers: total={o['total']} open={o['open']} completed={o['completed']} "
        f"withdrawn={o['withdrawn']} removed={o['removed']}"
    )
    lines.append(f"reviews: {data['reviews']}")
    if data.get("posting"):
        p = data["posting"]
        lines.append(f"posting rate: {p['posts']} posts / {p['users']} users ({p['rendered']})")
    if data.get("lsns"):
        means = " ".join(f"{g}={m}" for g, m in data["lsns"]["group_means"].items())
        lines.append(f"LSNS-6 group means: {means}")
    if data.get("sus"):
        s = data["sus"]
        lines.append(f"SUS mean {s['mean']} ({s['adjective']}, {s['grade']}) over {s['count']} responses")
    if data.get("usefulness"):
        lines.append("usefulness medians:")
        for dim, groups in data["usefulness"].items():
            cells = " ".join(f"{g}={v['median']}" for g, v in groups.items())
            lines.append(f"  {dim}: {cells}")
    t = data["tally"]
    lines.append(f"events: {t['total']}")
    for action, count in t["by_action"].items():
        lines.append(f"  {action}: {count}")
    return "\n".join(lines)


@main.command("stats")
@click.option("--window-start", default=None, help="ISO timestamp; default unbounded.")
@click.option("--window-end", default=None, help="ISO timestamp; default now.")
@click.pass_obj
def stats_cmd(client: AdminClient, window_start: str | None, window_end: str | None) -> None:
    """Print the tally report, posting rate, and survey statistics."""
    params = {}
    if window_start:
        params["window_start"] = window_start
    if window_end:
        params["window_end"] = window_end
    data = client.call("GET", "/v1/admin/stats", params=params)
    _emit(client, data, _render_stats(data))


# ---------------------------------------------------------------------------
# roles


@main.group()
def user() -> None:
    """Account administration."""


@user.command("promote")
@click.argument("user_id")
@click.pass_obj
def user_promote(client: AdminClient, user_id: str) -> None:
    """Grant the moderator role (operator-only; never available via the API)."""
    data = client.call("POST", f"/v1/admin/users/{user_id}/promote")
    _emit(client, data, f"{user_id} is now a moderator")


if __name__ == "__main__":
    main()
