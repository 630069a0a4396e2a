"""Admin CLI against a live server: thin client, stable exits, --json output."""

from __future__ import annotations

import json

import httpx
import pytest
from click.testing import CliRunner

from geogive.cli import main as cli


@pytest.fixture
def cli_env(live_server, tmp_path):
    token_file = tmp_path / "cli_admin_token"
    token_file.write_text(live_server.runtime.admin_token + "\n")
    base = ["--server", live_server.base_url, "--admin-token-file", str(token_file)]
    runner = CliRunner()

    def run(*args, as_json=False):
        argv = base + (["--json"] if as_json else []) + list(args)
        return runner.invoke(cli, argv)

    return run


@pytest.fixture
def api(live_server):
    with httpx.Client(base_url=live_server.base_url, timeout=10.0) as client:
        yield client


def make_pending_user(api, name="Cli User") -> str:
    r = api.post(
        "/v1/users",
        json={"display_name": name, "method": "email",
              "email": f"{name.replace(' ', '.').lower()}@example.org", "password": "x" * 12},
    )
    assert r.status_code == 201, r.text
    return r.json()["user_id"]


def test_moderate_list_empty(cli_env):
    result = cli_env("moderate", "list")
    assert result.exit_code == 0
    assert "no pending users" in result.output


def test_moderate_reject_then_approve_fails(cli_env, api):
    uid = make_pending_user(api)
    result = cli_env("moderate", "reject", uid, "--reason", "outside-region")
    assert result.exit_code == 0
    assert uid in result.output

    # Approving an already-decided account is a domain error: exit 1, JSON on stderr.
    result = cli_env("moderate", "approve", uid)
    assert result.exit_code == 1
    error = json.loads(result.output.strip().splitlines()[-1])
    assert error["code"] == "not_pending"


def test_moderate_list_shows_pending(cli_env, api):
    uid = make_pending_user(api, name="Waiting Person")
    result = cli_env("moderate", "list")
    assert result.exit_code == 0
    assert uid in result.output and "Waiting Person" in result.output
    result = cli_env("moderate", "list", as_json=True)
    parsed = json.loads(result.output)
    assert any(u["user_id"] == uid for u in parsed["users"])


def test_moderate_approve(cli_env, api):
    uid = make_pending_user(api, name="Approve Me")
    result = cli_env("moderate", "approve", uid)
    assert result.exit_code == 0
    assert f"approved {uid}" in result.output


def test_trial_lifecycle(cli_env):
    result = cli_env("trial", "status")
    assert result.exit_code == 0 and "scheduled" in result.output

    assert cli_env("trial", "open").exit_code == 0
    result = cli_env("trial", "status", as_json=True)
    assert json.loads(result.output)["state"] == "open"

    assert cli_env("trial", "close").exit_code == 0
    assert cli_env("trial", "close").exit_code == 0  # idempotent no-op

    result = cli_env("trial", "open")
    assert result.exit_code == 1
    assert json.loads(result.output.strip().splitlines()[-1])["code"] == "invalid_transition"


def test_locale_check_and_add(cli_env, api, tmp_path):
    result = cli_env("locale", "check")
    assert result.exit_code == 0
    assert "en" in result.output and "de" in result.output and "ar" in result.output

    en = api.get("/v1/localizations/en").json()
    complete = tmp_path / "es.json"
    complete.write_text(
        json.dumps({"locale": "es", "name": "Español", "direction": "ltr", "strings": en["strings"]}),
        encoding="utf-8",
    )
    result = cli_env("locale", "add", str(complete))
    assert result.exit_code == 0 and "es" in result.output

    broken_strings = dict(en["strings"])
    missing = sorted(broken_strings)[:3]
    for key in missing:
        del broken_strings[key]
    broken = tmp_path / "fr.json"
    broken.write_text(
        json.dumps({"locale": "fr", "name": "Français", "direction": "ltr", "strings": broken_strings}),
        encoding="utf-8",
    )
    result = cli_env("locale", "add", str(broken))
    assert result.exit_code == 1
    error = json.loads(result.output.strip().splitlines()[-1])
    assert error["code"] == "key_parity_violation"
    assert error["details"]["missing"] == missing


def test_export_writes_archive_and_is_deterministic(cli_env, api, tmp_path):
    make_pending_user(api, name="Export Subject")
    out1 = tmp_path / "export1"
    out2 = tmp_path / "export2"
    assert cli_env("export", "--out", str(out1)).exit_code == 0
    assert cli_env("export", "--out", str(out2)).exit_code == 0

    names = sorted(p.relative_to(out1).as_posix() for p in out1.rglob("*") if p.is_file())
    assert names == [
        "dataset/manifest.json",
        "dataset/offers.jsonl",
        "dataset/reviews.jsonl",
        "dataset/surveys.jsonl",
        "dataset/telemetry.jsonl",
        "dataset/users.jsonl",
        "pseudonym_map.json",
    ]
    for rel in names:
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes(), rel


def test_stats_empty_store(cli_env):
    result = cli_env("stats")
    assert result.exit_code == 0
    assert "users: total=0" in result.output
    assert "events: 0" in result.output


def test_stats_json_schema(cli_env, api):
    make_pending_user(api, name="Stats Subject")
    result = cli_env("stats", as_json=True)
    assert result.exit_code == 0
    parsed = json.loads(result.output)
    for key in ("window", "users", "offers", "reviews", "posting", "tally", "lsns", "sus", "usefulness"):
        assert key in parsed
    assert parsed["users"]["pending"] == 1


def test_missing_token_file_is_usage_error(live_server, tmp_path):
    runner = CliRunner()
    result = runner.invoke(
        cli, ["--server", live_server.base_url, "--admin-token-file", str(tmp_path / "nope"), "stats"]
    )
    assert result.exit_code == 2


def test_bad_usage_exit_code(cli_env):
    result = cli_env("moderate", "reject", "u_x")  # --reason is required
    assert result.exit_code == 2


def test_user_promote(cli_env, api):
    uid = make_pending_user(api, name="Future Mod")
    result = cli_env("user", "promote", uid)
    assert result.exit_code == 0 and "moderator" in result.output
