"""Shared fixtures: app instances, live server, and onboarding helpers."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

import pytest
import uvicorn
from fastapi.testclient import TestClient

from geogive.config import ServiceConfig
from geogive.service import create_app


def make_config(tmp_path, **overrides) -> ServiceConfig:
    defaults = dict(
        data_dir=str(tmp_path / "data"),
        admin_token_file=str(tmp_path / "admin_token"),
        scrypt_n=4096,  # keep tests quick; production default stays higher
        notification_interval_s=0.05,
    )
    defaults.update(overrides)
    return ServiceConfig(**defaults)


@pytest.fixture
def app(tmp_path):
    return create_app(make_config(tmp_path))


@pytest.fixture
def client(app):
    with TestClient(app) as c:
        yield c


@pytest.fixture
def runtime(app):
    return app.state.runtime


@pytest.fixture
def admin_headers(runtime):
    return {"X-Admin-Token": runtime.admin_token}


@dataclass
class Actor:
    user_id: str
    email: str
    password: str
    token: str

    @property
    def headers(self) -> dict:
        return {"Authorization": f"Bearer {self.token}"}


_COUNTER = iter(range(1, 100000))


def signup_user(client, display_name: str = None, locale: str = "en") -> Actor:
    n = next(_COUNTER)
    email = f"user{n}@example.org"
    password = "correct-horse-battery"
    display_name = display_name or f"User {n}"
    r = client.post(
        "/v1/users",
        json={"display_name": display_name, "locale": locale, "method": "email", "email": email, "password": password},
    )
    assert r.status_code == 201, r.text
    user_id = r.json()["user_id"]
    r = client.post("/v1/sessions", json={"method": "email", "email": email, "password": password})
    assert r.status_code == 201, r.text
    return Actor(user_id=user_id, email=email, password=password, token=r.json()["token"])


def approve_user(client, admin_headers, user_id: str) -> None:
    r = client.post(f"/v1/moderation/users/{user_id}/approve", headers=admin_headers)
    assert r.status_code == 200, r.text


def onboard(client, actor: Actor, user_group: str = "local_freecycler", lsns_items=None) -> None:
    """Consent plus both onboarding surveys, reaching the Full gate."""
    r = client.post(
        "/v1/study/consent",
        json={"study_consent": True, "location_logging_consent": True},
        headers=actor.headers,
    )
    assert r.status_code == 200, r.text
    r = client.post("/v1/study/surveys/demographics", json={"user_group": user_group}, headers=actor.headers)
    assert r.status_code == 201, r.text
    r = client.post(
        "/v1/study/surveys/lsns6",
        json={"items": list(lsns_items or (3, 3, 3, 3, 3, 3))},
        headers=actor.headers,
    )
    assert r.status_code == 201, r.text


def full_member(client, admin_headers, display_name=None, user_group="local_freecycler", lsns_items=None) -> Actor:
    actor = signup_user(client, display_name)
    approve_user(client, admin_headers, actor.user_id)
    onboard(client, actor, user_group=user_group, lsns_items=lsns_items)
    return actor


def enable_whatsapp(client, actor: Actor, number: str = "+4915112345678") -> None:
    r = client.patch(
        "/v1/users/me",
        json={"contact_methods": {"whatsapp": {"enabled": True, "detail": number}}},
        headers=actor.headers,
    )
    assert r.status_code == 200, r.text


def set_location(client, actor: Actor, lat: float, lon: float, recorded_at: str | None = None) -> dict:
    body = {"lat": lat, "lon": lon}
    if recorded_at:
        body["recorded_at"] = recorded_at
    r = client.patch("/v1/users/me/location", json=body, headers=actor.headers)
    assert r.status_code == 200, r.text
    return r.json()


class LiveServer:
    def __init__(self, app, server, thread, base_url):
        self.app = app
        self.server = server
        self.thread = thread
        self.base_url = base_url

    @property
    def runtime(self):
        return self.app.state.runtime


@pytest.fixture
def live_server(tmp_path):
    """A real uvicorn server on an ephemeral port, for CLI and e2e tests."""
    config = make_config(tmp_path)
    app = create_app(config)
    uv_config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning", access_log=False)
    server = uvicorn.Server(uv_config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server failed to start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    live = LiveServer(app, server, thread, f"http://127.0.0.1:{port}")
    yield live
    server.should_exit = True
    thread.join(timeout=5)
