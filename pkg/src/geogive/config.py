"""Service configuration: one JSON file plus environment overrides.

Environment variables (GEOGIVE_*) take precedence over the file, which takes
precedence over the defaults baked in here.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .errors import ValidationFailed

_ENV_PREFIX = "GEOGIVE_"


def default_geofence_path() -> str:
    return str(resources.files("geogive").joinpath("data/geofence-muenster.json"))


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8077
    data_dir: str = "./geogive-data"
    geofence_path: str = field(default_factory=default_geofence_path)
    admin_token_file: str = "./admin_token"
    identity_stub_mode: bool = True
    extra_locales_dir: str | None = None
    static_dir: str | None = None
    session_ttl_days: int = 14
    rate_ceiling: int = 100_000
    scrypt_n: int = 16384
    notification_interval_s: float = 0.25
    max_blob_bytes: int = 5 * 1024 * 1024

    @property
    def data_path(self) -> Path:
        return Path(self.data_dir)


_BOOL_TRUE = {"1", "true", "yes", "on"}


def _coerce(name: str, kind, value: str):
    if kind is bool or kind == "bool":
        return value.lower() in _BOOL_TRUE
    if kind is int or kind == "int":
        return int(value)
    if kind is float or kind == "float":
        return float(value)
    return value


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Build the effective config from defaults, optional file, and env."""
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationFailed(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValidationFailed(f"config {path} must be a JSON object")
        values.update(raw)

    cfg_fields = {f.name: f for f in fields(ServiceConfig)}
    unknown = set(values) - set(cfg_fields)
    if unknown:
        raise ValidationFailed(f"unknown config keys: {', '.join(sorted(unknown))}")

    for name, f in cfg_fields.items():
        env_key = _ENV_PREFIX + name.upper()
        if env_key in env:
            base = f.type.replace(" | None", "") if isinstance(f.type, str) else f.type
            values[name] = _coerce(name, base, env[env_key])

    return ServiceConfig(**values)
