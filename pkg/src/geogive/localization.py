"""Localization bundles: loading, English fallback, and key-parity checks.

A bundle is one JSON file per locale with locale code, display name, text
direction, and a flat string map. Every non-English bundle must carry
exactly the English key set; translators work through the one file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import BundleParseError, KeyParityViolation

DEFAULT_LOCALE = "en"


@dataclass(frozen=True)
class LocalizationBundle:
    locale: str
    name: str
    direction: str  # "ltr" or "rtl"
    strings: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "locale": self.locale,
            "name": self.name,
            "direction": self.direction,
            "strings": self.strings,
        }


def _shipped_dir() -> Path:
    return Path(str(resources.files("geogive").joinpath("data/locales")))


def _parse_bundle_dict(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleParseError(f"cannot parse bundle {path}: {exc}") from exc


def _bundle_from_dict(raw: dict, source: str) -> LocalizationBundle:
    if not isinstance(raw, dict):
        raise BundleParseError(f"bundle {source} must be a JSON object")
    for field in ("locale", "name", "direction", "strings"):
        if field not in raw:
            raise BundleParseError(f"bundle {source} missing field {field!r}")
    if raw["direction"] not in ("ltr", "rtl"):
        raise BundleParseError(f"bundle {source}: direction must be 'ltr' or 'rtl'")
    strings = raw["strings"]
    if not isinstance(strings, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in strings.items()
    ):
        raise BundleParseError(f"bundle {source}: strings must map keys to strings")
    return LocalizationBundle(
        locale=raw["locale"], name=raw["name"], direction=raw["direction"], strings=dict(strings)
    )


def load_bundle(path: str | Path) -> LocalizationBundle:
    path = Path(path)
    return _bundle_from_dict(_parse_bundle_dict(path), source=str(path))


class LocaleCatalog:
    """All available bundles: the shipped set plus operator-added ones."""

    def __init__(self, extra_dir: str | Path | None = None):
        self._bundles: dict[str, LocalizationBundle] = {}
        for path in sorted(_shipped_dir().glob("*.json")):
            bundle = load_bundle(path)
            self._bundles[bundle.locale] = bundle
        self._extra_dir = Path(extra_dir) if extra_dir else None
        if self._extra_dir and self._extra_dir.exists():
            for path in sorted(self._extra_dir.glob("*.json")):
                bundle = load_bundle(path)
                self._bundles[bundle.locale] = bundle

    @property
    def locales(self) -> list[str]:
        return sorted(self._bundles)

    def has(self, locale: str) -> bool:
        return locale in self._bundles

    def get(self, locale: str) -> tuple[LocalizationBundle, bool]:
        """Bundle for a locale; unknown locales fall back to English.

        Returns (bundle, fallback_used).
        """
        if locale in self._bundles:
            return self._bundles[locale], False
        return self._bundles[DEFAULT_LOCALE], True

    def reference_keys(self) -> set[str]:
        return set(self._bundles[DEFAULT_LOCALE].strings)

    def parity_report(self, bundle: LocalizationBundle) -> tuple[list[str], list[str]]:
        """(missing, extra) keys relative to the English reference."""
        reference = self.reference_keys()
        keys = set(bundle.strings)
        return sorted(reference - keys), sorted(keys - reference)

    def check_parity(self, bundle: LocalizationBundle) -> None:
        missing, extra = self.parity_report(bundle)
        if missing or extra:
            raise KeyParityViolation(
                f"bundle {bundle.locale} violates key parity",
                details={"missing": missing, "extra": extra},
            )

    def check_all(self) -> dict[str, dict]:
        """Parity report for every non-English bundle; raises on violation."""
        report = {}
        for locale in self.locales:
            if locale == DEFAULT_LOCALE:
                continue
            bundle = self._bundles[locale]
            missing, extra = self.parity_report(bundle)
            report[locale] = {"missing": missing, "extra": extra, "ok": not missing and not extra}
        violations = {k: v for k, v in report.items() if not v["ok"]}
        if violations:
            raise KeyParityViolation("shipped bundles violate key parity", details=violations)
        return report

    def add(self, path: str | Path) -> LocalizationBundle:
        """Validate and install an operator-supplied bundle file."""
        return self.add_dict(_parse_bundle_dict(Path(path)))

    def add_dict(self, raw: dict) -> LocalizationBundle:
        """Validate and install a bundle given as an already-parsed dict."""
        bundle = _bundle_from_dict(raw, source="<payload>")
        self.check_parity(bundle)
        if self._extra_dir:
            self._extra_dir.mkdir(parents=True, exist_ok=True)
            target = self._extra_dir / f"{bundle.locale}.json"
            target.write_text(
                json.dumps(bundle.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        self._bundles[bundle.locale] = bundle
        return bundle
