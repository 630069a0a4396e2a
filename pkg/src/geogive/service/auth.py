"""Credentials, session tokens, and the pluggable identity-provider client.

Raw passwords are hashed with scrypt (memory-hard, per-user salt) and never
stored or logged. Session tokens are 256-bit random values; only their hash
touches the store.
"""

from __future__ import annotations

import hashlib
import hmac
import os
import secrets
from dataclasses import dataclass

from ..errors import ProviderVerificationFailed

SCRYPT_R = 8
SCRYPT_P = 1
DKLEN = 32


def hash_password(password: str, n: int = 16384) -> dict:
    salt = os.urandom(16)
    derived = hashlib.scrypt(password.encode("utf-8"), salt=salt, n=n, r=SCRYPT_R, p=SCRYPT_P, dklen=DKLEN)
    return {"algo": "scrypt", "n": n, "r": SCRYPT_R, "p": SCRYPT_P, "salt": salt.hex(), "hash": derived.hex()}


def verify_password(password: str, stored: dict) -> bool:
    derived = hashlib.scrypt(
        password.encode("utf-8"),
        salt=bytes.fromhex(stored["salt"]),
        n=stored["n"],
        r=stored["r"],
        p=stored["p"],
        dklen=DKLEN,
    )
    return hmac.compare_digest(derived.hex(), stored["hash"])


def new_session_token() -> str:
    return secrets.token_urlsafe(32)  # 256 bits, URL-safe


def token_key(token: str) -> str:
    """Sessions are stored under the token hash, never the raw token."""
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class IdentityAssertion:
    provider: str
    subject: str
    email: str


class StubIdentityProvider:
    """Deterministic stand-in for real identity providers.

    Accepts tokens of the form ``stub:<subject>:<email>`` for any provider
    name, so tests and demo deployments need no third-party accounts.
    """

    def verify(self, provider: str, token: str) -> IdentityAssertion:
        parts = token.split(":", 2)
        if len(parts) != 3 or parts[0] != "stub" or not parts[1] or "@" not in parts[2]:
            raise ProviderVerificationFailed(f"token not accepted by {provider} stub")
        return IdentityAssertion(provider=provider, subject=parts[1], email=parts[2].lower())


class DisabledIdentityProvider:
    """Used when stub mode is off and no real integration is configured."""

    def verify(self, provider: str, token: str) -> IdentityAssertion:
        raise ProviderVerificationFailed(f"identity provider {provider} is not configured")
