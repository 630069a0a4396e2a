"""Error types shared across the platform.

Every error carries a stable machine-readable ``code`` that the HTTP layer
and the admin CLI surface verbatim, plus an optional ``details`` mapping.
"""

from __future__ import annotations

from typing import Any


class GeogiveError(Exception):
    """Base class for all domain and service errors."""

    code = "error"

    def __init__(self, message: str = "", details: dict[str, Any] | None = None):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details or {}


# domain-core
class NotPending(GeogiveError):
    code = "not_pending"


class MissingReason(GeogiveError):
    code = "missing_reason"


class NotOpen(GeogiveError):
    code = "not_open"


class NotAuthorized(GeogiveError):
    code = "not_authorized"


class SelfBlock(GeogiveError):
    code = "self_block"


class UnknownUser(GeogiveError):
    code = "unknown_user"


class InvalidDetail(GeogiveError):
    code = "invalid_detail"


class InvalidPosition(GeogiveError):
    code = "invalid_position"


class ValidationFailed(GeogiveError):
    code = "validation_failed"


# geo
class GeofenceConfigError(GeogiveError):
    code = "geofence_config_invalid"


# study-kit
class NotApproved(GeogiveError):
    code = "not_approved"


class OutOfRange(GeogiveError):
    code = "out_of_range"


class TaskNotPending(GeogiveError):
    code = "task_not_pending"


class ReviewerMismatch(GeogiveError):
    code = "reviewer_mismatch"


class DuplicateReview(GeogiveError):
    code = "duplicate_review"


# telemetry-analytics
class BadWindow(GeogiveError):
    code = "bad_window"


class NoUsers(GeogiveError):
    code = "no_users"


class EmptyGroup(GeogiveError):
    code = "empty_group"


# persistence
class VersionConflict(GeogiveError):
    code = "version_conflict"


class StoreCorrupt(GeogiveError):
    code = "store_corrupt"


# localization
class UnknownLocale(GeogiveError):
    code = "unknown_locale"


class KeyParityViolation(GeogiveError):
    code = "key_parity_violation"


class BundleParseError(GeogiveError):
    code = "parse_error"


# api-service
class Unauthenticated(GeogiveError):
    code = "unauthenticated"


class BadCredentials(GeogiveError):
    code = "bad_credentials"


class AccountRejected(GeogiveError):
    code = "account_rejected"


class ConsentIncomplete(GeogiveError):
    code = "consent_incomplete"


class DuplicateEmail(GeogiveError):
    code = "duplicate_email"


class ProviderVerificationFailed(GeogiveError):
    code = "provider_verification_failed"


class WeakPassword(GeogiveError):
    code = "weak_password"


class NoViewerPosition(GeogiveError):
    code = "no_viewer_position"


class NoContactMethod(GeogiveError):
    code = "no_contact_method"


class NotModerator(GeogiveError):
    code = "not_moderator"


class NotAdmin(GeogiveError):
    code = "not_admin"


class TrialClosed(GeogiveError):
    code = "trial_closed"


class InvalidTransition(GeogiveError):
    code = "invalid_transition"


class RateLimited(GeogiveError):
    code = "rate_limited"


class Conflict(GeogiveError):
    code = "conflict"


class NotFound(GeogiveError):
    code = "not_found"


class PayloadTooLarge(GeogiveError):
    code = "payload_too_large"


class UnsupportedMedia(GeogiveError):
    code = "unsupported_media"
