"""Exception hierarchy shared by every engine module.

Each error carries an ``error_code`` (stable snake_case identifier used in
API error bodies and CLI output) and an optional ``field`` naming the
offending input field.
"""

from __future__ import annotations


class SsaError(Exception):
    """Base class for all engine errors."""

    error_code = "internal_error"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> dict:
        body = {"error_code": self.error_code, "message": self.message}
        if self.field is not None:
            body["field"] = self.field
        return body


class ValidationError(SsaError):
    error_code = "validation_error"


class RangeError(ValidationError):
    error_code = "range_error"


class DuplicateContactId(ValidationError):
    error_code = "duplicate_contact_id"


class InvalidCues(ValidationError):
    error_code = "invalid_cues"


class MissingField(ValidationError):
    error_code = "missing_field"


class InvalidCorrection(ValidationError):
    error_code = "invalid_correction"


class EmptyDataset(ValidationError):
    error_code = "empty_dataset"


class TooFewProfiles(ValidationError):
    error_code = "too_few_profiles"


class TooFewExamples(ValidationError):
    error_code = "too_few_examples"


class ManifestMismatch(ValidationError):
    error_code = "manifest_mismatch"


class UnknownContact(SsaError):
    error_code = "unknown_contact"


class UnknownSituation(SsaError):
    error_code = "unknown_situation"


class UnknownConflict(SsaError):
    error_code = "unknown_conflict"


class UnknownRequest(SsaError):
    error_code = "unknown_request"


class ClosedRequest(UnknownRequest):
    """Answering a request that was already answered and closed."""

    error_code = "closed_request"


class UnknownSuggestion(SsaError):
    error_code = "unknown_suggestion"


class UnknownDecision(SsaError):
    error_code = "unknown_decision"


class StorageError(SsaError):
    error_code = "storage_error"


class CorruptLog(StorageError):
    error_code = "corrupt_log"

    def __init__(self, message: str, seq: int | None = None):
        super().__init__(message)
        self.seq = seq


class SnapshotVersionMismatch(StorageError):
    error_code = "snapshot_version_mismatch"
