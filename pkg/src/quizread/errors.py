"""Exception types shared across the package.

Every error carries a stable machine ``code`` (its class name) used by the
HTTP error envelope and the CLI. Messages must never contain credentials.
"""

from __future__ import annotations


class QuizreadError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- ingest ---------------------------------------------------------------

class UnreadableDocument(QuizreadError):
    """Input bytes are not a well-formed PDF."""


class EncryptedDocument(QuizreadError):
    """PDF is password-protected; extraction is refused."""


class EmptyDocument(QuizreadError):
    """PDF contains zero pages."""


class DocumentTooLarge(QuizreadError):
    """Upload exceeds the configured size limit."""


class PageOutOfRange(QuizreadError):
    """Page index outside [0, page_count)."""


# --- prompting / provider --------------------------------------------------

class UnsupportedKind(QuizreadError):
    """Question kind cannot be generated (only Comprehension and Analysis can)."""


class CountOutOfRange(QuizreadError):
    """questions_per_page outside the 1..10 bound."""


class EmptyPage(QuizreadError):
    """Page has no extractable text to prompt with."""


class ProviderError(QuizreadError):
    """Base for completion-provider failures."""


class ProviderTimeout(ProviderError):
    """Transient provider failures persisted through all retries."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class ProviderRejected(ProviderError):
    """Provider returned a non-retryable rejection (4xx other than 429)."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class CredentialMissing(ProviderError):
    """The environment variable named by credential_ref is not set."""


# --- qa parsing / sidecar ----------------------------------------------------

class NoQuestionsFound(QuizreadError):
    """Raw completion contained no recognizable question line."""


class MalformedResponse(QuizreadError):
    """Strict parse found issues in the raw completion."""

    def __init__(self, message: str, issues=()):
        super().__init__(message)
        self.issues = list(issues)


class DuplicatePageSet(QuizreadError):
    """Two question sets share the same (page_index, kind)."""


class InvalidSidecar(QuizreadError):
    """Sidecar text violates the schema or has an unknown format_version."""


# --- orchestration / storage -------------------------------------------------

class JobRejected(QuizreadError):
    """Generation request invalid for the target document."""


class JobAlreadyRunning(QuizreadError):
    """A job is already active for this document."""


class StorageFailure(QuizreadError):
    """Filesystem store operation failed."""


class NotFound(QuizreadError):
    """Unknown document, job, or sidecar."""
