"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so the API layer can
map failures to HTTP responses without string matching.
"""


class SlpCaseError(Exception):
    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class InvalidParameters(SlpCaseError):
    code = "invalid_parameters"


class EmptyDocument(SlpCaseError):
    code = "empty_document"


class DimensionMismatch(SlpCaseError):
    code = "dimension_mismatch"


class StorageIO(SlpCaseError):
    code = "storage_io"


class NotFound(SlpCaseError):
    code = "not_found"


class IntegrityError(SlpCaseError):
    code = "integrity_error"


class UnknownFormat(SlpCaseError):
    code = "unknown_format"


class UnresolvedPlaceholder(SlpCaseError):
    code = "unresolved_placeholder"


class UnknownModelClass(SlpCaseError):
    code = "unknown_model_class"


class ProviderError(SlpCaseError):
    code = "provider_error"


class AuthFailure(ProviderError):
    code = "auth_failure"


class RateLimited(ProviderError):
    code = "rate_limited"


class ProviderTimeout(ProviderError):
    code = "timeout"


class GenerationFailed(SlpCaseError):
    """Raised after the per-case retry budget is exhausted."""

    code = "generation_failed_after_retries"

    def __init__(self, message: str, last_report=None):
        super().__init__(message)
        self.last_report = last_report


class UnparseableRequest(SlpCaseError):
    code = "unparseable_request"


class RosterError(SlpCaseError):
    code = "roster_error"


class PlanIncomplete(SlpCaseError):
    code = "plan_incomplete"


class JudgeUnparseable(SlpCaseError):
    code = "judge_unparseable"


class AnalysisUnparseable(SlpCaseError):
    code = "analysis_unparseable"
