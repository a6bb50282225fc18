"""Exception hierarchy shared across the package.

Every error carries a short machine-readable ``code`` used by the HTTP
layer when shaping ``{code, message}`` error bodies.
"""


class FdcError(Exception):
    code = "error"


class ValidationError(FdcError):
    """Malformed value: bad URI, empty required field, out-of-bounds span."""

    code = "validation"


class DomainError(FdcError):
    """Contract violation: unknown object/attribute id, p < 1, ..."""

    code = "domain"


class NotFoundError(FdcError):
    code = "not-found"


class CompileError(FdcError):
    """Lexicon cannot be compiled into a matcher."""

    code = "compile"


class InputError(FdcError):
    """Unprocessable input stream (e.g. invalid UTF-8)."""

    code = "input"


class EmissionError(FdcError):
    """Triple emission failed (concept without a tag mapping)."""

    code = "emission"


class PipelineStageError(FdcError):
    """A filter stage raised; records which one."""

    code = "pipeline-stage"

    def __init__(self, stage_index: int, cause: BaseException):
        super().__init__(f"stage {stage_index} failed: {cause}")
        self.stage_index = stage_index
        self.cause = cause


class TransitionError(FdcError):
    """Illegal (state, event) pair for a job."""

    code = "transition"


class RejectedError(FdcError):
    """Submission refused (blacklisted plugin, ineligible reset)."""

    code = "rejected"


class UsageError(FdcError):
    """Caller misuse: unknown format id, inverted window."""

    code = "usage"


class AuthError(FdcError):
    code = "auth"


class ForbiddenError(FdcError):
    code = "forbidden"


class PayloadTooLargeError(FdcError):
    code = "too-large"


class StorageError(FdcError):
    code = "io"
