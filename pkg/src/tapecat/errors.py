"""Exception hierarchy for the catalog engine.

Every domain failure raises a ``CatalogError`` subclass carrying a stable
``code`` string, which the CLI maps to exit status 1 and the HTTP service
maps to an error envelope. Anything else escaping the core is a bug.
"""

from __future__ import annotations


class CatalogError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.field = field


class RegistryError(CatalogError):
    """Malformed registry bundle (bad record, cycle, dangling parent)."""

    code = "registry"


class UnknownClassError(CatalogError):
    code = "unknown-class"


class UnknownPropertyError(CatalogError):
    code = "unknown-property"


class UnknownEntityError(CatalogError):
    code = "unknown-entity"


class UnknownStatementError(CatalogError):
    code = "unknown-statement"


class LiteralRuleError(CatalogError):
    """Literal missing, forbidden, or malformed for the entity's class."""

    code = "literal"


class DuplicateIdentifierError(CatalogError):
    """A second E42 with the same literal value."""

    code = "duplicate-identifier"


class ProfileViolationError(CatalogError):
    """Domain or range check failed under the active profile."""

    code = "profile"

    def __init__(self, message: str, *, constraint: str, field: str | None = None):
        super().__init__(message, field=field)
        self.constraint = constraint  # "domain" | "range"


class QualifierError(CatalogError):
    code = "qualifier"


class ClassMismatchError(CatalogError):
    """Entity exists but is not of the class an operation requires."""

    code = "class-mismatch"


class ActivityStateError(CatalogError):
    """Begin/commit/abort called against the wrong context state."""

    code = "activity-state"


class StoreBusyError(CatalogError):
    """Another activity holds the exclusive write window."""

    code = "busy"


class EmptyActivityError(CatalogError):
    code = "empty-activity"


class RetractionError(CatalogError):
    """Statement already retracted or not retractable."""

    code = "retraction"


class WorkflowError(CatalogError):
    """Workflow precondition failed before any effect was committed."""

    code = "workflow"


class TosecParseError(CatalogError):
    code = "tosec-parse"

    def __init__(self, message: str, *, filename: str | None = None, field: str | None = None):
        super().__init__(message, field=field)
        self.filename = filename


class TurtleSyntaxError(CatalogError):
    code = "turtle-syntax"

    def __init__(self, message: str, *, line: int | None = None):
        super().__init__(message)
        self.line = line


class ImportError_(CatalogError):
    """Semantic failure while importing a parsed document."""

    code = "import"


class LogReplayError(CatalogError):
    """Corrupt or gapped event log; ``seq`` is the failing record."""

    code = "log-replay"

    def __init__(self, message: str, *, seq: int, store=None):
        super().__init__(message)
        self.seq = seq
        # State rebuilt from the valid committed prefix, for recovery paths.
        self.store = store


class ConfigError(CatalogError):
    code = "config"
