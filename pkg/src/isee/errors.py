"""Exception hierarchy shared by all engine modules.

Every error carries a stable ``code`` (the class name) so the HTTP service
and CLI can map engine failures to machine-readable diagnostics without
string matching on messages.
"""

from __future__ import annotations


class IseeError(Exception):
    """Base class for all engine errors."""

    def __init__(self, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or []

    @property
    def code(self) -> str:
        return type(self).__name__


# taxonomy
class DuplicateConcept(IseeError):
    pass


class MultipleRoots(IseeError):
    pass


class CycleDetected(IseeError):
    pass


class DanglingParent(IseeError):
    pass


class UnknownConcept(IseeError):
    pass


# case model
class SchemaViolation(IseeError):
    pass


class InvalidTree(IseeError):
    pass


# behavior trees
class DuplicateQuestion(IseeError):
    pass


class InvalidSubtree(IseeError):
    pass


# retrieval
class MetricTypeMismatch(IseeError):
    pass


class EmptyCaseBase(IseeError):
    pass


# adaptation
class MissingSolution(IseeError):
    pass


# revision
class UnknownExplainer(IseeError):
    pass


class SizeCapExceeded(IseeError):
    pass


# retention
class EmptyFeedback(IseeError):
    pass


class ScoreOutOfRange(IseeError):
    pass


class IncompleteCase(IseeError):
    pass


class ConsentWithheld(IseeError):
    pass


class DuplicateId(IseeError):
    pass
