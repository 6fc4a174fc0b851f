"""
Error types raised by the question-generation engine.

Every data problem derives from GenQError so the command line can map it to
exit code 2; argument problems raise UsageError (exit code 1).
"""

from typing import Any, Optional


class GenQError(Exception):
    """Base class for data errors. Carries optional structured context."""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{base} ({details})"


class UsageError(Exception):
    """Invalid command-line usage."""


# Annotation
class MalformedLine(GenQError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        super().__init__(message, line=line_number)
        self.line_number = line_number


class UnknownUpos(GenQError):
    pass


class EmptyDocument(GenQError):
    pass


class EmptyInput(GenQError):
    pass


# Corpus
class MissingColumn(GenQError):
    pass


class BadEnumValue(GenQError):
    def __init__(self, message: str, row: int, column: str):
        super().__init__(message, row=row, column=column)
        self.row = row
        self.column = column


class LengthMismatch(GenQError):
    pass


class DegenerateMarginals(GenQError):
    pass


class UnknownFactor(GenQError):
    pass


# Templates
class NonGenerative(GenQError):
    pass


class EmptyQuestion(GenQError):
    pass


class MissingAnnotation(GenQError):
    def __init__(self, question_id: str):
        super().__init__("question has no annotation", question_id=question_id)
        self.question_id = question_id


class BadRecord(GenQError):
    def __init__(self, message: str, line_number: int):
        super().__init__(message, line=line_number)
        self.line_number = line_number


class DuplicateTemplateId(GenQError):
    pass


class EmptyCorpus(GenQError):
    pass


class KTooLarge(GenQError):
    pass


# Generator
class UnboundSlot(GenQError):
    pass


class EmptyTemplatePool(GenQError):
    pass


# Stats
class RankDeficientDesign(GenQError):
    pass


class NonConvergence(GenQError):
    pass


class EmptySample(GenQError):
    pass


class LayoutMismatch(GenQError):
    pass


# Config
class BadKey(GenQError):
    def __init__(self, keys: list):
        super().__init__("unknown configuration keys: " + ", ".join(keys))
        self.keys = keys


class BadValue(GenQError):
    pass
