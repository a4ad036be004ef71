"""Exception hierarchy.

Every failure raised by the library derives from :class:`LFError`, so callers
(and the CLI) can catch one type. Validation problems are ``ValueError``
subclasses; I/O problems keep their ``OSError`` origin.
"""

from __future__ import annotations


class LFError(ValueError):
    """Base class for all validation errors raised by massive_lf."""


# -- compact logical forms -------------------------------------------------

class LFSyntaxError(LFError):
    """Compact LF text that does not follow the flat bracket grammar."""


class UnbalancedBrackets(LFSyntaxError):
    pass


class MissingIntentRoot(LFSyntaxError):
    pass


class NestedIntent(LFSyntaxError):
    pass


class EmptySlotValue(LFSyntaxError):
    pass


class InvalidLabel(LFError):
    pass


class InvalidSlotValue(LFError):
    pass


# -- inline annotations ----------------------------------------------------

class MalformedAnnotation(LFError):
    pass


class OverlappingSpans(LFError):
    pass


class SpanOutOfRange(LFError):
    pass


# -- conversion ------------------------------------------------------------

class UnparseablePrediction(LFError):
    pass


class SlotValueNotFound(LFError):
    def __init__(self, slot: str, value: str, utterance: str = ""):
        self.slot = slot
        self.value = value
        self.utterance = utterance
        super().__init__(f"slot {slot!r}: value {value!r} not found in utterance {utterance!r}")


# -- data joins / evaluation ----------------------------------------------

class KeyConsistencyError(LFError):
    """Base for key-consistency failures; carries the offending keys."""

    def __init__(self, message: str, keys=()):
        self.keys = list(keys)
        if self.keys:
            shown = ", ".join(_fmt_key(k) for k in self.keys[:20])
            more = f" (+{len(self.keys) - 20} more)" if len(self.keys) > 20 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)


def _fmt_key(key) -> str:
    if isinstance(key, tuple):
        return "/".join(str(k) for k in key)
    return str(key)


class DuplicateKey(KeyConsistencyError):
    pass


class DuplicatePrediction(DuplicateKey):
    pass


class MissingPrediction(KeyConsistencyError):
    pass


class UnknownPredictionId(KeyConsistencyError):
    pass


class MissingJoinKey(KeyConsistencyError):
    pass


class MissingNmtTranslation(KeyConsistencyError):
    pass


class InconsistentLanguageSets(KeyConsistencyError):
    pass


class UnknownLocale(KeyConsistencyError):
    pass


# -- file formats ----------------------------------------------------------

class MalformedJsonLine(LFError):
    def __init__(self, path, lineno: int, detail: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {detail}")


class InvariantViolation(LFError):
    def __init__(self, path, lineno: int, detail: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {detail}")
