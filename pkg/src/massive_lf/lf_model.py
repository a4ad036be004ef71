"""Flat logical forms: the compact bracketed format and inline annotations.

Two textual encodings describe the same :class:`LogicalForm`:

* compact, used as the seq2seq target::

    [IN:ALARM_SET [SL:TIME nueve de la mañana ] [SL:DATE viernes ] ]

* inline annotation of the utterance (MASSIVE ``annot_utt``)::

    despiértame a las [time : nueve de la mañana] el [date : viernes]

Labels are kept lowercase in memory and upper-cased only when writing the
compact form. Offsets are Python string indices, i.e. unicode code points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Tuple

from .errors import (
    EmptySlotValue,
    InvalidLabel,
    InvalidSlotValue,
    LFSyntaxError,
    MalformedAnnotation,
    MissingIntentRoot,
    NestedIntent,
    OverlappingSpans,
    SpanOutOfRange,
    UnbalancedBrackets,
)

Span = Tuple[int, int]

_LABEL_RE = re.compile(r"[A-Za-z0-9_.\-]+\Z")
_INTENT_OPEN = "[IN:"
_SLOT_OPEN = "[SL:"
ANNOT_SEP = " : "


def _check_label(label: str, what: str) -> str:
    if not isinstance(label, str) or not _LABEL_RE.match(label):
        raise InvalidLabel(f"invalid {what} label {label!r}")
    return label.lower()


@dataclass(frozen=True)
class SlotSpan:
    name: str
    value: str
    span: Optional[Span] = None

    def __post_init__(self):
        object.__setattr__(self, "name", _check_label(self.name, "slot"))
        v = self.value
        if not isinstance(v, str) or not v:
            raise EmptySlotValue(f"slot {self.name!r} has an empty value")
        if v != v.strip():
            raise InvalidSlotValue(f"slot {self.name!r} value {v!r} has surrounding whitespace")
        if "[" in v or "]" in v:
            raise InvalidSlotValue(f"slot {self.name!r} value {v!r} contains a bracket")
        if self.span is not None:
            start, end = self.span
            if not (isinstance(start, int) and isinstance(end, int)) or start < 0 or end <= start:
                raise SpanOutOfRange(f"slot {self.name!r} has invalid span {self.span!r}")
            object.__setattr__(self, "span", (start, end))

    def without_span(self) -> SlotSpan:
        return self if self.span is None else replace(self, span=None)


@dataclass(frozen=True)
class LogicalForm:
    intent: str
    slots: Tuple[SlotSpan, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "intent", _check_label(self.intent, "intent"))
        slots = tuple(self.slots)
        for s in slots:
            if not isinstance(s, SlotSpan):
                raise TypeError(f"expected SlotSpan, got {type(s).__name__}")
        object.__setattr__(self, "slots", slots)
        if slots and all(s.span is not None for s in slots):
            _check_disjoint(slots)

    @property
    def has_spans(self) -> bool:
        return all(s.span is not None for s in self.slots)

    def without_spans(self) -> LogicalForm:
        return LogicalForm(self.intent, tuple(s.without_span() for s in self.slots))

    def slot_names(self) -> list[str]:
        return [s.name for s in self.slots]

    def __str__(self) -> str:
        return serialize_compact(self)


def _check_disjoint(slots: Iterable[SlotSpan]) -> None:
    ordered = sorted(slots, key=lambda s: s.span)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.span[0] < prev.span[1]:
            raise OverlappingSpans(
                f"slots {prev.name!r}{prev.span} and {cur.name!r}{cur.span} overlap")


# ---------------------------------------------------------------------------
# compact format


def _check_balance(text: str) -> None:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise UnbalancedBrackets(f"unexpected ']' at offset {i}")
    if depth:
        raise UnbalancedBrackets(f"{depth} unclosed '[' in {text!r}")


def _read_label(s: str, pos: int) -> tuple[str, int]:
    end = pos
    while end < len(s) and not s[end].isspace() and s[end] not in "[]":
        end += 1
    return s[pos:end], end


def _skip_ws(s: str, pos: int) -> int:
    while pos < len(s) and s[pos].isspace():
        pos += 1
    return pos


def parse_compact(text: str) -> LogicalForm:
    """Parse a flat compact LF such as ``[IN:X [SL:A v ] ]``.

    Raises a subclass of :class:`~massive_lf.errors.LFError` on any input that
    is not a single flat intent with bracketed slots.
    """
    if not isinstance(text, str):
        raise TypeError(f"expected str, got {type(text).__name__}")
    _check_balance(text)
    s = text.strip()
    if not s.startswith(_INTENT_OPEN):
        raise MissingIntentRoot(f"logical form must start with '[IN:': {text!r}")
    intent, pos = _read_label(s, len(_INTENT_OPEN))
    if not intent:
        raise MissingIntentRoot(f"empty intent label in {text!r}")

    slots = []
    while True:
        pos = _skip_ws(s, pos)
        if pos >= len(s):
            raise UnbalancedBrackets(f"intent is never closed in {text!r}")
        if s[pos] == "]":
            pos += 1
            break
        if s.startswith(_INTENT_OPEN, pos):
            raise NestedIntent(f"nested intent at offset {pos} in {text!r}")
        if not s.startswith(_SLOT_OPEN, pos):
            raise LFSyntaxError(f"unexpected token at offset {pos} in {text!r}")
        name, pos = _read_label(s, pos + len(_SLOT_OPEN))
        if not name:
            raise LFSyntaxError(f"empty slot label at offset {pos} in {text!r}")
        end = pos
        while end < len(s) and s[end] not in "[]":
            end += 1
        if end >= len(s):
            raise UnbalancedBrackets(f"slot {name!r} is never closed in {text!r}")
        if s[end] == "[":
            if s.startswith(_INTENT_OPEN, end):
                raise NestedIntent(f"nested intent inside slot {name!r} in {text!r}")
            raise LFSyntaxError(f"'[' inside value of slot {name!r} in {text!r}")
        value = s[pos:end].strip()
        if not value:
            raise EmptySlotValue(f"slot {name!r} has no value in {text!r}")
        slots.append(SlotSpan(name, value))
        pos = end + 1

    rest = s[pos:]
    if rest:
        if _INTENT_OPEN in rest:
            raise NestedIntent(f"second intent after the root in {text!r}")
        raise LFSyntaxError(f"trailing content after the root: {rest!r}")
    return LogicalForm(intent, tuple(slots))


def serialize_compact(lf: LogicalForm) -> str:
    parts = [f"[IN:{lf.intent.upper()}"]
    for slot in lf.slots:
        parts.append(f"[SL:{slot.name.upper()} {slot.value} ]")
    parts.append("]")
    return " ".join(parts)


def canonical_form(text: str) -> str:
    return serialize_compact(parse_compact(text))


# ---------------------------------------------------------------------------
# inline annotation


def parse_annot(annot_utt: str, intent: str) -> tuple[str, LogicalForm]:
    """Strip ``[name : value]`` wrappers, returning the utterance and its LF."""
    out: list[str] = []
    length = 0
    slots = []
    i = 0
    n = len(annot_utt)
    while i < n:
        ch = annot_utt[i]
        if ch == "]":
            raise MalformedAnnotation(f"unmatched ']' at offset {i} in {annot_utt!r}")
        if ch != "[":
            out.append(ch)
            length += 1
            i += 1
            continue
        close = annot_utt.find("]", i + 1)
        reopen = annot_utt.find("[", i + 1)
        if close == -1 or (reopen != -1 and reopen < close):
            raise MalformedAnnotation(f"unclosed '[' at offset {i} in {annot_utt!r}")
        inner = annot_utt[i + 1:close]
        sep = inner.find(ANNOT_SEP)
        if sep == -1:
            raise MalformedAnnotation(f"missing ' : ' separator in [{inner}]")
        name = inner[:sep].strip()
        value = inner[sep + len(ANNOT_SEP):].strip()
        if not name:
            raise MalformedAnnotation(f"missing slot name in [{inner}]")
        if not value:
            raise EmptySlotValue(f"slot {name!r} has no value in {annot_utt!r}")
        slots.append(SlotSpan(name, value, (length, length + len(value))))
        out.append(value)
        length += len(value)
        i = close + 1
    return "".join(out), LogicalForm(intent, tuple(slots))


def serialize_annot(lf: LogicalForm, utterance: str) -> str:
    """Inverse of :func:`parse_annot`; every slot must carry a matching span."""
    if "[" in utterance or "]" in utterance:
        raise MalformedAnnotation(f"utterance contains a bracket: {utterance!r}")
    for slot in lf.slots:
        if slot.span is None:
            raise SpanOutOfRange(f"slot {slot.name!r} has no span")
        start, end = slot.span
        if end > len(utterance):
            raise SpanOutOfRange(
                f"slot {slot.name!r} span {slot.span} exceeds utterance length {len(utterance)}")
        if utterance[start:end] != slot.value:
            raise SpanOutOfRange(
                f"slot {slot.name!r} span {slot.span} covers {utterance[start:end]!r},"
                f" not {slot.value!r}")
    ordered = sorted(lf.slots, key=lambda s: s.span)
    _check_disjoint(ordered)

    parts = []
    pos = 0
    for slot in ordered:
        start, end = slot.span
        parts.append(utterance[pos:start])
        parts.append(f"[{slot.name}{ANNOT_SEP}{slot.value}]")
        pos = end
    parts.append(utterance[pos:])
    return "".join(parts)
