"""Translate-and-Fill post-processing.

A filler model, run outside this package, reads a translated utterance plus the
source LF's *signature* (the compact LF without slot values) and writes a full
LF for the translation. Its raw output is cleaned up here:

1. :func:`reorder_slots` puts slots in the order they occur in the translation;
2. :func:`snap_boundaries` widens spans that stop inside a word so they cover
   whole whitespace-delimited tokens (only for whitespace-tokenized locales).

:func:`project_corpus` joins translation and filler files into synthetic
training examples, routing every unusable pair to a rejection report.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .dataset_io import DatasetExample, FillerRecord, TranslationRecord
from .errors import DuplicateKey, LFError, LFSyntaxError, UnparseablePrediction
from .lf_model import (
    LogicalForm,
    SlotSpan,
    Span,
    _check_balance,
    _check_label,
    parse_compact,
    serialize_annot,
    serialize_compact,
)
from .locales import LanguageConfig, config_for


@dataclass(frozen=True)
class Signature:
    intent: str
    slot_names: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        parts = [f"[IN:{self.intent.upper()}"]
        parts.extend(f"[SL:{name.upper()} ]" for name in self.slot_names)
        parts.append("]")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.text

    @classmethod
    def from_text(cls, text: str) -> Signature:
        _check_balance(text)
        m = re.fullmatch(r"\s*\[IN:([^\s\[\]]+)((?:\s+\[SL:[^\s\[\]]+\s*\])*)\s*\]\s*", text)
        if not m:
            raise LFSyntaxError(f"not a logical-form signature: {text!r}")
        names = re.findall(r"\[SL:([^\s\[\]]+)", m.group(2))
        return cls(_check_label(m.group(1), "intent"),
                   tuple(_check_label(n, "slot") for n in names))


def make_signature(lf: LogicalForm | Signature) -> Signature:
    if isinstance(lf, Signature):
        return lf
    return Signature(lf.intent, tuple(lf.slot_names()))


# ---------------------------------------------------------------------------
# canonicalization


def token_extent(utterance: str, span: Span) -> Span:
    """Smallest run of whole whitespace-delimited tokens covering ``span``."""
    start, end = span
    while start > 0 and not utterance[start - 1].isspace():
        start -= 1
    while end < len(utterance) and not utterance[end].isspace():
        end += 1
    return start, end


def _overlaps(a: Span, taken: list[Span]) -> bool:
    return any(a[0] < b[1] and b[0] < a[1] for b in taken)


def reorder_slots(lf: LogicalForm, utterance: str,
                  cfg: Optional[LanguageConfig] = None) -> tuple[LogicalForm, list[str]]:
    """Sort slots by where their values occur in ``utterance``.

    Slots are claimed in LF order. A slot that already carries a span matching
    the utterance keeps it; otherwise its value is placed at the leftmost
    occurrence not overlapping an earlier claim. With a whitespace-tokenized
    ``cfg`` the claims are measured on token extents, so a later snap can never
    make two slots collide.

    Unplaced slots follow the placed ones, span-less, in their original order;
    their names are returned as the second element.
    """
    widen = cfg is not None and cfg.whitespace_tokenized
    taken: list[Span] = []
    placed: list[tuple[int, int, SlotSpan]] = []
    unmatched: list[SlotSpan] = []

    def claim(span: Span) -> bool:
        extent = token_extent(utterance, span) if widen else span
        if _overlaps(extent, taken):
            return False
        taken.append(extent)
        return True

    for idx, slot in enumerate(lf.slots):
        span = None
        if slot.span is not None and utterance[slot.span[0]:slot.span[1]] == slot.value:
            if claim(slot.span):
                span = slot.span
        if span is None:
            pos = utterance.find(slot.value)
            while pos != -1:
                candidate = (pos, pos + len(slot.value))
                if claim(candidate):
                    span = candidate
                    break
                pos = utterance.find(slot.value, pos + 1)
        if span is None:
            unmatched.append(slot.without_span())
        else:
            placed.append((span[0], idx, SlotSpan(slot.name, slot.value, span)))

    placed.sort(key=lambda t: (t[0], t[1]))
    slots = tuple(s for _, _, s in placed) + tuple(unmatched)
    return LogicalForm(lf.intent, slots), [s.name for s in unmatched]


def snap_boundaries(lf: LogicalForm, utterance: str, cfg: LanguageConfig) -> LogicalForm:
    """Extend spans to whole tokens for whitespace-tokenized languages.

    Span-less slots pass through. If widening makes a slot run into the one
    before it, its start is clamped to that slot's end (then past whitespace);
    a slot left empty loses its span and moves to the end of the slot list.
    """
    if not cfg.whitespace_tokenized:
        return lf
    spanned = sorted((s for s in lf.slots if s.span is not None), key=lambda s: s.span)
    spanless = [s for s in lf.slots if s.span is None]

    out: list[SlotSpan] = []
    collapsed: list[SlotSpan] = []
    prev_end = 0
    for slot in spanned:
        start, end = token_extent(utterance, slot.span)
        if start < prev_end:
            start = prev_end
            while start < end and utterance[start].isspace():
                start += 1
        if start >= end:
            collapsed.append(slot.without_span())
            continue
        out.append(SlotSpan(slot.name, utterance[start:end], (start, end)))
        prev_end = end
    return LogicalForm(lf.intent, tuple(out) + tuple(spanless) + tuple(collapsed))


def canonicalize(lf: LogicalForm, utterance: str,
                 cfg: LanguageConfig) -> tuple[LogicalForm, list[str]]:
    reordered, _ = reorder_slots(lf, utterance, cfg)
    snapped = snap_boundaries(reordered, utterance, cfg)
    return snapped, [s.name for s in snapped.slots if s.span is None]


# ---------------------------------------------------------------------------
# corpus assembly


@dataclass(frozen=True)
class Rejection:
    id: str
    target_locale: str
    reason: str

    def to_json_dict(self) -> dict:
        return {"id": self.id, "target_locale": self.target_locale, "reason": self.reason}


@dataclass
class ProjectionResult:
    examples: list[DatasetExample]
    rejections: list[Rejection]

    def example_records(self) -> list[dict]:
        records = []
        for ex in self.examples:
            record = ex.to_json_dict()
            record["lf"] = serialize_compact(ex.parse()[1])
            records.append(record)
        return records


def project_pair(translation: TranslationRecord, filler: FillerRecord,
                 cfg: LanguageConfig) -> DatasetExample:
    """Build one synthetic example; raises LFError describing why it cannot."""
    try:
        lf = parse_compact(filler.lf)
    except LFError as e:
        raise UnparseablePrediction(f"{type(e).__name__}: {e}") from e
    canon, unmatched = canonicalize(lf, translation.text, cfg)
    if unmatched:
        raise _Unmatched(unmatched)
    annot = serialize_annot(canon, translation.text)
    return DatasetExample(
        id=translation.id,
        locale=translation.target_locale,
        partition="train",
        intent=canon.intent,
        utt=translation.text,
        annot_utt=annot,
        slot_methods=tuple((s.name, "translation") for s in canon.slots),
    )


class _Unmatched(LFError):
    def __init__(self, names: Sequence[str]):
        self.names = list(names)
        super().__init__("slot values not found in translation: " + ", ".join(self.names))


def _check_unique(records, what: str) -> dict:
    if isinstance(records, Mapping):
        return dict(records)
    out = {}
    dupes = []
    for r in records:
        if r.key in out:
            dupes.append(r.key)
        out[r.key] = r
    if dupes:
        raise DuplicateKey(f"duplicate {what} keys", dupes)
    return out


def project_corpus(translations, filler_outputs,
                   configs: Mapping[str, LanguageConfig]) -> ProjectionResult:
    """Join translations with filler outputs on ``(id, target_locale)``.

    Both inputs may be mappings keyed that way or iterables of records.
    Duplicated keys are fatal; everything else unusable becomes a rejection.
    Output is sorted by ``(id, locale)``.
    """
    translations = _check_unique(translations, "translation")
    filler_outputs = _check_unique(filler_outputs, "filler output")
    for key in sorted(translations.keys() | filler_outputs.keys()):
        config_for(configs, key[1])

    examples = []
    rejections = []
    for key in sorted(translations.keys() | filler_outputs.keys()):
        id_, locale = key
        translation = translations.get(key)
        filler = filler_outputs.get(key)
        if translation is None:
            rejections.append(Rejection(id_, locale, "MissingJoinKey: no translation"))
            continue
        if filler is None:
            rejections.append(Rejection(id_, locale, "MissingJoinKey: no filler output"))
            continue
        try:
            examples.append(project_pair(translation, filler, configs[locale]))
        except _Unmatched as e:
            rejections.append(Rejection(id_, locale, f"UnmatchedSlots: {', '.join(e.names)}"))
        except LFError as e:
            rejections.append(Rejection(id_, locale, f"{type(e).__name__}: {e}"))
    return ProjectionResult(examples, rejections)
