"""Conversion between MASSIVE records and compact training targets."""

from __future__ import annotations

from .dataset_io import DatasetExample
from .errors import LFError, SlotValueNotFound, UnparseablePrediction
from .lf_model import LogicalForm, SlotSpan, parse_compact, serialize_annot, serialize_compact


def to_compact(example: DatasetExample) -> str:
    try:
        _, lf = example.parse()
    except LFError as e:
        raise type(e)(f"example {example.id} ({example.locale}): {e}") from e
    return serialize_compact(lf)


def locate_slots(lf: LogicalForm, utterance: str) -> LogicalForm:
    """Attach spans by leftmost match at or after the previous slot's end.

    Matching is exact (case and diacritics included). Raises
    :class:`SlotValueNotFound` when a value has no qualifying occurrence.
    """
    pos = 0
    slots = []
    for slot in lf.slots:
        start = utterance.find(slot.value, pos)
        if start == -1:
            raise SlotValueNotFound(slot.name, slot.value, utterance)
        end = start + len(slot.value)
        slots.append(SlotSpan(slot.name, slot.value, (start, end)))
        pos = end
    return LogicalForm(lf.intent, tuple(slots))


def from_compact(prediction: str, utterance: str) -> str:
    """Turn a raw compact prediction back into a MASSIVE ``annot_utt``."""
    try:
        lf = parse_compact(prediction)
    except LFError as e:
        err = UnparseablePrediction(f"cannot parse prediction {prediction!r}: {e}")
        err.cause = e
        raise err from e
    return serialize_annot(locate_slots(lf, utterance), utterance)
