"""On-disk formats: MASSIVE JSONL, predictions, translations and reports.

All files are UTF-8 with LF newlines. Writers go through :func:`atomic_write`
so an interrupted run never leaves a partial output behind.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from .errors import DuplicateKey, DuplicatePrediction, LFError, InvariantViolation, MalformedJsonLine
from .lf_model import LogicalForm, parse_annot
from .locales import KNOWN_LOCALES

logger = logging.getLogger(__name__)

PARTITIONS = ("train", "dev", "test")
SLOT_METHODS = ("translation", "localization", "unchanged")


@dataclass(frozen=True)
class DatasetExample:
    id: str
    locale: str
    partition: str
    intent: str
    utt: str
    annot_utt: str
    slot_methods: tuple[tuple[str, str], ...] = ()
    scenario: Optional[str] = None

    def parse(self) -> tuple[str, LogicalForm]:
        return parse_annot(self.annot_utt, self.intent)

    @property
    def key(self) -> tuple[str, str]:
        return (self.id, self.locale)

    @property
    def is_localized(self) -> bool:
        return any(method == "localization" for _, method in self.slot_methods)

    def to_json_dict(self) -> dict:
        record = {
            "id": self.id,
            "locale": self.locale,
            "partition": self.partition,
            "scenario": self.scenario,
            "intent": self.intent,
            "utt": self.utt,
            "annot_utt": self.annot_utt,
            "slot_method": [{"slot": s, "method": m} for s, m in self.slot_methods],
        }
        if self.scenario is None:
            del record["scenario"]
        return record


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    locale: str
    lf: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.id, self.locale)


@dataclass(frozen=True)
class TranslationRecord:
    id: str
    source_locale: str
    target_locale: str
    text: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.id, self.target_locale)


@dataclass(frozen=True)
class FillerRecord:
    id: str
    target_locale: str
    lf: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.id, self.target_locale)


# ---------------------------------------------------------------------------
# reading


def iter_jsonl(path: str | os.PathLike) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, object)`` for every non-blank line."""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedJsonLine(path, lineno, f"invalid JSON: {e.msg}") from e
            if not isinstance(obj, dict):
                raise MalformedJsonLine(path, lineno, "expected a JSON object")
            yield lineno, obj


def _field(obj: dict, name: str, path, lineno: int, types=str):
    if name not in obj:
        raise MalformedJsonLine(path, lineno, f"missing field {name!r}")
    value = obj[name]
    if types is str and isinstance(value, int) and not isinstance(value, bool):
        value = str(value)  # MASSIVE ids are sometimes numeric
    if not isinstance(value, types):
        raise MalformedJsonLine(path, lineno, f"field {name!r} has type {type(value).__name__}")
    return value


def _slot_methods(obj: dict, path, lineno: int) -> tuple[tuple[str, str], ...]:
    raw = obj.get("slot_method")
    if raw is None:
        logger.warning("%s:%d: record has no slot_method; treating as translated-only",
                       path, lineno)
        return ()
    if isinstance(raw, Mapping):
        # some dumps store the parallel-list form {"slot": [...], "method": [...]}
        slots, methods = raw.get("slot", []), raw.get("method", [])
        if len(slots) != len(methods):
            raise MalformedJsonLine(path, lineno, "slot_method lists differ in length")
        raw = [{"slot": s, "method": m} for s, m in zip(slots, methods)]
    if not isinstance(raw, list):
        raise MalformedJsonLine(path, lineno, "slot_method must be a list")
    out = []
    for item in raw:
        if not isinstance(item, Mapping) or "slot" not in item or "method" not in item:
            raise MalformedJsonLine(path, lineno, f"bad slot_method entry {item!r}")
        if item["method"] not in SLOT_METHODS:
            raise InvariantViolation(path, lineno, f"unknown slot method {item['method']!r}")
        out.append((str(item["slot"]).lower(), item["method"]))
    return tuple(out)


def example_from_json(obj: dict, path="<memory>", lineno: int = 0) -> DatasetExample:
    example = DatasetExample(
        id=_field(obj, "id", path, lineno),
        locale=_field(obj, "locale", path, lineno),
        partition=_field(obj, "partition", path, lineno),
        intent=_field(obj, "intent", path, lineno),
        utt=_field(obj, "utt", path, lineno),
        annot_utt=_field(obj, "annot_utt", path, lineno),
        slot_methods=_slot_methods(obj, path, lineno),
        scenario=obj.get("scenario"),
    )
    if example.partition not in PARTITIONS:
        raise InvariantViolation(path, lineno, f"unknown partition {example.partition!r}")
    try:
        utt, lf = example.parse()
    except LFError as e:
        raise InvariantViolation(path, lineno, f"annot_utt does not parse: {e}") from e
    if utt != example.utt:
        raise InvariantViolation(
            path, lineno, f"annot_utt yields {utt!r} but utt is {example.utt!r}")
    names = set(lf.slot_names())
    extra = [s for s, _ in example.slot_methods if s not in names]
    if extra:
        raise InvariantViolation(path, lineno, f"slot_method names {extra} not in annot_utt")
    return example


def load_massive(path: str | os.PathLike) -> Iterator[DatasetExample]:
    """Stream validated MASSIVE examples in file order."""
    warned: set[str] = set()
    for lineno, obj in iter_jsonl(path):
        example = example_from_json(obj, path, lineno)
        if example.locale not in KNOWN_LOCALES and example.locale not in warned:
            warned.add(example.locale)
            logger.warning("%s:%d: unknown locale %r", path, lineno, example.locale)
        yield example


def load_predictions(path: str | os.PathLike) -> Iterator[PredictionRecord]:
    seen: set[tuple[str, str]] = set()
    for lineno, obj in iter_jsonl(path):
        record = PredictionRecord(
            id=_field(obj, "id", path, lineno),
            locale=_field(obj, "locale", path, lineno),
            lf=_field(obj, "lf", path, lineno),
        )
        if record.key in seen:
            raise DuplicatePrediction(f"{path}:{lineno}: duplicate prediction key", [record.key])
        seen.add(record.key)
        yield record


def load_translations(path: str | os.PathLike) -> dict[tuple[str, str], TranslationRecord]:
    """Read released-translation JSONL keyed by ``(id, target_locale)``."""
    out: dict[tuple[str, str], TranslationRecord] = {}
    for lineno, obj in iter_jsonl(path):
        record = TranslationRecord(
            id=_field(obj, "id", path, lineno),
            source_locale=_field(obj, "source_locale", path, lineno),
            target_locale=_field(obj, "target_locale", path, lineno),
            text=_field(obj, "text", path, lineno),
        )
        if record.key in out:
            raise DuplicateKey(f"{path}:{lineno}: duplicate translation key", [record.key])
        out[record.key] = record
    return out


def load_filler_outputs(path: str | os.PathLike) -> dict[tuple[str, str], FillerRecord]:
    out: dict[tuple[str, str], FillerRecord] = {}
    for lineno, obj in iter_jsonl(path):
        record = FillerRecord(
            id=_field(obj, "id", path, lineno),
            target_locale=_field(obj, "target_locale", path, lineno),
            lf=_field(obj, "lf", path, lineno),
        )
        if record.key in out:
            raise DuplicateKey(f"{path}:{lineno}: duplicate filler key", [record.key])
        out[record.key] = record
    return out


# ---------------------------------------------------------------------------
# writing


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory + rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def dumps_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def write_jsonl(path: str | os.PathLike, records: Iterable[dict]) -> None:
    atomic_write(path, dumps_jsonl(records))


REPORT_FORMATS = ("json", "tsv", "text")


def render_report(report, fmt: str) -> str:
    """Render any report object exposing ``to_json_dict``/``to_tsv``/``to_text``."""
    if fmt == "json":
        return json.dumps(report.to_json_dict(), ensure_ascii=False, indent=2) + "\n"
    if fmt == "tsv":
        return report.to_tsv()
    if fmt == "text":
        return report.to_text()
    raise ValueError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")


def write_report(report, path: str | os.PathLike, fmt: str = "json") -> None:
    atomic_write(path, render_report(report, fmt))
