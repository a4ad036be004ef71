"""Intent Accuracy and Exact Match over prediction files.

EM compares canonical compact serializations, so incidental spacing in model
output does not matter but slot order and values do. IA only needs the first
``IN:`` label, even from output whose brackets are broken.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .converter import to_compact
from .dataset_io import DatasetExample, PredictionRecord
from .errors import DuplicateKey, DuplicatePrediction, LFError, MissingPrediction, UnknownPredictionId
from .lf_model import parse_compact, serialize_compact

_INTENT_TOKEN = re.compile(r"IN:([^\s\[\]]+)")


def exact_match(prediction: str, gold: str) -> bool:
    try:
        return serialize_compact(parse_compact(prediction)) == gold
    except LFError:
        return False


def extract_intent(prediction: str) -> Optional[str]:
    m = _INTENT_TOKEN.search(prediction)
    return m.group(1).lower() if m else None


def intent_match(prediction: str, gold_intent: str) -> bool:
    found = extract_intent(prediction)
    return found is not None and found == gold_intent.lower()


def split_by_localization(gold: Iterable[DatasetExample]
                          ) -> tuple[list[DatasetExample], list[DatasetExample]]:
    localized, translated_only = [], []
    for ex in gold:
        (localized if ex.is_localized else translated_only).append(ex)
    return localized, translated_only


# ---------------------------------------------------------------------------
# report


def _frac(hits: int, n: int) -> Optional[float]:
    return hits / n if n else None


@dataclass
class Score:
    n: int = 0
    ia_hits: int = 0
    em_hits: int = 0

    @property
    def ia(self) -> Optional[float]:
        return _frac(self.ia_hits, self.n)

    @property
    def em(self) -> Optional[float]:
        return _frac(self.em_hits, self.n)

    def add(self, ia: bool, em: bool) -> None:
        self.n += 1
        self.ia_hits += ia
        self.em_hits += em

    def to_json_dict(self) -> dict:
        return {"ia": self.ia, "em": self.em, "n": self.n,
                "ia_hits": self.ia_hits, "em_hits": self.em_hits}

    @classmethod
    def from_json_dict(cls, d: dict) -> Score:
        return cls(n=d["n"], ia_hits=d["ia_hits"], em_hits=d["em_hits"])


@dataclass
class IntentScore:
    support: int = 0
    ia_hits: int = 0

    @property
    def ia(self) -> Optional[float]:
        return _frac(self.ia_hits, self.support)

    def to_json_dict(self) -> dict:
        return {"ia": self.ia, "support": self.support, "ia_hits": self.ia_hits}

    @classmethod
    def from_json_dict(cls, d: dict) -> IntentScore:
        return cls(support=d["support"], ia_hits=d["ia_hits"])


@dataclass
class SplitScore:
    n_localized: int = 0
    em_hits_localized: int = 0
    n_translated_only: int = 0
    em_hits_translated_only: int = 0

    @property
    def em_localized(self) -> Optional[float]:
        return _frac(self.em_hits_localized, self.n_localized)

    @property
    def em_translated_only(self) -> Optional[float]:
        return _frac(self.em_hits_translated_only, self.n_translated_only)

    def to_json_dict(self) -> dict:
        return {
            "em_localized": self.em_localized,
            "n_localized": self.n_localized,
            "em_hits_localized": self.em_hits_localized,
            "em_translated_only": self.em_translated_only,
            "n_translated_only": self.n_translated_only,
            "em_hits_translated_only": self.em_hits_translated_only,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> SplitScore:
        return cls(d["n_localized"], d["em_hits_localized"],
                   d["n_translated_only"], d["em_hits_translated_only"])


@dataclass
class EvalReport:
    """Aggregates are kept as integer counts; fractions are derived.

    Fractions over an empty subset are ``None``.
    """

    per_locale: dict[str, Score] = field(default_factory=dict)
    overall: Score = field(default_factory=Score)
    per_intent: dict[str, IntentScore] = field(default_factory=dict)
    split: SplitScore = field(default_factory=SplitScore)

    def intents_by_accuracy(self) -> list[tuple[str, IntentScore]]:
        """Per-intent rows, lowest IA first (ties by intent name)."""
        return sorted(self.per_intent.items(), key=lambda kv: (kv[1].ia, kv[0]))

    def to_json_dict(self) -> dict:
        return {
            "overall": self.overall.to_json_dict(),
            "per_locale": {k: v.to_json_dict() for k, v in sorted(self.per_locale.items())},
            "per_intent": {k: v.to_json_dict() for k, v in sorted(self.per_intent.items())},
            "split": self.split.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> EvalReport:
        return cls(
            per_locale={k: Score.from_json_dict(v) for k, v in d["per_locale"].items()},
            overall=Score.from_json_dict(d["overall"]),
            per_intent={k: IntentScore.from_json_dict(v)
                        for k, v in d.get("per_intent", {}).items()},
            split=SplitScore.from_json_dict(d["split"]) if "split" in d else SplitScore(),
        )

    def to_tsv(self) -> str:
        lines = ["locale\tia\tem\tn"]
        for locale, s in sorted(self.per_locale.items()):
            lines.append(f"{locale}\t{_pct(s.ia)}\t{_pct(s.em)}\t{s.n}")
        o = self.overall
        lines.append(f"ALL\t{_pct(o.ia)}\t{_pct(o.em)}\t{o.n}")
        return "\n".join(lines) + "\n"

    def to_text(self, per_intent: bool = True, split: bool = True) -> str:
        rows = [("Locale", "IA", "EM", "N")]
        rows += [(loc, _pct(s.ia), _pct(s.em), str(s.n))
                 for loc, s in sorted(self.per_locale.items())]
        rows.append(("ALL", _pct(self.overall.ia), _pct(self.overall.em), str(self.overall.n)))
        out = [_table(rows)]
        if per_intent and self.per_intent:
            rows = [("Intent", "IA", "Support")]
            rows += [(name.upper(), _pct(s.ia), str(s.support))
                     for name, s in self.intents_by_accuracy()]
            out.append(_table(rows))
        if split:
            sp = self.split
            rows = [("Subset", "EM", "N"),
                    ("localized", _pct(sp.em_localized), str(sp.n_localized)),
                    ("translated_only", _pct(sp.em_translated_only), str(sp.n_translated_only))]
            out.append(_table(rows))
        return "\n".join(out)


def _pct(x: Optional[float]) -> str:
    return "-" if x is None else f"{100 * x:.2f}"


def _table(rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def load_eval_report(path) -> EvalReport:
    return EvalReport.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# evaluation


def evaluate(predictions: Iterable[PredictionRecord], gold: Iterable[DatasetExample],
             partition: Optional[str] = None) -> EvalReport:
    """Score predictions against gold examples keyed by ``(id, locale)``.

    Only gold examples in ``partition`` (all, if ``None``) take part. Every such
    example needs exactly one prediction and every prediction must name one.
    """
    gold_by_key: dict[tuple[str, str], DatasetExample] = {}
    dupes = []
    for ex in gold:
        if partition is not None and ex.partition != partition:
            continue
        if ex.key in gold_by_key:
            dupes.append(ex.key)
        gold_by_key[ex.key] = ex
    if dupes:
        raise DuplicateKey("duplicate gold examples", dupes)

    pred_by_key: dict[tuple[str, str], str] = {}
    dupes, unknown = [], []
    for p in predictions:
        if p.key in pred_by_key:
            dupes.append(p.key)
        elif p.key not in gold_by_key:
            unknown.append(p.key)
        pred_by_key[p.key] = p.lf
    if dupes:
        raise DuplicatePrediction("duplicate predictions", sorted(dupes))
    if unknown:
        raise UnknownPredictionId("predictions for unknown examples", sorted(unknown))
    missing = sorted(gold_by_key.keys() - pred_by_key.keys())
    if missing:
        raise MissingPrediction("gold examples without a prediction", missing)

    report = EvalReport()
    for key in sorted(gold_by_key):
        ex = gold_by_key[key]
        pred = pred_by_key[key]
        em = exact_match(pred, to_compact(ex))
        ia = intent_match(pred, ex.intent)
        report.per_locale.setdefault(ex.locale, Score()).add(ia, em)
        report.overall.add(ia, em)
        intent = report.per_intent.setdefault(ex.intent.lower(), IntentScore())
        intent.support += 1
        intent.ia_hits += ia
        if ex.is_localized:
            report.split.n_localized += 1
            report.split.em_hits_localized += em
        else:
            report.split.n_translated_only += 1
            report.split.em_hits_translated_only += em
    return report
