"""Verbatim agreement between machine translations and gold translations."""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .dataset_io import DatasetExample, TranslationRecord
from .locales import INDIC_LOCALES
from .metrics import split_by_localization

logger = logging.getLogger(__name__)

NORMALIZATION_FORMS = ("NFC", "NFD", "NFKC", "NFKD")
SOURCE_LOCALE = "en_US"


def _drop(ch: str) -> bool:
    return ch.isspace() or unicodedata.category(ch).startswith("P")


def normalize_for_match(text: str, form: str = "NFKC") -> str:
    """Unicode-normalize, then delete whitespace and punctuation.

    Deleting characters can leave combining marks next to a new base
    character, so normalization is repeated until the text is stable.
    """
    if form not in NORMALIZATION_FORMS:
        raise ValueError(f"unknown normalization form {form!r}")
    while True:
        out = "".join(ch for ch in unicodedata.normalize(form, text) if not _drop(ch))
        if out == text:
            return out
        text = out


@dataclass
class LocaleMatch:
    matches: int = 0
    candidates: int = 0
    missing: int = 0

    @property
    def match_pct(self) -> Optional[float]:
        return 100.0 * self.matches / self.candidates if self.candidates else None


def _mean(values: list[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


@dataclass
class MatchReport:
    per_locale: dict[str, LocaleMatch] = field(default_factory=dict)
    indic_locales: frozenset[str] = frozenset(INDIC_LOCALES)
    missing_keys: list[tuple[str, str]] = field(default_factory=list)

    @classmethod
    def from_counts(cls, counts: Mapping[str, tuple[int, int]],
                    indic_locales: Iterable[str] = INDIC_LOCALES) -> MatchReport:
        per_locale = {}
        for loc, (matches, candidates) in counts.items():
            if not 0 <= matches <= candidates:
                raise ValueError(f"{loc}: {matches} matches of {candidates} candidates")
            per_locale[loc] = LocaleMatch(matches, candidates)
        return cls(per_locale, frozenset(indic_locales))

    def _pcts(self, keep) -> list[float]:
        return [m.match_pct for loc, m in self.per_locale.items()
                if keep(loc) and m.match_pct is not None]

    @property
    def aggregates(self) -> dict[str, Optional[float]]:
        """Unweighted means of per-locale percentages."""
        return {
            "all": _mean(self._pcts(lambda loc: True)),
            "non_indic": _mean(self._pcts(lambda loc: loc not in self.indic_locales)),
            "indic": _mean(self._pcts(lambda loc: loc in self.indic_locales)),
        }

    def ordered_locales(self) -> list[str]:
        """Highest match percentage first, matching the reference layout."""
        return sorted(self.per_locale,
                      key=lambda loc: (-(self.per_locale[loc].match_pct or 0.0), loc))

    def to_json_dict(self) -> dict:
        return {
            "per_locale": {
                loc: {"match_pct": m.match_pct, "matches": m.matches,
                      "candidates": m.candidates, "missing": m.missing}
                for loc, m in sorted(self.per_locale.items())
            },
            "aggregates": self.aggregates,
            "indic_locales": sorted(self.indic_locales),
        }

    def to_tsv(self) -> str:
        lines = ["locale\tmatch_pct\tmatches\tcandidates"]
        for loc in self.ordered_locales():
            m = self.per_locale[loc]
            lines.append(f"{loc}\t{_fmt(m.match_pct)}\t{m.matches}\t{m.candidates}")
        agg = self.aggregates
        lines.append(f"ALL\t{_fmt(agg['all'])}\t\t")
        lines.append(f"NON_INDIC\t{_fmt(agg['non_indic'])}\t\t")
        lines.append(f"INDIC\t{_fmt(agg['indic'])}\t\t")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        rows = [f"{'Locale':<10} {'Match%':>7} {'#':>7} {'Cand.':>7}"]
        for loc in self.ordered_locales():
            m = self.per_locale[loc]
            rows.append(f"{loc:<10} {_fmt(m.match_pct):>7} {m.matches:>7} {m.candidates:>7}")
        for name, value in self.aggregates.items():
            rows.append(f"{name:<10} {_fmt(value):>7}")
        return "\n".join(rows) + "\n"


def _fmt(x: Optional[float]) -> str:
    return "-" if x is None else f"{x:.1f}"


def match_report(nmt, gold: Iterable[DatasetExample],
                 indic_locales: Iterable[str] = INDIC_LOCALES,
                 form: str = "NFKC", partition: Optional[str] = "train") -> MatchReport:
    """Count verbatim NMT/gold matches over translated-only gold examples.

    ``nmt`` maps ``(id, locale)`` to a text or :class:`TranslationRecord`, or is
    an iterable of translation records. Missing translations count as
    non-matches and are listed in ``missing_keys``. The source locale
    (en_US) is skipped.
    """
    if not isinstance(nmt, Mapping):
        nmt = {r.key: r for r in nmt}
    examples = [ex for ex in gold
                if ex.locale != SOURCE_LOCALE and (partition is None or ex.partition == partition)]
    _, candidates = split_by_localization(examples)

    report = MatchReport(indic_locales=frozenset(indic_locales))
    for ex in sorted(candidates, key=lambda e: e.key):
        counts = report.per_locale.setdefault(ex.locale, LocaleMatch())
        counts.candidates += 1
        hyp = nmt.get(ex.key)
        if hyp is None:
            counts.missing += 1
            report.missing_keys.append(ex.key)
            continue
        if isinstance(hyp, TranslationRecord):
            hyp = hyp.text
        if normalize_for_match(hyp, form) == normalize_for_match(ex.utt, form):
            counts.matches += 1
    if report.missing_keys:
        logger.warning("%d gold examples have no NMT translation", len(report.missing_keys))
    if "pt_PT" in report.per_locale:
        logger.warning("pt_PT is compared as-is; NMT output for it may be Brazilian Portuguese")
    return report
