"""Donor x receiver exact-match matrices and language rankings.

Rows are the fine-tuning (donor) language, columns the evaluation (receiver)
language. Sums use :func:`math.fsum`, which is exactly rounded, so rankings do
not depend on input order and ``receiver_scores(m) == donor_scores(m.T)``
holds bit for bit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InconsistentLanguageSets, LFError
from .metrics import EvalReport


@dataclass(frozen=True)
class TransferMatrix:
    languages: tuple[str, ...]
    cells: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        langs = tuple(self.languages)
        cells = tuple(tuple(float(x) for x in row) for row in self.cells)
        if len(set(langs)) != len(langs):
            raise LFError("duplicate language in transfer matrix")
        if len(cells) != len(langs) or any(len(r) != len(langs) for r in cells):
            raise LFError(f"transfer matrix must be {len(langs)}x{len(langs)}")
        for row in cells:
            for x in row:
                if not 0.0 <= x <= 1.0:
                    raise LFError(f"EM value {x!r} outside [0, 1]")
        object.__setattr__(self, "languages", langs)
        object.__setattr__(self, "cells", cells)

    def cell(self, donor: str, receiver: str) -> float:
        return self.cells[self.languages.index(donor)][self.languages.index(receiver)]

    @property
    def T(self) -> TransferMatrix:
        return transpose(self)


def transpose(m: TransferMatrix) -> TransferMatrix:
    return TransferMatrix(m.languages, tuple(zip(*m.cells)))


def build_matrix(reports: Mapping[str, EvalReport]) -> TransferMatrix:
    """``cell(d, r) = reports[d].per_locale[r].em``; languages sorted by code."""
    languages = sorted(reports)
    expected = set(languages)
    bad = set()
    for donor, report in reports.items():
        bad |= expected ^ set(report.per_locale)
    if bad:
        raise InconsistentLanguageSets("reports do not cover the donor language set",
                                       sorted(bad))
    cells = []
    for donor in languages:
        per_locale = reports[donor].per_locale
        cells.append(tuple(per_locale[r].em for r in languages))
    return TransferMatrix(tuple(languages), tuple(cells))


def _rank(languages: Sequence[str], rows, exclude_self: bool) -> list[tuple[str, float]]:
    scores = []
    for i, (lang, row) in enumerate(zip(languages, rows)):
        values = [x for j, x in enumerate(row) if not (exclude_self and i == j)]
        scores.append((lang, math.fsum(values)))
    return sorted(scores, key=lambda t: (-t[1], t[0]))


def donor_scores(m: TransferMatrix, exclude_self: bool = False) -> list[tuple[str, float]]:
    """Row sums, best donor first; ties broken by locale code."""
    return _rank(m.languages, m.cells, exclude_self)


def receiver_scores(m: TransferMatrix, exclude_self: bool = False) -> list[tuple[str, float]]:
    """Column sums, best receiver first; ties broken by locale code."""
    return _rank(m.languages, zip(*m.cells), exclude_self)


# ---------------------------------------------------------------------------
# export


def render_heatmap_data(m: TransferMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["donor\\receiver", *m.languages])
    for lang, row in zip(m.languages, m.cells):
        writer.writerow([lang, *(repr(x) for x in row)])
    return buf.getvalue()


def read_heatmap_data(text: str) -> TransferMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise LFError("empty matrix CSV")
    languages = tuple(rows[0][1:])
    body = rows[1:]
    if tuple(r[0] for r in body) != languages:
        raise LFError("matrix CSV row labels do not match the header")
    return TransferMatrix(languages, tuple(tuple(float(x) for x in r[1:]) for r in body))


def render_rankings(m: TransferMatrix, exclude_self: bool = False) -> str:
    lines = ["role\trank\tlocale\tscore"]
    for role, ranking in (("donor", donor_scores(m, exclude_self)),
                          ("receiver", receiver_scores(m, exclude_self))):
        for rank, (lang, score) in enumerate(ranking, 1):
            lines.append(f"{role}\t{rank}\t{lang}\t{score!r}")
    return "\n".join(lines) + "\n"
