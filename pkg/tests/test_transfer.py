from __future__ import annotations

import random

import pytest

from massive_lf.errors import InconsistentLanguageSets
from massive_lf.locales import KNOWN_LOCALES
from massive_lf.metrics import EvalReport, Score
from massive_lf.transfer import (
    TransferMatrix,
    build_matrix,
    donor_scores,
    read_heatmap_data,
    receiver_scores,
    render_heatmap_data,
    render_rankings,
    transpose,
)


def report(ems: dict[str, tuple[int, int]]) -> EvalReport:
    r = EvalReport()
    for loc, (hits, n) in ems.items():
        r.per_locale[loc] = Score(n=n, ia_hits=hits, em_hits=hits)
    return r


def random_matrix(langs, seed) -> TransferMatrix:
    rng = random.Random(seed)
    return TransferMatrix(tuple(langs), tuple(tuple(rng.random() for _ in langs) for _ in langs))


def identity(langs) -> TransferMatrix:
    return TransferMatrix(tuple(langs), tuple(tuple(float(i == j) for j in range(len(langs)))
                                              for i in range(len(langs))))


def test_two_reports():
    reports = {"fr_FR": report({"fr_FR": (8, 10), "de_DE": (3, 10)}),
               "de_DE": report({"fr_FR": (1, 4), "de_DE": (3, 4)})}
    m = build_matrix(reports)
    assert m.languages == ("de_DE", "fr_FR")
    assert m.cells == ((0.75, 0.25), (0.3, 0.8))
    assert m.cell("fr_FR", "de_DE") == 0.3


def test_missing_locale():
    reports = {"fr_FR": report({"fr_FR": (1, 1)}),
               "de_DE": report({"fr_FR": (1, 1), "de_DE": (1, 1)})}
    with pytest.raises(InconsistentLanguageSets, match="de_DE"):
        build_matrix(reports)


def test_51_reports_diagonal():
    rng = random.Random(3)
    reports = {}
    for d in KNOWN_LOCALES:
        reports[d] = report({r: (rng.randint(0, 50), 50) for r in KNOWN_LOCALES})
    m = build_matrix(reports)
    assert len(m.languages) == 51
    for d in KNOWN_LOCALES:
        assert m.cell(d, d) == reports[d].per_locale[d].em
        for r in KNOWN_LOCALES:
            assert m.cell(d, r) == reports[d].per_locale[r].em


def test_identity_scores():
    m = identity(["es_ES", "de_DE", "fr_FR"])
    assert donor_scores(m) == [("de_DE", 1.0), ("es_ES", 1.0), ("fr_FR", 1.0)]
    assert receiver_scores(m) == [("de_DE", 1.0), ("es_ES", 1.0), ("fr_FR", 1.0)]
    assert donor_scores(m, exclude_self=True) == [("de_DE", 0.0), ("es_ES", 0.0), ("fr_FR", 0.0)]


def test_hand_sums():
    m = TransferMatrix(("a", "b", "c"), ((0.5, 0.25, 0.0),
                                         (0.125, 1.0, 0.5),
                                         (0.0, 0.0, 0.75)))
    # rows: a=0.75 b=1.625 c=0.75; columns: a=0.625 b=1.25 c=1.25
    assert donor_scores(m) == [("b", 1.625), ("a", 0.75), ("c", 0.75)]
    assert receiver_scores(m) == [("b", 1.25), ("c", 1.25), ("a", 0.625)]
    assert donor_scores(m, exclude_self=True) == [("b", 0.625), ("a", 0.25), ("c", 0.0)]


@pytest.mark.parametrize("n", [5, 51])
def test_random_against_brute_force(n):
    langs = KNOWN_LOCALES[:n]
    m = random_matrix(langs, seed=n)
    rows = {l: 0.0 for l in langs}
    cols = {l: 0.0 for l in langs}
    for i, d in enumerate(langs):
        for j, r in enumerate(langs):
            rows[d] += m.cells[i][j]
            cols[r] += m.cells[i][j]
    for lang, score in donor_scores(m):
        assert abs(score - rows[lang]) <= 1e-12
    for lang, score in receiver_scores(m):
        assert abs(score - cols[lang]) <= 1e-12
    assert receiver_scores(m) == donor_scores(transpose(m))
    total = sum(sum(r) for r in m.cells)
    assert abs(sum(s for _, s in donor_scores(m)) - total) <= 1e-12
    assert abs(sum(s for _, s in receiver_scores(m)) - total) <= 1e-12


def test_report_order_does_not_matter():
    rng = random.Random(9)
    langs = ["af_ZA", "de_DE", "fr_FR", "ja_JP"]
    reports = {d: report({r: (rng.randint(0, 9), 9) for r in langs}) for d in langs}
    shuffled = dict(sorted(reports.items(), key=lambda kv: rng.random()))
    assert build_matrix(shuffled) == build_matrix(reports)
    assert donor_scores(build_matrix(shuffled)) == donor_scores(build_matrix(reports))


def test_csv_export():
    text = render_heatmap_data(identity(["a", "b"]))
    assert text == "donor\\receiver,a,b\na,1.0,0.0\nb,0.0,1.0\n"
    m = random_matrix(KNOWN_LOCALES, seed=1)
    text = render_heatmap_data(m)
    rows = text.splitlines()
    assert len(rows) == 52 and all(len(r.split(",")) == 52 for r in rows)
    assert read_heatmap_data(text) == m


def test_rankings_tsv():
    lines = render_rankings(identity(["b", "a"])).splitlines()
    assert lines == ["role\trank\tlocale\tscore",
                     "donor\t1\ta\t1.0", "donor\t2\tb\t1.0",
                     "receiver\t1\ta\t1.0", "receiver\t2\tb\t1.0"]


def test_invalid_matrix():
    with pytest.raises(ValueError):
        TransferMatrix(("a", "b"), ((1.0,), (0.0, 1.0)))
    with pytest.raises(ValueError):
        TransferMatrix(("a",), ((1.5,),))
