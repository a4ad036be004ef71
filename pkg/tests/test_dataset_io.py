from __future__ import annotations

import json
import os

import pytest

from massive_lf.dataset_io import (
    DatasetExample,
    atomic_write,
    load_filler_outputs,
    load_massive,
    load_predictions,
    load_translations,
    write_jsonl,
    write_report,
)
from massive_lf.errors import DuplicateKey, DuplicatePrediction, InvariantViolation, MalformedJsonLine
from massive_lf.locales import KNOWN_LOCALES, load_language_config
from massive_lf.metrics import EvalReport, IntentScore, Score, SplitScore, load_eval_report

ES_RECORD = {
    "id": "1", "locale": "es_ES", "partition": "train", "scenario": "alarm",
    "intent": "alarm_set",
    "utt": "despiértame a las nueve de la mañana el viernes",
    "annot_utt": "despiértame a las [time : nueve de la mañana] el [date : viernes]",
    "worker_id": "8",
    "slot_method": [{"slot": "time", "method": "translation"},
                    {"slot": "date", "method": "localization"}],
}


def _write(path, lines):
    path.write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    return path


def test_single_record(tmp_path):
    path = _write(tmp_path / "g.jsonl", [json.dumps(ES_RECORD, ensure_ascii=False)])
    (ex,) = list(load_massive(path))
    assert ex.utt == ES_RECORD["utt"]
    assert ex.slot_methods == (("time", "translation"), ("date", "localization"))
    assert ex.is_localized
    assert ex.scenario == "alarm"


def test_empty_file(tmp_path):
    assert list(load_massive(_write(tmp_path / "e.jsonl", []))) == []


def test_mismatched_utt(tmp_path):
    bad = dict(ES_RECORD, utt="despiértame")
    path = _write(tmp_path / "g.jsonl", [json.dumps(ES_RECORD), json.dumps(bad)])
    with pytest.raises(InvariantViolation) as info:
        list(load_massive(path))
    assert info.value.lineno == 2


def test_bad_json_line(tmp_path):
    path = _write(tmp_path / "g.jsonl", [json.dumps(ES_RECORD), "{not json"])
    with pytest.raises(MalformedJsonLine) as info:
        list(load_massive(path))
    assert info.value.lineno == 2


def test_missing_field(tmp_path):
    rec = dict(ES_RECORD)
    del rec["annot_utt"]
    with pytest.raises(MalformedJsonLine, match="annot_utt"):
        list(load_massive(_write(tmp_path / "g.jsonl", [json.dumps(rec)])))


def test_slot_method_names_must_exist(tmp_path):
    rec = dict(ES_RECORD, slot_method=[{"slot": "person", "method": "translation"}])
    with pytest.raises(InvariantViolation):
        list(load_massive(_write(tmp_path / "g.jsonl", [json.dumps(rec)])))


def test_missing_slot_method_is_translated_only(tmp_path, caplog):
    rec = dict(ES_RECORD)
    del rec["slot_method"]
    (ex,) = load_massive(_write(tmp_path / "g.jsonl", [json.dumps(rec)]))
    assert ex.slot_methods == () and not ex.is_localized
    assert "slot_method" in caplog.text


def test_parallel_list_slot_method(tmp_path):
    rec = dict(ES_RECORD, slot_method={"slot": ["time", "date"],
                                       "method": ["translation", "translation"]})
    (ex,) = load_massive(_write(tmp_path / "g.jsonl", [json.dumps(rec)]))
    assert not ex.is_localized


def test_unknown_locale_warns(tmp_path, caplog):
    rec = dict(ES_RECORD, locale="xx_XX")
    (ex,) = load_massive(_write(tmp_path / "g.jsonl", [json.dumps(rec)]))
    assert ex.locale == "xx_XX"
    assert "xx_XX" in caplog.text


def test_numeric_id_accepted(tmp_path):
    rec = dict(ES_RECORD, id=17)
    (ex,) = load_massive(_write(tmp_path / "g.jsonl", [json.dumps(rec)]))
    assert ex.id == "17"


def test_round_trip_example_json():
    ex = DatasetExample("1", "es_ES", "train", "alarm_set", ES_RECORD["utt"],
                        ES_RECORD["annot_utt"], (("time", "translation"),), "alarm")
    from massive_lf.dataset_io import example_from_json
    assert example_from_json(ex.to_json_dict()) == ex


def test_duplicate_prediction(tmp_path):
    lines = [json.dumps({"id": "1", "locale": "es_ES", "lf": "[IN:A ]"})] * 2
    with pytest.raises(DuplicatePrediction):
        list(load_predictions(_write(tmp_path / "p.jsonl", lines)))


def test_duplicate_translation_and_filler(tmp_path):
    t = json.dumps({"id": "1", "source_locale": "en_US", "target_locale": "de_DE", "text": "x"})
    with pytest.raises(DuplicateKey):
        load_translations(_write(tmp_path / "t.jsonl", [t, t]))
    f = json.dumps({"id": "1", "target_locale": "de_DE", "lf": "[IN:A ]"})
    with pytest.raises(DuplicateKey):
        load_filler_outputs(_write(tmp_path / "f.jsonl", [f, f]))


def _report() -> EvalReport:
    return EvalReport(
        per_locale={"de_DE": Score(3, 2, 1), "es_ES": Score(4, 4, 3)},
        overall=Score(7, 6, 4),
        per_intent={"alarm_set": IntentScore(5, 4), "general_greet": IntentScore(2, 2)},
        split=SplitScore(2, 1, 5, 3),
    )


def test_report_json_round_trip(tmp_path):
    report = _report()
    write_report(report, tmp_path / "r.json", "json")
    assert load_eval_report(tmp_path / "r.json") == report


def test_report_tsv_line_count(tmp_path):
    write_report(_report(), tmp_path / "r.tsv", "tsv")
    lines = (tmp_path / "r.tsv").read_text().splitlines()
    assert len(lines) == 2 + 1 + 1  # locales + header + footer
    assert lines[0] == "locale\tia\tem\tn"
    assert lines[-1] == "ALL\t85.71\t57.14\t7"


def test_report_text_sorted_by_ia(tmp_path):
    write_report(_report(), tmp_path / "r.txt", "text")
    text = (tmp_path / "r.txt").read_text()
    assert text.index("ALARM_SET") < text.index("GENERAL_GREET")


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        write_report(_report(), tmp_path / "r", "xml")


def test_atomic_write_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.jsonl"

    def bad_records():
        yield {"a": 1}
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        write_jsonl(target, bad_records())
    assert not target.exists()
    assert os.listdir(tmp_path) == []


def test_atomic_write_replaces(tmp_path):
    target = tmp_path / "x.txt"
    atomic_write(target, "one\n")
    atomic_write(target, "two\n")
    assert target.read_bytes() == b"two\n"


def test_bundled_language_config():
    configs = load_language_config()
    assert len(configs) == 51 == len(KNOWN_LOCALES)
    no_ws = {k for k, c in configs.items() if not c.whitespace_tokenized}
    assert no_ws == {"zh_CN", "zh_TW", "ja_JP", "th_TH", "km_KH", "my_MM"}


def test_language_config_env_override(tmp_path, monkeypatch):
    path = tmp_path / "langs.json"
    path.write_text(json.dumps({"de_DE": {"whitespace_tokenized": False}, "xx_XX": True}))
    monkeypatch.setenv("MASSIVE_LF_LANG_CONFIG", str(path))
    configs = load_language_config()
    assert set(configs) == {"de_DE", "xx_XX"}
    assert not configs["de_DE"].whitespace_tokenized
