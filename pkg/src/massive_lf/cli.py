"""massive-lf command line.

Each subcommand is one pipeline stage reading and writing files. Exit status
is 0 on success, 1 on validation errors (including bad flags) and 2 on I/O
errors. Outputs are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .converter import from_compact, to_compact
from .dataset_io import (
    REPORT_FORMATS,
    atomic_write,
    dumps_jsonl,
    load_filler_outputs,
    load_massive,
    load_predictions,
    load_translations,
    render_report,
    write_jsonl,
    write_report,
)
from .errors import LFError
from .locales import INDIC_LOCALES, LANG_CONFIG_ENV, load_language_config
from .metrics import evaluate, load_eval_report
from .taf import make_signature, project_corpus
from .transfer import build_matrix, render_heatmap_data, render_rankings
from .translation_match import NORMALIZATION_FORMS, match_report

logger = logging.getLogger("massive_lf")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=256))


def _capture(fn):
    def run(item):
        try:
            return fn(item), None
        except LFError as e:
            return None, e
    return run


# ---------------------------------------------------------------------------
# subcommands


def cmd_convert(args) -> int:
    examples = list(load_massive(args.input))
    lfs = _pmap(to_compact, examples, args.threads)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(["id", "locale", "utt", "lf"])
    for ex, lf in zip(examples, lfs):
        writer.writerow([ex.id, ex.locale, ex.utt, lf])
    atomic_write(args.output, buf.getvalue())
    print(f"converted {len(examples)} examples", file=sys.stderr)
    return EXIT_OK


def cmd_invert(args) -> int:
    gold = {ex.key: ex for ex in load_massive(args.gold)}
    preds = list(load_predictions(args.predictions))

    def invert(p):
        ex = gold.get(p.key)
        if ex is None:
            raise LFError("UnknownPredictionId: no gold example for this id/locale")
        return from_compact(p.lf, ex.utt)

    results = _pmap(_capture(invert), preds, args.threads)
    out, rejects = [], []
    for p, (annot, err) in zip(preds, results):
        if err is None:
            out.append({"id": p.id, "locale": p.locale, "annot_utt": annot})
        else:
            rejects.append({"id": p.id, "locale": p.locale,
                            "reason": f"{type(err).__name__}: {err}"})
    write_jsonl(args.output, out)
    if args.rejects:
        write_jsonl(args.rejects, rejects)
    print(f"inverted {len(out)} predictions, {len(rejects)} failed", file=sys.stderr)
    return EXIT_OK


def cmd_signature(args) -> int:
    records = []
    for ex in load_massive(args.input):
        _, lf = ex.parse()
        records.append({"id": ex.id, "locale": ex.locale,
                        "signature": make_signature(lf).text})
    write_jsonl(args.output, records)
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    configs = load_language_config(args.lang_config)
    result = project_corpus(load_translations(args.translations),
                            load_filler_outputs(args.filler), configs)
    synth = dumps_jsonl(result.example_records())
    rejects = dumps_jsonl(r.to_json_dict() for r in result.rejections)
    atomic_write(args.output, synth)
    atomic_write(args.rejects, rejects)
    print(f"emitted {len(result.examples)} examples, rejected {len(result.rejections)}",
          file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    report = evaluate(load_predictions(args.predictions), load_massive(args.gold),
                      partition=args.partition)
    if args.report:
        write_report(report, args.report, args.format)
    sys.stdout.write(report.to_text(per_intent=args.per_intent, split=args.split_localization))
    return EXIT_OK


def cmd_transfer_map(args) -> int:
    paths = sorted(Path(args.reports).glob("*.json"))
    if not paths:
        raise LFError(f"no *.json reports in {args.reports}")
    reports = {p.stem: load_eval_report(p) for p in paths}
    m = build_matrix(reports)
    atomic_write(args.output, render_heatmap_data(m))
    if args.rankings:
        atomic_write(args.rankings, render_rankings(m, exclude_self=args.exclude_self))
    print(f"{len(m.languages)}x{len(m.languages)} transfer matrix", file=sys.stderr)
    return EXIT_OK


def cmd_nmt_match(args) -> int:
    indic = [x for x in args.indic_locales.split(",") if x]
    partition = None if args.partition == "all" else args.partition
    report = match_report(load_translations(args.nmt), load_massive(args.gold),
                          indic_locales=indic, form=args.form, partition=partition)
    atomic_write(args.output, render_report(report, "tsv"))
    sys.stdout.write(report.to_text())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="massive-lf", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for per-example stages (default: all CPUs)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="MASSIVE JSONL -> (id, locale, utt, compact LF) TSV")
    p.add_argument("--input", required=True, help="gold MASSIVE JSONL")
    p.add_argument("--output", required=True, help="training pairs TSV")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("invert", help="compact predictions -> MASSIVE annot_utt")
    p.add_argument("--predictions", required=True, help="JSONL {id, locale, lf}")
    p.add_argument("--gold", required=True, help="gold MASSIVE JSONL (source of utterances)")
    p.add_argument("--output", required=True, help="JSONL {id, locale, annot_utt}")
    p.add_argument("--rejects", help="JSONL {id, locale, reason} for failed conversions")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("signature", help="LF signatures (slot values removed)")
    p.add_argument("--input", required=True, help="gold MASSIVE JSONL")
    p.add_argument("--output", required=True, help="JSONL {id, locale, signature}")
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("canonicalize", help="join translations and filler outputs")
    p.add_argument("--translations", required=True,
                   help="JSONL {id, source_locale, target_locale, text}")
    p.add_argument("--filler", required=True, help="JSONL {id, target_locale, lf}")
    p.add_argument("--lang-config", default=None,
                   help=f"language config JSON (default: ${LANG_CONFIG_ENV} or bundled)")
    p.add_argument("--output", required=True, help="synthetic MASSIVE JSONL")
    p.add_argument("--rejects", required=True, help="JSONL {id, target_locale, reason}")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("evaluate", help="Intent Accuracy / Exact Match")
    p.add_argument("--predictions", required=True, help="JSONL {id, locale, lf}")
    p.add_argument("--gold", required=True, help="gold MASSIVE JSONL")
    p.add_argument("--partition", default="test", choices=["train", "dev", "test"])
    p.add_argument("--report", help="write the full report here")
    p.add_argument("--format", default="json", choices=REPORT_FORMATS,
                   help="format of --report (default: json)")
    p.add_argument("--per-intent", action="store_true",
                   help="print per-intent IA, lowest first")
    p.add_argument("--split-localization", action="store_true",
                   help="print EM on localized vs translated-only examples")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("transfer-map", help="donor x receiver EM matrix and rankings")
    p.add_argument("--reports", required=True,
                   help="directory of evaluate JSON reports named <donor_locale>.json")
    p.add_argument("--output", required=True, help="matrix CSV")
    p.add_argument("--rankings", help="donor/receiver ranking TSV")
    p.add_argument("--exclude-self", action="store_true",
                   help="leave the diagonal out of row/column sums")
    p.set_defaults(func=cmd_transfer_map)

    p = sub.add_parser("nmt-match", help="verbatim NMT vs gold translation matches")
    p.add_argument("--nmt", required=True, help="JSONL {id, source_locale, target_locale, text}")
    p.add_argument("--gold", required=True, help="gold MASSIVE JSONL")
    p.add_argument("--indic-locales", default=",".join(INDIC_LOCALES),
                   help="comma-separated locales for the Indic aggregate")
    p.add_argument("--form", default="NFKC", choices=NORMALIZATION_FORMS,
                   help="unicode normalization form (default: NFKC)")
    p.add_argument("--partition", default="train", choices=["train", "dev", "test", "all"])
    p.add_argument("--output", required=True, help="per-locale TSV with aggregate footer")
    p.set_defaults(func=cmd_nmt_match)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except LFError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
