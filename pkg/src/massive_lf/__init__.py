"""Logical-form processing and evaluation tools for MASSIVE-style semantic parsing."""

from .converter import from_compact, to_compact
from .dataset_io import DatasetExample, PredictionRecord, load_massive, load_predictions, write_report
from .lf_model import (
    LogicalForm,
    SlotSpan,
    canonical_form,
    parse_annot,
    parse_compact,
    serialize_annot,
    serialize_compact,
)
from .locales import LanguageConfig, load_language_config
from .metrics import EvalReport, evaluate, exact_match, intent_match, split_by_localization
from .taf import Signature, canonicalize, make_signature, project_corpus, reorder_slots, snap_boundaries
from .transfer import TransferMatrix, build_matrix, donor_scores, receiver_scores, render_heatmap_data
from .translation_match import MatchReport, match_report, normalize_for_match

__version__ = "0.1.0"
