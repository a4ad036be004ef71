"""Locale list and per-language tokenization settings."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from .errors import LFError, UnknownLocale

LANG_CONFIG_ENV = "MASSIVE_LF_LANG_CONFIG"

INDIC_LOCALES = ("kn_IN", "te_IN", "bn_BD", "ta_IN", "hi_IN", "ml_IN")


@dataclass(frozen=True)
class LanguageConfig:
    locale: str
    whitespace_tokenized: bool


def _read_default() -> dict:
    text = resources.files("massive_lf").joinpath("data/languages.json").read_text("utf-8")
    return json.loads(text)


KNOWN_LOCALES: tuple[str, ...] = tuple(sorted(_read_default()))


def parse_language_config(raw: Mapping) -> dict[str, LanguageConfig]:
    configs = {}
    for locale, entry in raw.items():
        if isinstance(entry, bool):
            flag = entry
        elif isinstance(entry, Mapping) and isinstance(entry.get("whitespace_tokenized"), bool):
            flag = entry["whitespace_tokenized"]
        else:
            raise LFError(f"language config entry for {locale!r} needs a boolean"
                          f" 'whitespace_tokenized', got {entry!r}")
        configs[locale] = LanguageConfig(locale, flag)
    return configs


def load_language_config(path: Optional[str | os.PathLike] = None) -> dict[str, LanguageConfig]:
    """Load the locale -> LanguageConfig map.

    Resolution order: explicit ``path``, then ``$MASSIVE_LF_LANG_CONFIG``, then
    the 51-locale file bundled with the package.
    """
    if path is None:
        path = os.environ.get(LANG_CONFIG_ENV) or None
    if path is None:
        return parse_language_config(_read_default())
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise LFError(f"{path}: invalid JSON language config: {e}") from e
    if not isinstance(raw, Mapping):
        raise LFError(f"{path}: language config must be a JSON object")
    return parse_language_config(raw)


def config_for(configs: Mapping[str, LanguageConfig], locale: str) -> LanguageConfig:
    try:
        return configs[locale]
    except KeyError:
        raise UnknownLocale("no language config entry for locale", [locale]) from None
