"""
Tagger settings, read from tagger_config.yaml and validated with pydantic.

Precedence: CLI flag > yaml file > env var / config.py default.
Defaults are read from config at construction time and validated too.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

import config
from errors import ConfigError

EmissionMode = Literal["paper_faithful", "standard"]


class TaggerSettings(BaseModel):
    """
    Training and tagging defaults.
    """

    model_config = ConfigDict(extra="forbid", validate_default=True)

    suffix_lengths: Dict[str, int] = Field(
        default_factory=lambda: dict(config.SUFFIX_LENGTHS)
    )
    default_suffix_len: int = Field(
        default_factory=lambda: config.DEFAULT_SUFFIX_LEN, ge=1
    )
    rare_max: int = Field(default_factory=lambda: config.RARE_MAX, ge=0)
    emission_mode: EmissionMode = Field(default_factory=lambda: config.EMISSION_MODE)
    workers: int = Field(default_factory=lambda: config.TAG_WORKERS, ge=1)

    @field_validator("suffix_lengths")
    @classmethod
    def _check_lengths(cls, value: Dict[str, int]) -> Dict[str, int]:
        out = {}
        for lang, length in value.items():
            if int(length) < 1:
                raise ValueError(f"suffix length for {lang!r} must be >= 1")
            out[lang.strip().lower()] = int(length)
        return out

    def suffix_len_for(self, language: Optional[str]) -> int:
        """
        Max suffix length for a language; the default when language is None.
        """
        if language is None:
            return self.default_suffix_len
        key = language.strip().lower()
        if key not in self.suffix_lengths:
            known = ", ".join(sorted(self.suffix_lengths))
            raise ConfigError(f"unknown language {language!r} (known: {known})")
        return self.suffix_lengths[key]


def _build(path: Optional[Path], **values: Any) -> TaggerSettings:
    """
    TaggerSettings(**values) with validation errors as ConfigError.
    Without a path the bad value came from the environment/config.py.
    """
    try:
        return TaggerSettings(**values)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(x) for x in first.get("loc", ()))
        if path is None:
            raise ConfigError(
                f"invalid default {loc} (check the environment): {first.get('msg')}"
            ) from e
        raise ConfigError(f"{loc}: {first.get('msg')}", path=str(path)) from e


def load_settings(config_path: Optional[str] = None) -> TaggerSettings:
    """
    Load settings from yaml.

    If config_path is None the default file (config.TAGGER_CONFIG_PATH) is
    used when present; an explicitly named file must exist.
    """
    explicit = config_path is not None
    path = Path(config_path if explicit else config.TAGGER_CONFIG_PATH)

    if not path.exists():
        if explicit:
            raise ConfigError("config file not found", path=str(path))
        return _build(None)

    try:
        with open(path, "r", encoding="utf-8") as f:
            cfg = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid yaml: {e}", path=str(path)) from e

    if not isinstance(cfg, dict):
        raise ConfigError("top level must be a mapping", path=str(path))

    # languages in the file extend/override the built-in table
    extra = cfg.pop("suffix_lengths", None) or {}
    if not isinstance(extra, dict):
        raise ConfigError("suffix_lengths must be a mapping", path=str(path))
    lengths = dict(config.SUFFIX_LENGTHS)
    lengths.update(extra)
    return _build(path, suffix_lengths=lengths, **cfg)
