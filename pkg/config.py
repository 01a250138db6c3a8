"""
File name: config.py
Python Version: 3.11

Description:
    This module provides general configurations for the HMM NE tagger.
    Every value can be overridden with an env var of the same name.

Usage:
    Import this module into other scripts to use its values.
    Example:
        import config

License:
    This code is released under the MIT License.

Notes:
    Values here are the reference defaults: a bare `train`
    uses rare-max 2 and C(o,t)/C(o) emissions.

Warnings:
    This module is in development, may change in future versions.
"""

import os
from typing import Dict


def _env_str(name: str, default: str) -> str:
    value = os.getenv(name)
    return value if value is not None else default


def _env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "y", "on"}


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        return default


VERSION = "1.0.0"

DEBUG = _env_bool("DEBUG", False)
LOG_LEVEL = _env_str("LOG_LEVEL", "DEBUG" if DEBUG else "INFO")

# optional yaml file with overrides (see tagger_config.yaml)
TAGGER_CONFIG_PATH = _env_str("TAGGER_CONFIG_PATH", "tagger_config.yaml")

# version written in the HEADER section of every model file
MODEL_FORMAT_VERSION = "1"

# training
# pseudo words with triplet frequency <= RARE_MAX feed the suffix model
RARE_MAX = _env_int("RARE_MAX", 2)
# paper_faithful divides by C(o), standard divides by C(t)
EMISSION_MODE = _env_str("EMISSION_MODE", "paper_faithful")

# max suffix length per language, tuned on the contest dev sets
SUFFIX_LENGTHS: Dict[str, int] = {
    "bengali": 8,
    "english": 9,
    "hindi": 9,
    "marathi": 9,
    "punjabi": 9,
    "tamil": 16,
    "telugu": 13,
}
# used when neither --lang nor --suffix-len is given
DEFAULT_SUFFIX_LEN = _env_int("DEFAULT_SUFFIX_LEN", 9)

# tagging
TAG_WORKERS = _env_int("TAG_WORKERS", 1)
# max distinct triplets whose log emission rows a model keeps cached
EMISSION_CACHE_SIZE = _env_int("EMISSION_CACHE_SIZE", 100_000)
