"""
log helpers, to help debugging
"""

from __future__ import annotations

import json
import logging
from typing import Any, Dict

import config

logger = logging.getLogger(__name__)  # module-level logger


def short(s: str, n: int = 500) -> str:
    """
    shorten a msg
    """
    return s if len(s) <= n else s[:n] + f"... <{len(s)-n} more>"


def _jsonable(value: Any) -> Any:
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    return short(str(value), 200)


def log_json(log: logging.Logger | None = None, event: str = "", **kwargs) -> None:
    """
    Emit a single structured JSON log line.
    Uses DEBUG level when config.DEBUG is True, otherwise INFO level.
    """
    log = log or logger
    payload: Dict[str, Any] = {"event": event}
    payload.update({k: _jsonable(v) for k, v in kwargs.items()})
    msg = json.dumps(payload, ensure_ascii=False, sort_keys=False)
    if config.DEBUG:
        log.debug(msg)
    else:
        log.info(msg)
