"""
File name: utils.py
Python Version: 3.11

Description:
    Utility functions here.

Usage:
    Import this module into other scripts to use its functions.
    Example:
      from utils import get_console_logger, write_text_atomic

License:
    This code is released under the MIT License.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Union

import config


def get_console_logger(name: str = "ConsoleLogger", level: str = config.LOG_LEVEL):
    """
    To get a logger to print on console (stderr)
    """
    logger = logging.getLogger(name)

    # to avoid duplication of logging
    if not logger.handlers:
        logger.setLevel(level)

        handler = logging.StreamHandler()
        handler.setLevel(logging.DEBUG)

        formatter = logging.Formatter("%(asctime)s - %(message)s")
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.propagate = False

    return logger


def read_text(path: Union[str, Path]) -> str:
    """
    Read a whole UTF-8 file. Decoding errors surface as UnicodeDecodeError.
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        return f.read()


def write_text_atomic(path: Union[str, Path], text: str) -> None:
    """
    Write text to path so that readers never observe a partial file:
    the content goes to a temp file in the same directory, then it is renamed.
    """
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(
        prefix=f".{target.name}.", suffix=".tmp", dir=directory
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        # leave no temp file behind
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
