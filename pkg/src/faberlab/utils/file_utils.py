#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
File utilities: directory creation and atomic JSON/CSV writers.
"""

import io
import os
import csv
import json
import tempfile
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

logger = logging.getLogger(__name__)

ZERO_CSV_HEADER = ("n", "re", "im")
COEFF_CSV_HEADER = ("k", "re", "im")


def ensure_directory(directory: Union[str, Path]) -> bool:
    """
    Ensure a directory exists.

    Args:
        directory: Directory path

    Returns:
        bool: True if the directory exists or was created, False otherwise
    """
    try:
        os.makedirs(directory, exist_ok=True)
        return True
    except Exception as e:
        logger.error(f"Error creating directory {directory}: {str(e)}")
        return False


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: Union[str, Path], payload: Any, indent: Union[int, None] = None) -> Path:
    """
    Write JSON to a temporary file in the target directory, then rename.

    Args:
        path: Destination file
        payload: JSON-serializable object
        indent: Optional indentation

    Returns:
        Path: The written file
    """
    path = Path(path)
    if not ensure_directory(path.parent):
        raise OSError(f"cannot create directory {path.parent}")
    _atomic_write(path, json.dumps(payload, indent=indent, allow_nan=True) + "\n")
    logger.debug(f"Wrote {path}")
    return path


def write_csv_atomic(
    path: Union[str, Path],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    """Write a CSV file atomically with a fixed header row."""
    path = Path(path)
    if not ensure_directory(path.parent):
        raise OSError(f"cannot create directory {path.parent}")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buffer.getvalue())
    logger.debug(f"Wrote {path}")
    return path
