"""
Table persistence for sweep results.

Tables are written as CSV (header row first, LF line endings, minimal RFC 4180
quoting) or as a JSON array of row objects. Floats use 17 significant digits
so files round-trip exactly and repeated runs are byte-identical.
"""

import csv
import io
import json
import logging
import math
import os
import shutil
import sys
from typing import Any, List, Optional, TextIO

import numpy as np

from .models import SweepTable, ValidationError


logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


class StorageError(Exception):
    """Raised when a storage operation fails."""
    pass


def _plain(value: Any) -> Any:
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def format_float(value: float) -> str:
    return format(value, ".17g")


def _csv_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _json_value(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else "null"
    if isinstance(value, int):
        return str(value)
    return json.dumps(str(value), ensure_ascii=False)


def render_csv(table: SweepTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_csv_cell(value) for value in row])
    return buffer.getvalue()


def render_json(table: SweepTable) -> str:
    if not table.rows:
        return "[]\n"
    keys = [json.dumps(name, ensure_ascii=False) for name in table.header]
    lines = []
    for row in table.rows:
        fields = ", ".join(f"{key}: {_json_value(value)}" for key, value in zip(keys, row))
        lines.append("  {" + fields + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n"


def render(table: SweepTable, fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")
    return render_csv(table) if fmt == "csv" else render_json(table)


def _write_text_atomic(path: str, text: str) -> None:
    """Write text atomically using a temporary file."""
    temp_path = f"{path}.tmp"
    try:
        with open(temp_path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        shutil.move(temp_path, path)
    except OSError as e:
        if os.path.exists(temp_path):
            try:
                os.remove(temp_path)
            except OSError:
                pass
        raise StorageError(f"could not write {path}: {e}") from e


def emit(table: SweepTable, fmt: str = "csv", path: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """
    Write a table to `path` atomically, or to `stream` (stdout by default) when no path is given.

    Raises:
        StorageError: On any I/O failure, with the path in the message
    """
    text = render(table, fmt)
    if path is None:
        (stream or sys.stdout).write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise StorageError(f"could not write {path}: directory {directory} does not exist")
    _write_text_atomic(path, text)
    logger.info(f"Wrote {len(table)} rows to {path}")


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_table(path: str) -> SweepTable:
    """Read a table written by emit; the format follows the file extension."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            text = f.read()
    except OSError as e:
        raise StorageError(f"could not read {path}: {e}") from e

    if path.endswith(".json"):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as e:
            raise StorageError(f"invalid JSON in {path}: {e}") from e
        if not records:
            raise StorageError(f"{path} holds no rows, so its header is unknown")
        header: List[str] = list(records[0].keys())
        return SweepTable(header=header, rows=[[record.get(name) for name in header] for record in records])

    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise StorageError(f"{path} is empty")
    return SweepTable(header=rows[0], rows=[[_parse_cell(cell) for cell in row] for row in rows[1:]])
