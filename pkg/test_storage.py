"""
Tests for CSV/JSON table output.
"""

import io
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from optomech.models import SweepTable, ValidationError
from optomech.storage import StorageError, emit, load_table, render


def _table():
    return SweepTable(
        header=["beta", "n", "p", "ok", "error"],
        rows=[[0.1, 1, 1.0 / 3.0, True, ""], [np.float64(2.5), np.int64(2), math.nan, np.bool_(False), "Bad, input"]],
    )


def test_render_csv():
    text = render(_table(), "csv")
    lines = text.split("\n")
    assert lines[0] == "beta,n,p,ok,error"
    assert lines[1] == "0.10000000000000001,1,0.33333333333333331,true,"
    assert lines[2] == '2.5,2,nan,false,"Bad, input"'
    assert text.endswith("\n")
    assert "\r" not in text


def test_render_json():
    text = render(_table(), "json")
    assert text.startswith("[\n  {")
    assert '"p": null' in text
    assert '"ok": false' in text
    assert '"error": "Bad, input"' in text
    assert render(SweepTable(header=["a"]), "json") == "[]\n"


def test_render_rejects_unknown_format():
    with pytest.raises(ValidationError):
        render(_table(), "xml")


def test_emit_to_stream():
    buffer = io.StringIO()
    emit(_table(), "csv", stream=buffer)
    assert buffer.getvalue() == render(_table(), "csv")


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_emit_and_load(tmp_path, fmt):
    path = str(tmp_path / f"table.{fmt}")
    emit(_table(), fmt, path)
    assert not os.path.exists(f"{path}.tmp")
    loaded = load_table(path)
    assert loaded.header == _table().header
    assert loaded.rows[0][:4] == [0.1, 1, 1.0 / 3.0, True]
    assert loaded.rows[1][1] == 2


def test_emit_is_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(_table(), "csv", str(first))
    emit(_table(), "csv", str(second))
    assert first.read_bytes() == second.read_bytes()


def test_emit_missing_directory(tmp_path):
    with pytest.raises(StorageError) as excinfo:
        emit(_table(), "csv", str(tmp_path / "missing" / "table.csv"))
    assert "missing" in str(excinfo.value)


def test_load_missing_file(tmp_path):
    with pytest.raises(StorageError):
        load_table(str(tmp_path / "absent.csv"))


def test_empty_table_renders_header_only():
    assert render(SweepTable(header=["beta", "p", "error"]), "csv") == "beta,p,error\n"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
