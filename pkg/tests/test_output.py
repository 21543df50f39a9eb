"""Serialization helpers shared by the CLI subcommands."""

import json

import numpy as np

from resfluo.output import csv_text, emit, format_cell, json_text


def test_cell_formats():
    assert format_cell(None) == ""
    assert format_cell(True) == "true"
    assert format_cell(False) == "false"
    assert format_cell("abc") == "abc"
    # float cells round-trip exactly through repr
    x = 0.1 + 0.2
    assert float(format_cell(x)) == x


def test_csv_layout():
    text = csv_text(
        ["a", "b"],
        [[1.0, None], [2.5, True]],
        provenance={"beta.key": 2, "alpha.key": "v"},
    )
    lines = text.splitlines()
    assert lines[0] == "# alpha.key = v"
    assert lines[1] == "# beta.key = 2"
    assert lines[2] == "a,b"
    assert lines[3] == "1.0,"
    assert lines[4] == "2.5,true"
    assert text.endswith("\n")


def test_json_is_sorted_and_clean():
    text = json_text({"z": np.float64(1.5), "a": np.int64(2), "m": [np.float64(0.25)]})
    data = json.loads(text)
    assert data == {"z": 1.5, "a": 2, "m": [0.25]}
    assert text.index('"a"') < text.index('"m"') < text.index('"z"')
    assert text.endswith("\n")


def test_emit_to_file(tmp_path):
    target = tmp_path / "x.csv"
    emit("hello\n", target)
    assert target.read_text() == "hello\n"


def test_emit_to_stdout(capsys):
    emit("to console\n", None)
    assert capsys.readouterr().out == "to console\n"
