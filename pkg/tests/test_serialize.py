"""JSON document plumbing tests: deterministic rendering, file parsing
errors, and the model envelope check."""

import math

import pytest

from smerisk.errors import ModelFormatError, ParseError
from smerisk.serialize import (
    MODEL_FORMAT_VERSION,
    check_model_envelope,
    dumps_deterministic,
    parse_json_file,
    write_json_file,
)


def test_dumps_sorted_keys_and_trailing_newline():
    text = dumps_deterministic({"b": 1, "a": 2})
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")
    assert dumps_deterministic({"b": 1, "a": 2}) == dumps_deterministic({"a": 2, "b": 1})


def test_dumps_full_float_precision():
    value = 0.1 + 0.2
    text = dumps_deterministic({"x": value})
    assert repr(value) in text  # 0.30000000000000004, not 0.3


def test_dumps_rejects_nan():
    with pytest.raises(ValueError):
        dumps_deterministic({"x": math.nan})


def test_write_parse_round_trip(tmp_path):
    doc = {"format_version": MODEL_FORMAT_VERSION, "model_type": "logistic", "x": [1.5, 2.5]}
    path = tmp_path / "doc.json"
    write_json_file(doc, path)
    assert parse_json_file(path) == doc
    write_json_file(doc, path)
    assert path.read_text() == dumps_deterministic(doc)


def test_parse_errors(tmp_path):
    missing = tmp_path / "missing.json"
    with pytest.raises(ParseError):
        parse_json_file(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(ParseError):
        parse_json_file(bad)
    scalar = tmp_path / "scalar.json"
    scalar.write_text("42")
    with pytest.raises(ParseError):
        parse_json_file(scalar)


def test_envelope_check():
    good = {"format_version": 1, "model_type": "logistic"}
    assert check_model_envelope(good) == "logistic"
    assert check_model_envelope({"format_version": 1, "model_type": "random_forest"}) == "random_forest"
    with pytest.raises(ModelFormatError):
        check_model_envelope({"format_version": "999", "model_type": "logistic"})
    with pytest.raises(ModelFormatError):
        check_model_envelope({"format_version": 2, "model_type": "logistic"})
    with pytest.raises(ModelFormatError):
        check_model_envelope({"format_version": 1, "model_type": "gradient_boosting"})
    with pytest.raises(ModelFormatError):
        check_model_envelope({"model_type": "logistic"})
    with pytest.raises(ModelFormatError):
        check_model_envelope({"format_version": 1, "model_type": "logistic"}, expected_type="random_forest")
