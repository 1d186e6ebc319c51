from __future__ import annotations

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nsconic.cones import ExponentialCone, NonnegOrthant, PowerCone, ProductCone
from nsconic.errors import DimensionMismatch, ParseError, UnknownConeType
from nsconic.formats import TRACE_COLUMNS, parse_problem, problem_from_dict, read_trace, serialize_problem, write_problem
from nsconic.problems import STANDARD_PROBLEMS


def _lp_doc(**overrides) -> dict:
    doc = {
        "m": 1,
        "n": 2,
        "A": [[0, 0, 1.0], [0, 1, 1.0]],
        "b": [1.0],
        "c": [1.0, 2.0],
        "cones": [{"type": "nonneg", "dim": 2}],
    }
    doc.update(overrides)
    return doc


def test_minimal_lp(tmp_path):
    path = tmp_path / "lp.json"
    path.write_text(json.dumps(_lp_doc()), encoding="utf-8")
    p = parse_problem(path)
    assert p.name == "lp"
    assert_allclose(p.A, [[1.0, 1.0]])
    assert p.cone == NonnegOrthant(2)


def test_mixed_cones():
    doc = _lp_doc(
        n=8,
        A=[[0, 0, 1.0]],
        c=[0.0] * 8,
        cones=[{"type": "nonneg", "dim": 2}, {"type": "exp"}, {"type": "pow", "dim": 3, "alpha": 0.3}],
    )
    p = problem_from_dict(doc)
    assert isinstance(p.cone, ProductCone)
    kinds = [leaf for _, leaf in p.cone.blocks()]
    assert kinds == [NonnegOrthant(2), ExponentialCone(), PowerCone(0.3)]
    assert p.nu == 8.0


def test_duplicate_triplets_are_summed():
    p = problem_from_dict(_lp_doc(A=[[0, 0, 1.0], [0, 0, 2.5], [0, 1, 1.0]]))
    assert_allclose(p.A, [[3.5, 1.0]])


@pytest.mark.parametrize("cones, error", [
    ([{"type": "pow", "dim": 3, "alpha": 1.2}], UnknownConeType),
    ([{"type": "psd", "dim": 3}], UnknownConeType),
    ([{"type": "exp", "dim": 4}], DimensionMismatch),
    ([{"type": "nonneg", "dim": 1}], DimensionMismatch),
    ([{"dim": 2}], ParseError),
    ([], ParseError),
])
def test_bad_cones(cones, error):
    n = 3 if cones and cones[0].get("type") in ("pow", "exp", "psd") else 2
    doc = _lp_doc(n=n, c=[0.0] * n, cones=cones)
    with pytest.raises(error):
        problem_from_dict(doc)


@pytest.mark.parametrize("overrides", [
    {"m": "1"},
    {"m": True},
    {"A": [[0, 5, 1.0]]},
    {"A": [[0, 0]]},
    {"A": "dense"},
    {"b": [float("nan")]},
    {"c": [1.0, "two"]},
])
def test_parse_errors(overrides):
    with pytest.raises(ParseError):
        problem_from_dict(_lp_doc(**overrides))


def test_vector_length_mismatch():
    with pytest.raises(DimensionMismatch):
        problem_from_dict(_lp_doc(c=[1.0, 2.0, 3.0]))


def test_parse_error_names_location(tmp_path):
    missing = _lp_doc()
    del missing["b"]
    path = tmp_path / "missing.json"
    path.write_text(json.dumps(missing), encoding="utf-8")
    with pytest.raises(ParseError) as info:
        parse_problem(path)
    assert info.value.field == "b"
    assert str(path) in str(info.value)


def test_invalid_json_and_missing_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"m\": 1,", encoding="utf-8")
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_problem(path)
    with pytest.raises(ParseError, match="cannot read"):
        parse_problem(tmp_path / "absent.json")


def test_non_utf8_input(tmp_path):
    path = tmp_path / "latin.json"
    path.write_bytes(b"\xff\xfe")
    with pytest.raises(ParseError, match="cannot read") as info:
        parse_problem(path)
    assert str(path) in str(info.value)
    trace = tmp_path / "trace.csv"
    trace.write_bytes(",".join(TRACE_COLUMNS).encode() + b"\n\xff\xfe\n")
    with pytest.raises(ParseError, match="cannot read"):
        read_trace(trace)


@pytest.mark.parametrize("name", sorted(STANDARD_PROBLEMS))
def test_standard_problem_files(name, tmp_path):
    original = STANDARD_PROBLEMS[name]()
    path = write_problem(original, tmp_path / f"{name}.json")
    loaded = parse_problem(path)
    assert loaded.name == name
    assert np.array_equal(loaded.A, original.A)
    assert np.array_equal(loaded.b, original.b)
    assert np.array_equal(loaded.c, original.c)
    assert loaded.cone == original.cone
    assert serialize_problem(loaded) == serialize_problem(original)


def test_trace_header_and_errors(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("iter,mu_e\n0,1.0\n", encoding="utf-8")
    with pytest.raises(ParseError, match="missing columns"):
        read_trace(path)
    path.write_text(",".join(TRACE_COLUMNS) + "\n", encoding="utf-8")
    with pytest.raises(ParseError, match="no rows"):
        read_trace(path)
    row = ["0", "one"] + ["1"] * (len(TRACE_COLUMNS) - 2)
    path.write_text(",".join(TRACE_COLUMNS) + "\n" + ",".join(row) + "\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        read_trace(path)
    assert info.value.field == "line 2"
