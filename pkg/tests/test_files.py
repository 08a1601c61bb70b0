import copy
import json

import pytest

from utilfair.core import JointTable, ReducedJointTable, UtilityMatrix, ValidationError
from utilfair.files import (
    SchemaError,
    dump_json,
    ingest,
    ingest_to_document,
    load_scenario,
    parse_scenario,
    preset_names,
    read_scenario_document,
)

REDUCED_DOC = {
    "schemaVersion": 1,
    "setting": "reduced",
    "groups": {"standard": {"p11": 0.76, "pAccept": 0.8}, "protected": {"acceptance": 0.8, "ppv": 0.9}},
    "utilities": {"u11": 310000, "u01": 160000, "u0": 190000},
}


def write_csv(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def rows(group, y, yhat, n):
    return f"{group},{y},{yhat}\n" * n


# ---- scenario files

def test_presets_present():
    assert {"college", "college-student-loan", "mortgage-reduced", "mortgage-reduced-intervals",
            "mortgage-general", "equal-joints"} <= set(preset_names())


@pytest.mark.parametrize("name", ["college", "college.scenario"])
def test_preset_lookup_with_or_without_suffix(name):
    assert load_scenario(name).setting == "college"


def test_parse_reduced_document():
    ls = parse_scenario(REDUCED_DOC)
    assert ls.standard_name == "standard"
    assert ls.groups["protected"] == ReducedJointTable(0.72, 0.8)
    assert ls.tau == 0.0


def test_standard_key_reorders_groups():
    doc = copy.deepcopy(REDUCED_DOC)
    doc["standard"] = "protected"
    ls = parse_scenario(doc)
    assert ls.group_names == ["protected", "standard"]


def test_full_group_from_conditionals():
    doc = {"schemaVersion": 1, "setting": "standard",
           "groups": {"a": {"acceptance": 0.8, "ppv": 0.95, "npv": 0.5},
                      "b": {"cells": {"p11": 0.72, "p01": 0.08, "p10": 0.1, "p00": 0.1}}},
           "utilities": {"u11": 1, "u01": 0, "u00": 0, "u10": 0}}
    ls = parse_scenario(doc)
    assert ls.groups["a"] == JointTable(0.76, 0.04, 0.1, 0.1)
    assert ls.utilities == UtilityMatrix(1, 0, 0, 0)


def test_file_cells_renormalized_within_tolerance():
    doc = {"schemaVersion": 1, "setting": "standard",
           "groups": {"a": {"cells": {"p11": 0.25 + 5e-10, "p01": 0.25, "p10": 0.25, "p00": 0.25}},
                      "b": {"cells": {"p11": 0.25, "p01": 0.25, "p10": 0.25, "p00": 0.25}}},
           "utilities": {"u11": 1, "u01": 0, "u00": 0, "u10": 0}}
    parse_scenario(doc)
    doc["groups"]["a"]["cells"]["p11"] = 0.26
    with pytest.raises(SchemaError, match=r"\$\.groups\.a"):
        parse_scenario(doc)


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.pop("schemaVersion"), r"\$\.schemaVersion: required"),
    (lambda d: d.update(schemaVersion=2), r"\$\.schemaVersion"),
    (lambda d: d.update(setting="bogus"), r"\$\.setting"),
    (lambda d: d.update(college={}), r"exactly the 'groups' block"),
    (lambda d: d["groups"].pop("protected"), r"\$\.groups"),
    (lambda d: d["groups"]["standard"].update(p11=0.9), r"\$\.groups\.standard"),
    (lambda d: d["groups"]["standard"].update(p11="x"), r"\$\.groups\.standard\.p11"),
    (lambda d: d["utilities"].pop("u0"), r"\$\.utilities"),
    (lambda d: d.update(tau=-1), r"\$\.tau"),
    (lambda d: d.update(standard="nobody"), r"\$\.standard"),
    (lambda d: d.update(intervals={"ghost": {}}), r"\$\.intervals\.ghost"),
    (lambda d: d.update(intervals={"standard": {"p11": [0.8, 0.7], "pAccept": [0.7, 0.9]}}),
     r"\$\.intervals\.standard\.p11"),
])
def test_schema_errors_are_path_qualified(mutate, path):
    doc = copy.deepcopy(REDUCED_DOC)
    mutate(doc)
    with pytest.raises(SchemaError, match=path):
        parse_scenario(doc)


def test_invalid_json(tmp_path):
    p = write_csv(tmp_path, "{not json", "bad.scenario")
    with pytest.raises(SchemaError, match="invalid JSON"):
        read_scenario_document(p)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        read_scenario_document("/nonexistent/thing.scenario")


# ---- ingestion

def test_ingest_reduced_counts(tmp_path):
    text = "group,y,yhat\n" + rows("A", 1, 1, 76) + rows("A", 0, 1, 4) + rows("A", "", 0, 20) \
        + rows("B", 1, 1, 72) + rows("B", 0, 1, 8) + rows("B", "", 0, 20)
    res = ingest(write_csv(tmp_path, text), standard="A")
    assert res.setting == "reduced"
    assert res.group_names == ["A", "B"]
    assert res.tables["A"] == ReducedJointTable(0.76, 0.8)
    assert res.tables["B"] == ReducedJointTable(0.72, 0.8)
    cd = res.count_data()["A"]
    assert (cd.n11, cd.n01, cd.n0) == (76, 4, 20)


def test_ingest_full_counts(tmp_path):
    text = "group,y,yhat\n" + rows("standard", 1, 1, 3) + rows("standard", 0, 1, 1) \
        + rows("standard", 1, 0, 2) + rows("standard", 0, 0, 4) + rows("protected", 1, 1, 1) \
        + rows("protected", 0, 0, 1)
    res = ingest(write_csv(tmp_path, text))
    assert res.setting == "standard"
    assert res.tables["standard"] == JointTable(0.3, 0.1, 0.2, 0.4)
    assert res.tables["protected"] == JointTable(0.5, 0.0, 0.0, 0.5)


def test_ingest_numeric_labels(tmp_path):
    text = "group,y,yhat\n1,1,1\n0,0,0\n0,1,1\n"
    res = ingest(write_csv(tmp_path, text))
    assert res.group_names == ["0", "1"]


@pytest.mark.parametrize("text, match", [
    ("", "empty file"),
    ("group,y,yhat\n", "no data rows"),
    ("grp,y,yhat\nstandard,1,1\n", "line 1"),
    ("group,y,yhat\nstandard,1,1\nprotected,2,1\n", "line 3: y"),
    ("group,y,yhat\nstandard,1,1\nprotected,1\n", "line 3: expected 3 fields"),
    ("group,y,yhat\nstandard,,1\nprotected,1,1\n", "line 2: outcome y may only be missing"),
    ("group,y,yhat\nstandard,1,1\nstandard,0,0\n", "at least two groups"),
    ("group,y,yhat\nstandard,1,1\nmartian,1,1\n", "line 3: unknown group label"),
])
def test_ingest_errors(tmp_path, text, match):
    with pytest.raises(ValidationError, match=match):
        ingest(write_csv(tmp_path, text))


def test_ingest_protected_allow_list(tmp_path):
    text = "group,y,yhat\nA,1,1\nB,1,0\nC,0,0\n"
    p = write_csv(tmp_path, text)
    with pytest.raises(ValidationError, match="line 4"):
        ingest(p, standard="A", protected=["B"])
    res = ingest(p, standard="A", protected=["B", "C"])
    assert res.group_names == ["A", "B", "C"]


def test_ingest_round_trip_bit_for_bit(tmp_path):
    text = "group,y,yhat\n" + rows("standard", 1, 1, 7) + rows("standard", 0, 1, 3) + rows("standard", 1, 0, 11) \
        + rows("standard", 0, 0, 9) + rows("protected", 1, 1, 13) + rows("protected", 0, 1, 1) \
        + rows("protected", 1, 0, 2) + rows("protected", 0, 0, 17)
    res = ingest(write_csv(tmp_path, text))
    doc = ingest_to_document(res, [1, 2, 3, 4])
    path = tmp_path / "out.scenario"
    path.write_text(dump_json(doc), encoding="utf-8")
    ls = load_scenario(path)
    for name in res.group_names:
        a, b = res.tables[name], ls.groups[name]
        assert [x.hex() for x in a.cells.values()] == [x.hex() for x in b.cells.values()]
    assert ls.counts["standard"].n == 30


def test_ingest_round_trip_reduced(tmp_path):
    text = "group,y,yhat\n" + rows("standard", 1, 1, 7) + rows("standard", "", 0, 6) \
        + rows("protected", 0, 1, 2) + rows("protected", 1, 1, 5) + rows("protected", "", 0, 4)
    res = ingest(write_csv(tmp_path, text))
    doc = json.loads(dump_json(ingest_to_document(res, [3, 2, 1])))
    ls = parse_scenario(doc)
    assert ls.groups == res.tables


def test_ingest_utility_arity(tmp_path):
    res = ingest(write_csv(tmp_path, "group,y,yhat\nstandard,1,1\nprotected,0,0\n"))
    with pytest.raises(ValidationError):
        ingest_to_document(res, [1, 2, 3])


def test_dump_json_canonical():
    assert dump_json({"b": 0.1, "a": 1 / 3}) == '{\n  "a": 0.3333333333333333,\n  "b": 0.1\n}'
    with pytest.raises(ValueError):
        dump_json({"x": float("nan")})
