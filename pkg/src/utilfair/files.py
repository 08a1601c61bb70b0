"""Scenario JSON files and CSV ingestion.

A scenario file is a JSON object with ``schemaVersion`` 1 and a ``setting``
naming one of ``standard``, ``reduced``, ``college`` or ``mortgage``. See
``docs/scenario-schema.md`` for the full layout.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

from .core import (
    JointTable,
    ReducedJointTable,
    ReducedUtilityMatrix,
    UtilityMatrix,
    ValidationError,
)
from .mortgage import MortgageParams
from .solver import CollegeParams
from .uncertainty import CountData, IntervalTable, ProbInterval

SCHEMA_VERSION = 1
SETTINGS = ("standard", "reduced", "college", "mortgage")
_SETTING_BLOCKS = {"groups", "college"}


class SchemaError(ValidationError):
    """Scenario document does not match the schema; message carries a JSON path."""


@dataclass
class LoadedScenario:
    setting: str
    group_names: list[str]
    groups: dict[str, Any]          # JointTable / ReducedJointTable / MortgageParams
    utilities: Any
    tau: float = 0.0
    acceptance: dict[str, float] = field(default_factory=dict)
    intervals: dict[str, IntervalTable] = field(default_factory=dict)
    counts: dict[str, CountData] = field(default_factory=dict)
    confidence: float = 0.95
    college: Optional[CollegeParams] = None
    metadata: dict = field(default_factory=dict)

    @property
    def standard_name(self) -> str:
        return self.group_names[0]

    @property
    def protected_names(self) -> list[str]:
        return self.group_names[1:]


def _need(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}: required key missing")
    return obj[key]


def _num(obj: dict, key: str, path: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise SchemaError(f"{path}.{key}: required number missing")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}: expected a number, got {v!r}")
    return float(v)


def _wrap(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SchemaError:
        raise
    except (ValidationError, ValueError, TypeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _full_group(block: dict, path: str) -> JointTable:
    if "cells" in block:
        c = block["cells"]
        return _wrap(path + ".cells", JointTable.from_cells,
                     *(_num(c, k, path + ".cells") for k in ("p11", "p01", "p10", "p00")))
    return _wrap(path, JointTable.from_conditionals, _num(block, "acceptance", path),
                 _num(block, "ppv", path), _num(block, "npv", path))


def _reduced_group(block: dict, path: str) -> ReducedJointTable:
    if "p11" in block or "pAccept" in block:
        return _wrap(path, ReducedJointTable, _num(block, "p11", path), _num(block, "pAccept", path))
    return _wrap(path, ReducedJointTable.from_conditional, _num(block, "acceptance", path),
                 _num(block, "ppv", path))


_MORTGAGE_KEYS = {"priceT": "price_t", "mortgageT": "mortgage_t", "capital0": "capital0",
                  "haircut": "haircut", "mu": "mu", "sigma": "sigma", "rentCost": "rent_cost",
                  "horizonT": "horizon"}


def _mortgage_group(block: dict, path: str) -> MortgageParams:
    base = {}
    if "preset" in block:
        from .mortgage import PRESETS
        if block["preset"] not in PRESETS:
            raise SchemaError(f"{path}.preset: unknown preset {block['preset']!r}")
        base = dataclasses.asdict(PRESETS[block["preset"]])
    for key, attr in _MORTGAGE_KEYS.items():
        if key in block:
            base[attr] = _num(block, key, path)
        elif attr not in base and attr != "horizon":
            raise SchemaError(f"{path}.{key}: required number missing")
    return _wrap(path, MortgageParams, **base)


def parse_scenario(doc: dict) -> LoadedScenario:
    """Validate a scenario document and build library objects from it."""
    if not isinstance(doc, dict):
        raise SchemaError("$: expected a JSON object")
    version = _need(doc, "schemaVersion", "$")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"$.schemaVersion: unsupported version {version!r}")
    setting = _need(doc, "setting", "$")
    if setting not in SETTINGS:
        raise SchemaError(f"$.setting: must be one of {', '.join(SETTINGS)}, got {setting!r}")
    expected = "college" if setting == "college" else "groups"
    present = _SETTING_BLOCKS & set(doc)
    if present != {expected}:
        raise SchemaError(f"$: setting {setting!r} needs exactly the '{expected}' block, found {sorted(present)}")
    tau = _num(doc, "tau", "$", default=0.0)
    if tau < 0:
        raise SchemaError("$.tau: must be nonnegative")
    metadata = doc.get("metadata", {})
    confidence = _num(doc, "confidence", "$", default=0.95)
    if not 0 < confidence < 1:
        raise SchemaError("$.confidence: must lie in (0, 1)")

    if setting == "college":
        c = doc["college"]
        u = doc.get("utilities", {})
        params = _wrap("$.college", CollegeParams, _num(c, "q0", "$.college"), _num(c, "q1", "$.college"),
                       _num(c, "delta", "$.college"), _num(c, "q11", "$.college"),
                       _num(u, "u11", "$.utilities"), _num(u, "u01", "$.utilities", default=0.0))
        return LoadedScenario(setting, ["standard", "protected"], {}, None, tau,
                              college=params, metadata=metadata, confidence=confidence)

    groups_doc = doc["groups"]
    if not isinstance(groups_doc, dict) or len(groups_doc) < 2:
        raise SchemaError("$.groups: need an object with at least two groups")
    names = list(groups_doc)
    if "standard" in doc:
        std = doc["standard"]
        if std not in groups_doc:
            raise SchemaError(f"$.standard: {std!r} is not a group")
        names.remove(std)
        names.insert(0, std)

    groups, acceptance, counts = {}, {}, {}
    for name in names:
        path = f"$.groups.{name}"
        block = groups_doc[name]
        if not isinstance(block, dict):
            raise SchemaError(f"{path}: expected an object")
        if setting == "standard":
            groups[name] = _full_group(block, path)
        elif setting == "reduced":
            groups[name] = _reduced_group(block, path)
        else:
            groups[name] = _mortgage_group(block, path)
            acceptance[name] = _num(block, "acceptance", path)
            if not 0 <= acceptance[name] <= 1:
                raise SchemaError(f"{path}.acceptance: must lie in [0, 1]")
        if "counts" in block:
            cb = block["counts"]
            counts[name] = _wrap(path + ".counts", CountData, *(int(_num(cb, k, path + ".counts"))
                                                                for k in ("n11", "n01", "n0")))

    u = doc.get("utilities")
    if setting == "standard":
        u = _need(doc, "utilities", "$")
        utilities = _wrap("$.utilities", UtilityMatrix,
                          *(_num(u, k, "$.utilities") for k in ("u11", "u01", "u00", "u10")))
    elif setting == "reduced" or u is not None:
        u = _need(doc, "utilities", "$")
        utilities = _wrap("$.utilities", ReducedUtilityMatrix,
                          *(_num(u, k, "$.utilities") for k in ("u11", "u01", "u0")))
    else:
        utilities = None

    intervals = {}
    for name, block in (doc.get("intervals") or {}).items():
        path = f"$.intervals.{name}"
        if name not in groups:
            raise SchemaError(f"{path}: unknown group")
        iv = {}
        for key in ("p11", "pAccept"):
            pair = _need(block, key, path)
            if not (isinstance(pair, list) and len(pair) == 2):
                raise SchemaError(f"{path}.{key}: expected [lo, hi]")
            iv[key] = _wrap(f"{path}.{key}", ProbInterval, *pair)
        intervals[name] = _wrap(path, IntervalTable, iv["p11"], iv["pAccept"])

    return LoadedScenario(setting, names, groups, utilities, tau, acceptance, intervals, counts,
                          confidence, None, metadata)


def preset_names() -> list[str]:
    root = resources.files("utilfair") / "presets"
    return sorted(p.name[: -len(".scenario")] for p in root.iterdir() if p.name.endswith(".scenario"))


def read_scenario_document(source: Union[str, Path]) -> dict:
    """Read JSON from a path, or from a bundled preset when ``source`` names one."""
    path = Path(source)
    if not path.exists():
        name = str(source)
        name = name[: -len(".scenario")] if name.endswith(".scenario") else name
        preset = resources.files("utilfair") / "presets" / f"{name}.scenario"
        if not preset.is_file():
            raise FileNotFoundError(f"no such scenario file or preset: {source}")
        text = preset.read_text(encoding="utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"$: invalid JSON ({exc})") from exc


def load_scenario(source: Union[str, Path]) -> LoadedScenario:
    return parse_scenario(read_scenario_document(source))


# --- ingestion -------------------------------------------------------------

KNOWN_LABELS = {"standard": 0, "protected": 1, "0": 0, "1": 1}


@dataclass
class GroupCounts:
    n11: int = 0
    n01: int = 0
    n10: int = 0
    n00: int = 0
    n0_unknown: int = 0     # rejected with no observed outcome

    @property
    def total(self) -> int:
        return self.n11 + self.n01 + self.n10 + self.n00 + self.n0_unknown

    def count_data(self) -> CountData:
        return CountData(self.n11, self.n01, self.n10 + self.n00 + self.n0_unknown)


@dataclass
class IngestResult:
    setting: str                       # "standard" or "reduced"
    group_names: list[str]             # standard group first
    tables: dict[str, Any]
    counts: dict[str, GroupCounts]

    def count_data(self) -> dict[str, CountData]:
        return {k: v.count_data() for k, v in self.counts.items()}


def _binary(value: str, what: str, line: int) -> int:
    if value not in ("0", "1"):
        raise ValidationError(f"line {line}: {what} must be 0 or 1, got {value!r}")
    return int(value)


def ingest(csv_path: Union[str, Path], standard: Optional[str] = None,
           protected: Optional[list[str]] = None) -> IngestResult:
    """Count outcomes per group and turn them into maximum-likelihood tables.

    Without mapping flags the group column must use ``standard``/``protected``
    (or ``0``/``1``). With ``standard`` given, every other label is a protected
    group unless ``protected`` lists the allowed ones.
    """
    counts: dict[str, GroupCounts] = {}
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError("empty file")
        header = [h.strip() for h in header]
        if header != ["group", "y", "yhat"]:
            raise ValidationError(f"line 1: header must be group,y,yhat, got {','.join(header)}")
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ValidationError(f"line {line}: expected 3 fields, got {len(row)}")
            group, y, yhat = (c.strip() for c in row)
            if not group:
                raise ValidationError(f"line {line}: empty group label")
            if standard is None and group not in KNOWN_LABELS:
                raise ValidationError(
                    f"line {line}: unknown group label {group!r}; pass --standard/--protected to map labels"
                )
            if standard is not None and protected and group != standard and group not in protected:
                raise ValidationError(f"line {line}: group {group!r} is neither standard nor a listed protected group")
            yh = _binary(yhat, "yhat", line)
            g = counts.setdefault(group, GroupCounts())
            if y == "":
                if yh == 1:
                    raise ValidationError(f"line {line}: outcome y may only be missing for rejected rows")
                g.n0_unknown += 1
                continue
            yy = _binary(y, "y", line)
            attr = f"n{yy}{yh}"
            setattr(g, attr, getattr(g, attr) + 1)

    if not counts:
        raise ValidationError("no data rows")
    if len(counts) < 2:
        raise ValidationError(f"need at least two groups, found {sorted(counts)}")
    if standard is None:
        std_name = "standard" if "standard" in counts else "0"
        if std_name not in counts:
            raise ValidationError("no standard group rows found")
    else:
        if standard not in counts:
            raise ValidationError(f"standard group {standard!r} has no rows")
        std_name = standard
    names = [std_name] + [n for n in counts if n != std_name]

    reduced = any(c.n0_unknown for c in counts.values())
    tables = {}
    for name in names:
        c = counts[name]
        if reduced:
            tables[name] = ReducedJointTable.from_counts(c.n11, c.n01, c.n10 + c.n00 + c.n0_unknown)
        else:
            tables[name] = JointTable.from_counts(c.n11, c.n01, c.n10, c.n00)
    return IngestResult("reduced" if reduced else "standard", names, tables, counts)


def ingest_to_document(result: IngestResult, utilities: list[float], tau: float = 0.0,
                       metadata: Optional[dict] = None) -> dict:
    """Scenario document for ingested data; counts ride along for interval bounds."""
    groups = {}
    for name in result.group_names:
        t = result.tables[name]
        cd = result.counts[name].count_data()
        counts = {"n11": cd.n11, "n01": cd.n01, "n0": cd.n0}
        if result.setting == "standard":
            groups[name] = {"cells": t.cells, "counts": counts}
        else:
            groups[name] = {"p11": t.p11, "pAccept": t.p_accept, "counts": counts}
    if result.setting == "standard":
        if len(utilities) != 4:
            raise ValidationError("standard setting needs four utilities u11,u01,u00,u10")
        u = dict(zip(("u11", "u01", "u00", "u10"), map(float, utilities)))
    else:
        if len(utilities) != 3:
            raise ValidationError("reduced setting needs three utilities u11,u01,u0")
        u = dict(zip(("u11", "u01", "u0"), map(float, utilities)))
    doc = {"schemaVersion": SCHEMA_VERSION, "setting": result.setting,
           "standard": result.group_names[0], "groups": groups, "utilities": u, "tau": float(tau)}
    if metadata:
        doc["metadata"] = metadata
    return doc


def dump_json(obj: Any) -> str:
    """Canonical JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
