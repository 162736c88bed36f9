"""JSON reports: construction, schema validation and atomic file output."""

from __future__ import annotations

import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import jsonschema

from .bounds import Bound, OConstants

# Python 3.10 caps int -> str conversion at 4300 digits by default
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

SCHEMA_VERSION = 1
_SAFE_INT = 1 << 53

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "mode", "inputs", "o_constants", "trace", "timestamp"],
    "allOf": [
        {
            "if": {"properties": {"mode": {"enum": ["bound", "verify"]}}},
            "then": {"required": ["theorem", "value"]},
        },
        {
            "if": {"properties": {"mode": {"const": "construct"}}},
            "then": {"required": ["construction"]},
        },
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "mode": {"enum": ["bound", "verify", "construct"]},
        "job": {"type": "string"},
        "theorem": {"type": "string", "minLength": 1},
        "inputs": {"type": "object"},
        "o_constants": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 1},
        },
        "value": {"type": "string", "pattern": "^[0-9]+$"},
        "trace": {"type": "array", "items": {"type": "string"}},
        "timestamp": {"type": "string"},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "verification": {
            "type": "object",
            "required": ["betti", "betti_sum", "bound", "passed"],
            "properties": {
                "betti": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "betti_sum": {"type": "integer", "minimum": 0},
                "bound": {"type": "string", "pattern": "^[0-9]+$"},
                "passed": {"type": "boolean"},
            },
        },
        "construction": {
            "type": "object",
            "required": ["schedule", "rows"],
            "properties": {
                "rows": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["label", "original", "constructed", "equal"],
                    },
                }
            },
        },
    },
    "additionalProperties": False,
}


def jsonable(value):
    """Convert to JSON-safe values; big integers and rationals become strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value if -_SAFE_INT < value < _SAFE_INT else str(value)
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "value") and hasattr(value, "name"):  # enums
        return jsonable(value.value)
    return str(value)


def timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def bound_report(
    bound: Bound, mode: str = "bound", job: str | None = None, consts: OConstants | None = None, **extra
) -> dict:
    consts_out = (consts or OConstants()).as_dict()
    consts_out.update(bound.o_constants)
    report = {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "theorem": bound.theorem,
        "inputs": jsonable(bound.inputs),
        "o_constants": consts_out,
        "value": str(bound.value),
        "trace": [str(t) for t in bound.trace],
        "timestamp": timestamp(),
    }
    if job is not None:
        report["job"] = job
    for k, v in extra.items():
        if v is not None:
            report[k] = jsonable(v)
    validate_report(report)
    return report


def construction_report(inputs: dict, construction: dict, job: str | None = None, trace=(), warnings=()) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "mode": "construct",
        "inputs": jsonable(inputs),
        "o_constants": OConstants().as_dict(),
        "construction": jsonable(construction),
        "trace": [str(t) for t in trace],
        "timestamp": timestamp(),
    }
    if job is not None:
        report["job"] = job
    if warnings:
        report["warnings"] = [str(w) for w in warnings]
    validate_report(report)
    return report


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(path, report: dict) -> None:
    atomic_write_bytes(path, dumps(report).encode("utf-8"))
