"""JSON encoding of spaces, frames, perturbations and reports.

Input documents are validated against the schemas below before any numerics
run.  Output is deterministic: sorted keys, fixed indentation, and non-finite
floats spelled as the strings "inf" / "-inf" / "nan" (JSON has no literal).
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import jsonschema

NUMBER_ARRAY = {"type": "array", "items": {"type": "number"}, "minItems": 1}
EXPONENT = {"oneOf": [{"type": "number", "minimum": 1}, {"enum": ["inf", "Infinity", "infinity"]}]}
BOUND = {
    "type": "object",
    "required": ["lower", "upper", "exact"],
    "properties": {
        "lower": {"type": "number"},
        "upper": {"oneOf": [{"type": "number"}, {"const": "inf"}]},
        "exact": {"type": "boolean"},
    },
}

SPACE_SCHEMA = {
    "type": "object",
    "required": ["dim", "p"],
    "properties": {"dim": {"type": "integer", "minimum": 1}, "p": EXPONENT},
}

FRAME_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "frame",
    "type": "object",
    "required": ["space", "pairs"],
    "properties": {
        "space": SPACE_SCHEMA,
        "pairs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["a", "b"],
                "properties": {"a": NUMBER_ARRAY, "b": NUMBER_ARRAY},
            },
        },
    },
}

PERTURBATION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "perturbation",
    "type": "object",
    "required": ["base", "candidate"],
    "properties": {
        "base": FRAME_SCHEMA,
        "candidate": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["x", "y"],
                "properties": {"x": NUMBER_ARRAY, "y": NUMBER_ARRAY},
            },
        },
    },
}

SUBSPACE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "subspace basis",
    "oneOf": [
        {"type": "array", "items": NUMBER_ARRAY, "minItems": 1},
        {
            "type": "object",
            "required": ["basis"],
            "properties": {"basis": {"type": "array", "items": NUMBER_ARRAY, "minItems": 1}},
        },
    ],
}

CRITERION_SCHEMA = {
    "type": "object",
    "required": ["criterion", "value", "satisfied", "margin"],
    "properties": {
        "criterion": {"enum": ["thm31", "cor34", "thm33", "cor35", "cor36"]},
        "value": BOUND,
        "satisfied": {"type": "boolean"},
    },
}

CERTIFICATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "perturbation certificate",
    "type": "object",
    "required": ["criterion", "value", "certified", "status", "contraction", "T", "R",
                 "inverse_error", "frame_xz", "frame_wy", "residual_xz", "residual_wy"],
    "properties": {
        "value": BOUND,
        "status": {"enum": ["CERTIFIED", "UNCERTIFIED"]},
        "T": {"type": "array", "items": NUMBER_ARRAY},
        "R": {"type": "array", "items": NUMBER_ARRAY},
        "inverse_error": {"type": "number", "minimum": 0},
        "frame_xz": FRAME_SCHEMA,
        "frame_wy": FRAME_SCHEMA,
    },
}

CONSTANTS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "frame constants report",
    "type": "object",
    "required": ["K", "L", "residual"],
    "properties": {"K": BOUND, "L": BOUND, "residual": {"type": "number"}},
}

DIMENSION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dimension certificate",
    "type": "object",
    "required": ["N", "tail", "method", "valid"],
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "tail": BOUND,
        "method": {"enum": ["cor37a", "cor37b", "remark38"]},
        "valid": {"type": "boolean"},
    },
}

CONSTRUCTION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "construction report",
    "type": "object",
    "required": ["criterion", "t", "weighted_sum", "target_sum", "frames", "spans", "ok"],
    "properties": {
        "criterion": CRITERION_SCHEMA,
        "frames": CERTIFICATE_SCHEMA,
        "spans": {"type": "object"},
        "ok": {"type": "boolean"},
    },
}


class InputError(ValueError):
    """Malformed or schema-violating input; the message carries the location."""


def _clean(obj: Any) -> Any:
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):            # numpy scalars
        return _clean(obj.item())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text: str, schema: dict | None = None, source: str = "<input>") -> Any:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if schema is not None:
        validate(data, schema, source)
    return data


def validate(data: Any, schema: dict, source: str = "<input>") -> None:
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise InputError(f"{source}: schema violation at {where}: {exc.message}") from exc


def load(path: str | Path, schema: dict | None = None) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    return loads(text, schema, str(path))
