"""Versioned JSON file formats.

Every file carries ``"schema": "trace-lab/1"``. Floats are written with
Python's shortest round-trip representation, so ``load(save(x)) == x``
bit for bit. Schema violations raise :class:`SchemaError` with the JSON
pointer of the offending element.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .core import Metric, PointSet, Weight
from .divdiff import ValuedSet
from .errors import DomainError, SchemaError

SCHEMA = "trace-lab/1"

_NUM = {"type": "number"}
_CPLX = {
    "type": "object",
    "properties": {"re": _NUM, "im": _NUM},
    "required": ["re", "im"],
    "additionalProperties": False,
}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_INDEX_LISTS = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}

SET_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA},
        "metric": {"enum": ["plane", "disk"]},
        "points": {"type": "array", "items": _CPLX},
        "values": {"type": "array", "items": _CPLX},
        "labels": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    "required": ["schema", "metric", "points"],
}

WEIGHT_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["log_one_plus_sq", "power_abs", "nonisotropic", "korenblum", "custom-table"]},
        "params": {"type": "object"},
        "K": {"type": "number", "exclusiveMinimum": 0},
        "D0": {"type": "number", "minimum": 1},
        "E0": {"type": "number", "minimum": 0},
        "metric": {"enum": ["plane", "disk"]},
        "r0": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind", "K", "D0", "E0", "metric", "r0"],
}

PARTS_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA},
        "parts": _INDEX_LISTS,
        "eps_prime": _NUM,
        "C_prime": _NUM,
        "set": SET_SCHEMA,
    },
    "required": ["schema", "parts", "eps_prime", "C_prime"],
}

COVER_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA},
        "centers": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "radii": {"type": "array", "items": _NUM},
        "constants": {
            "type": "object",
            "properties": {k: _NUM for k in ("a", "b", "B1", "B2", "eps", "C")},
            "required": ["a", "b", "B1", "B2", "eps", "C"],
        },
        "parts": _INDEX_LISTS,
        "trace": {"type": "array"},
        "set": SET_SCHEMA,
    },
    "required": ["schema", "centers", "radii", "constants", "parts"],
}

CLUSTERS_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA},
        "metric": {"enum": ["plane", "disk"]},
        "C": _NUM,
        "clusters": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"center": _PAIR, "satellites": {"type": "array", "items": _PAIR},
                               "scale": _NUM},
                "required": ["center", "satellites", "scale"],
            },
        },
    },
    "required": ["schema", "clusters"],
}

SCHEMAS = {"set": SET_SCHEMA, "weight": WEIGHT_SCHEMA, "parts": PARTS_SCHEMA,
           "cover": COVER_SCHEMA, "clusters": CLUSTERS_SCHEMA}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def validate(data, kind: str) -> None:
    """Validate ``data`` against the named schema."""
    v = jsonschema.Draft202012Validator(SCHEMAS[kind])
    err = jsonschema.exceptions.best_match(v.iter_errors(data))
    if err is not None:
        raise SchemaError(err.message, _pointer(err.absolute_path) or "/")


def validate_weight_json(data) -> None:
    validate(data, "weight")


# -- serialisation ----------------------------------------------------------------


def _clean(obj):
    """Convert numpy scalars and arrays; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text (shortest round-trip floats, trailing newline)."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


# -- set files --------------------------------------------------------------------


@dataclass
class SetFile:
    points: PointSet
    values: np.ndarray | None = None
    labels: list | None = None

    @property
    def valued(self) -> ValuedSet:
        if self.values is None:
            raise SchemaError("file has no values", "/values")
        return ValuedSet(self.points, self.values)

    def to_json(self) -> dict:
        out = {"schema": SCHEMA, "metric": self.points.metric.value,
               "points": [_cplx(z) for z in self.points.points]}
        if self.values is not None:
            out["values"] = [_cplx(v) for v in self.values]
        if self.labels is not None:
            out["labels"] = [int(x) for x in self.labels]
        return out

    def parts(self) -> list | None:
        if self.labels is None:
            return None
        k = max(self.labels, default=-1) + 1
        return [[i for i, l in enumerate(self.labels) if l == j] for j in range(k)]


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def setfile_from_json(data) -> SetFile:
    validate(data, "set")
    pts = np.array([complex(p["re"], p["im"]) for p in data["points"]], dtype=complex)
    try:
        ps = PointSet(pts, Metric.parse(data["metric"]))
    except DomainError as exc:
        raise SchemaError(str(exc), "/points") from None
    vals = None
    if "values" in data:
        if len(data["values"]) != len(pts):
            raise SchemaError(f"{len(data['values'])} values for {len(pts)} points", "/values")
        vals = np.array([complex(v["re"], v["im"]) for v in data["values"]], dtype=complex)
    labels = data.get("labels")
    if labels is not None and len(labels) != len(pts):
        raise SchemaError(f"{len(labels)} labels for {len(pts)} points", "/labels")
    return SetFile(ps, vals, labels)


def load_set(path) -> SetFile:
    return setfile_from_json(read_json(path))


def save_set(path, sf: SetFile) -> None:
    write_json(path, sf.to_json())


def load_weight(spec) -> Weight:
    """A weight from a kind name (default constants) or a JSON file path."""
    if isinstance(spec, Weight):
        return spec
    p = Path(str(spec))
    if p.suffix == ".json" or p.exists():
        data = read_json(p)
        try:
            return Weight.from_json(data)
        except (TypeError, KeyError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(str(exc)) from None
    kind, _, arg = str(spec).partition(":")
    params = {"a": float(arg)} if kind == "power_abs" and arg else {}
    try:
        return Weight.make(kind, params=params) if params else Weight.make(kind)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from None


def load_checked(path, kind: str) -> dict:
    data = read_json(path)
    validate(data, kind)
    return data
