"""Manifest files: a JSON document naming a model, sample points and suites.

Example::

    {
      "model": {"kind": "conformal", "n": 2,
                "base": {"kind": "flat", "n": 2},
                "factor": [{"exponents": [0,0,0,0,0,0,0,0], "coeff": 1.0},
                           {"exponents": [1,0,0,0,0,0,0,0], "coeff": 0.1}]},
      "sampling": {"count": 25, "seed": 0, "region": 0.5},
      "suites": ["algebra", "connections"],
      "tolerances": {"eq.z5": 1e-10}
    }

Polynomials are lists of ``{"exponents": [...], "coeff": c}`` terms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .catalog import DEFAULT_POINTS, DEFAULT_REGION, DEFAULT_SEED, KINDS, model_from_spec
from .errors import ManifestError, PQKTError

SUITES = ("algebra", "connections", "forms", "conformal", "curvature", "parallel-torsion")

_TERM = {
    "type": "object",
    "required": ["exponents", "coeff"],
    "additionalProperties": False,
    "properties": {
        "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "coeff": {"type": "number"},
    },
}
_POLY = {"type": "array", "items": _TERM}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["kind", "n"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "n": {"type": "integer", "minimum": 1, "maximum": 4},
        "frame": {"type": "array", "items": {"type": "array", "items": _POLY}},
        "map": {"type": "array", "items": _POLY},
        "factor": _POLY,
        "base": {"$ref": "#/definitions/model"},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "frame-deformed"}}}, "then": {"required": ["frame"]}},
        {"if": {"properties": {"kind": {"const": "diffeo-pushforward"}}}, "then": {"required": ["map"]}},
        {"if": {"properties": {"kind": {"const": "conformal"}}}, "then": {"required": ["base", "factor"]}},
    ],
}

SCHEMA = {
    "type": "object",
    "required": ["model"],
    "additionalProperties": False,
    "definitions": {"model": MODEL_SCHEMA},
    "properties": {
        "model": {"$ref": "#/definitions/model"},
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "region": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "suites": {"type": "array", "items": {"enum": list(SUITES)}, "uniqueItems": True},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "transport_factor": _POLY,
    },
}


@dataclass
class Manifest:
    model: dict
    count: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    region: float = DEFAULT_REGION
    suites: tuple = SUITES
    tolerances: dict = field(default_factory=dict)
    transport_factor: list | None = None

    def to_dict(self):
        out = {
            "model": self.model,
            "sampling": {"count": self.count, "seed": self.seed, "region": self.region},
            "suites": list(self.suites),
            "tolerances": dict(self.tolerances),
        }
        if self.transport_factor is not None:
            out["transport_factor"] = self.transport_factor
        return out

    def build_model(self, points=None):
        return model_from_spec(self.model, points=points)


def _where(err: jsonschema.ValidationError):
    path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return "$" + path


def _check_dims(model, where="$.model"):
    m = 4 * model["n"]
    for key in ("factor",):
        for i, term in enumerate(model.get(key, [])):
            if len(term["exponents"]) != m:
                raise ManifestError(f"exponent vector has length {len(term['exponents'])}, expected {m}",
                                    f"{where}.{key}[{i}].exponents")
    if "frame" in model:
        rows = model["frame"]
        if len(rows) != m or any(len(r) != m for r in rows):
            raise ManifestError(f"frame must be a {m} x {m} matrix of polynomials", f"{where}.frame")
        for i, row in enumerate(rows):
            for j, poly in enumerate(row):
                for k, term in enumerate(poly):
                    if len(term["exponents"]) != m:
                        raise ManifestError(f"exponent vector has length {len(term['exponents'])}, expected {m}",
                                            f"{where}.frame[{i}][{j}][{k}].exponents")
    if "map" in model:
        if len(model["map"]) != m:
            raise ManifestError(f"map needs {m} component polynomials", f"{where}.map")
        for i, poly in enumerate(model["map"]):
            for k, term in enumerate(poly):
                if len(term["exponents"]) != m:
                    raise ManifestError(f"exponent vector has length {len(term['exponents'])}, expected {m}",
                                        f"{where}.map[{i}][{k}].exponents")
    if "base" in model:
        if model["base"]["n"] != model["n"]:
            raise ManifestError("conformal base has a different n", f"{where}.base.n")
        _check_dims(model["base"], f"{where}.base")


def parse_manifest(data) -> Manifest:
    """Validate a decoded manifest; errors carry a JSON path."""
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ManifestError(err.message, _where(err))
    _check_dims(data["model"])
    if "transport_factor" in data:
        m = 4 * data["model"]["n"]
        for i, term in enumerate(data["transport_factor"]):
            if len(term["exponents"]) != m:
                raise ManifestError(f"exponent vector has length {len(term['exponents'])}, expected {m}",
                                    f"$.transport_factor[{i}].exponents")
    s = data.get("sampling", {})
    return Manifest(
        model=data["model"],
        count=s.get("count", DEFAULT_POINTS),
        seed=s.get("seed", DEFAULT_SEED),
        region=float(s.get("region", DEFAULT_REGION)),
        suites=tuple(data.get("suites", SUITES)),
        tolerances=dict(data.get("tolerances", {})),
        transport_factor=data.get("transport_factor"),
    )


def loads(text) -> Manifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    return parse_manifest(data)


def load(path) -> Manifest:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ManifestError(str(exc), str(path)) from exc
    return loads(text)


def check_buildable(manifest: Manifest, points):
    """Construct the model, turning construction failures into ``ManifestError``."""
    try:
        return manifest.build_model(points)
    except ManifestError:
        raise
    except PQKTError as exc:
        raise ManifestError(str(exc), "$.model") from exc
