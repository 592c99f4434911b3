"""JSON formats for matrices, algebra specs and subspaces.

Matrix:   {"n": int, "rows": [[[re, im], ...], ...]}   (a bare number is a real entry)
Algebra:  {"n": int, "kind": "nest", "blocks": [...]}
          {"n": int, "kind": "span", "generators": [matrix, ...]}
Subspace: {"basis": [matrix, ...]}

Everything written carries a top-level ``"format": 1``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .algebra_core import DimensionError, MatrixAlgebra

FORMAT_VERSION = 1


class InputError(ValueError):
    """Malformed, schema-violating or dimension-inconsistent input."""


_ENTRY = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

MATRIX_SCHEMA = {
    "type": "object",
    "required": ["n", "rows"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "n": {"type": "integer", "minimum": 1},
        "rows": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _ENTRY}},
    },
}

ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["n", "kind"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "n": {"type": "integer", "minimum": 1},
        "kind": {"enum": ["nest", "span"]},
        "blocks": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "generators": {"type": "array", "minItems": 1, "items": MATRIX_SCHEMA},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "nest"}}}, "then": {"required": ["blocks"]}},
        {"if": {"properties": {"kind": {"const": "span"}}}, "then": {"required": ["generators"]}},
    ],
}

SUBSPACE_SCHEMA = {
    "type": "object",
    "required": ["basis"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "basis": {"type": "array", "items": MATRIX_SCHEMA},
    },
}


def _field_path(error: jsonschema.ValidationError) -> str:
    path = "$"
    for part in error.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def check_schema(obj, schema: dict, what: str = "input") -> None:
    validator = jsonschema.Draft202012Validator(schema)
    error = jsonschema.exceptions.best_match(validator.iter_errors(obj))
    if error is not None:
        raise InputError(f"{what}: schema violation at {_field_path(error)}: {error.message}")


def parse_json(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file: {exc.strerror}") from None
    return parse_json(text, str(path))


# -- matrices ---------------------------------------------------------------

def _entry(value) -> list[float]:
    z = complex(value)
    return [float(z.real), float(z.imag)]


def matrix_to_json(x) -> dict:
    x = np.asarray(x, dtype=complex)
    return {"n": int(x.shape[0]), "rows": [[_entry(v) for v in row] for row in x]}


def matrix_from_json(obj, where: str = "$") -> np.ndarray:
    check_schema(obj, MATRIX_SCHEMA, "matrix")
    n = obj["n"]
    rows = obj["rows"]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError(f"{where}: expected {n} rows of {n} entries")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = complex(v[0], v[1]) if isinstance(v, list) else complex(v)
    if not np.all(np.isfinite(out)):
        raise InputError(f"{where}: non-finite entry")
    return out


def load_matrix(path, n: int | None = None) -> np.ndarray:
    x = matrix_from_json(read_json(path), str(path))
    if n is not None and x.shape[0] != n:
        raise InputError(f"{path}: matrix is {x.shape[0]}x{x.shape[0]}, algebra needs n={n}")
    return x


# -- algebras ---------------------------------------------------------------

def algebra_from_json(obj, where: str = "$"):
    from .subalgebra import make_nest, make_span

    check_schema(obj, ALGEBRA_SCHEMA, "algebra")
    alg = MatrixAlgebra(obj["n"])
    if obj["kind"] == "nest":
        if sum(obj["blocks"]) != alg.n:
            raise InputError(f"{where}.blocks: block sizes sum to {sum(obj['blocks'])}, not n={alg.n}")
        return make_nest(alg, obj["blocks"])
    gens = []
    for k, g in enumerate(obj["generators"]):
        x = matrix_from_json(g, f"{where}.generators[{k}]")
        if x.shape[0] != alg.n:
            raise InputError(f"{where}.generators[{k}]: generator is {x.shape[0]}x{x.shape[0]}, n={alg.n}")
        gens.append(x)
    try:
        return make_span(alg, np.array(gens))
    except DimensionError as exc:
        raise InputError(f"{where}: {exc}") from None


def algebra_to_json(S) -> dict:
    if S.kind == "nest":
        return {"n": S.n, "kind": "nest", "blocks": list(S.block_sizes)}
    gens = S.generators if S.generators is not None else S.mats("A")
    return {"n": S.n, "kind": "span", "generators": [matrix_to_json(g) for g in gens]}


def load_algebra(path):
    return algebra_from_json(read_json(path), str(path))


# -- subspaces --------------------------------------------------------------

def subspace_from_json(obj, alg: MatrixAlgebra, where: str = "$"):
    """Reads a spanning set and orthonormalizes it."""
    from .invariant_subspaces import Subspace

    check_schema(obj, SUBSPACE_SCHEMA, "subspace")
    mats = []
    for k, m in enumerate(obj["basis"]):
        x = matrix_from_json(m, f"{where}.basis[{k}]")
        if x.shape[0] != alg.n:
            raise InputError(f"{where}.basis[{k}]: element is {x.shape[0]}x{x.shape[0]}, n={alg.n}")
        mats.append(x)
    return Subspace.span(alg, np.array(mats).reshape(-1, alg.n, alg.n))


def subspace_to_json(W) -> dict:
    return {"basis": [matrix_to_json(b) for b in W.basis]}


def load_subspace(path, alg: MatrixAlgebra):
    return subspace_from_json(read_json(path), alg, str(path))


# -- output -----------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, complex):
        return _entry(obj)
    return obj


def dumps(obj: dict) -> str:
    """Deterministic JSON text: sorted keys, finite floats, versioned."""
    payload = _plain(dict(obj))
    payload["format"] = FORMAT_VERSION
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False)
