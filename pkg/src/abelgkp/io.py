"""JSON documents: lattice, period matrix, code and stabilizer schemas, plus reports."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import numpy as np
from jsonschema import Draft202012Validator

from .concat import StabilizerSpec
from .errors import SchemaError
from .gkpcode import GkpCode, PauliElement, Semicharacter, parse_turns
from .symplattice import GkpLattice, lattice_from_basis, lattice_from_period_matrix

REPORT_SCHEMA = "gkp-report/v1"

_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": {"type": "number"}}}
_turns = {"anyOf": [{"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}, {"type": "integer"}]}

LATTICE_SCHEMA = {
    "type": "object",
    "required": ["schema", "n", "basis"],
    "properties": {
        "schema": {"const": "gkp-lattice/v1"},
        "n": {"type": "integer", "minimum": 1},
        "basis": _matrix,
        "layout": {"const": "interleaved"},
    },
}

PERIOD_SCHEMA = {
    "type": "object",
    "required": ["schema", "omega_re", "omega_im", "type"],
    "properties": {
        "schema": {"const": "gkp-period/v1"},
        "omega_re": _matrix,
        "omega_im": _matrix,
        "type": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
    },
}

CODE_SCHEMA = {
    "type": "object",
    "required": ["schema", "lattice"],
    "properties": {
        "schema": {"const": "gkp-code/v1"},
        "lattice": {"anyOf": [LATTICE_SCHEMA, PERIOD_SCHEMA]},
        "nu": {"anyOf": [
            {"type": "object", "required": ["kind"], "properties": {"kind": {"const": "standard"}}},
            {"type": "object", "required": ["kind", "turns"],
             "properties": {"kind": {"const": "phases"}, "turns": {"type": "array", "items": _turns}}},
        ]},
    },
}

STAB_SCHEMA = {
    "type": "object",
    "required": ["schema", "generators"],
    "properties": {
        "schema": {"const": "gkp-stab/v1"},
        "generators": {"type": "array", "items": {
            "type": "object",
            "required": ["mu_dual_coords", "alpha_turns"],
            "properties": {
                "mu_dual_coords": {"type": "array", "items": {"type": "integer"}},
                "alpha_turns": _turns,
            },
        }},
    },
}

_SCHEMAS = {
    "gkp-lattice/v1": LATTICE_SCHEMA,
    "gkp-period/v1": PERIOD_SCHEMA,
    "gkp-code/v1": CODE_SCHEMA,
    "gkp-stab/v1": STAB_SCHEMA,
}


def _where(path) -> str:
    parts = [str(p) for p in path]
    return "/".join(parts) if parts else "<root>"


def validate_document(doc: Any) -> str:
    """Check a parsed document against its declared schema; returns the schema id."""
    if isinstance(doc, list):
        raise SchemaError("<root>: expected an object with a 'schema' field")
    if not isinstance(doc, dict) or "schema" not in doc:
        raise SchemaError("<root>: missing 'schema' field")
    sid = doc["schema"]
    if sid not in _SCHEMAS:
        raise SchemaError(f"schema: unsupported schema {sid!r}")
    errors = sorted(Draft202012Validator(_SCHEMAS[sid]).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        raise SchemaError(f"{_where(e.absolute_path)}: {e.message}")
    return sid


def parse_text(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_document(path: Union[str, Path]) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SchemaError(f"{p}: cannot read file ({exc.strerror})") from exc
    return parse_text(text, str(p))


def _lattice_from_doc(doc: dict, where: str) -> GkpLattice:
    if doc["schema"] == "gkp-lattice/v1":
        n = doc["n"]
        rows = doc["basis"]
        if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
            raise SchemaError(f"{where}basis: expected a {2 * n}x{2 * n} matrix for n = {n}")
        return lattice_from_basis(np.array(rows, dtype=float))
    re_, im_ = np.array(doc["omega_re"], dtype=float), np.array(doc["omega_im"], dtype=float)
    if re_.shape != im_.shape or re_.ndim != 2 or re_.shape[0] != re_.shape[1]:
        raise SchemaError(f"{where}omega_re/omega_im: expected square matrices of equal size")
    if len(doc["type"]) != re_.shape[0]:
        raise SchemaError(f"{where}type: expected {re_.shape[0]} divisors")
    try:
        return lattice_from_period_matrix(re_ + 1j * im_, doc["type"])
    except ValueError as exc:
        if isinstance(exc, SchemaError) or type(exc) is not ValueError:
            raise
        raise SchemaError(f"{where}type: {exc}") from exc


def code_from_document(doc: Any) -> GkpCode:
    sid = validate_document(doc)
    if sid in ("gkp-lattice/v1", "gkp-period/v1"):
        return GkpCode.from_lattice(_lattice_from_doc(doc, ""))
    if sid != "gkp-code/v1":
        raise SchemaError(f"schema: expected a lattice, period or code document, got {sid!r}")
    lat = _lattice_from_doc(doc["lattice"], "lattice/")
    nu = doc.get("nu", {"kind": "standard"})
    if nu["kind"] == "standard":
        return GkpCode.from_lattice(lat)
    turns = nu["turns"]
    if len(turns) != lat.dim:
        raise SchemaError(f"nu/turns: expected {lat.dim} entries, got {len(turns)}")
    return GkpCode.from_lattice(lat, Semicharacter(tuple(parse_turns(t) for t in turns)))


def turns_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lattice_document(lat: GkpLattice) -> dict:
    return {"schema": "gkp-lattice/v1", "n": lat.n, "layout": "interleaved",
            "basis": [[float(x) for x in row] for row in lat.basis]}


def code_document(code: GkpCode) -> dict:
    nu = ({"kind": "standard"} if code.nu.is_standard()
          else {"kind": "phases", "turns": [turns_str(t) for t in code.nu.base_phases]})
    return {"schema": "gkp-code/v1", "lattice": lattice_document(code.lattice), "nu": nu}


def stabilizer_from_document(doc: Any, code: GkpCode) -> StabilizerSpec:
    if isinstance(doc, list):
        doc = {"schema": "gkp-stab/v1", "generators": doc}
    validate_document(doc)
    if doc["schema"] != "gkp-stab/v1":
        raise SchemaError("schema: expected gkp-stab/v1")
    gens = []
    for i, g in enumerate(doc["generators"]):
        if len(g["mu_dual_coords"]) != code.lattice.dim:
            raise SchemaError(f"generators/{i}/mu_dual_coords: expected {code.lattice.dim} integers")
        gens.append(PauliElement(tuple(g["mu_dual_coords"]), parse_turns(g["alpha_turns"])))
    return StabilizerSpec(tuple(gens))


def stabilizer_document(stab: StabilizerSpec) -> dict:
    return {"schema": "gkp-stab/v1", "generators": [
        {"mu_dual_coords": list(g.mu), "alpha_turns": turns_str(g.alpha)} for g in stab.generators]}


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), allow_nan=False)
