"""Machine-readable reports.

JSON output is a single document with sorted keys and every float written
with 17 significant digits, so a report read back compares equal to the
one written. Report bytes depend only on the experiment configuration;
wall time is emitted only on request.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .hidden import CONTEXT_LABELS, ChshReport
from .quantum import LHV_BOUND, QUANTUM_TARGET


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k), ensure_ascii=False) + ": " + _encode(obj[k], indent, level + 1)
                 for k in sorted(obj, key=str)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def chsh_document(report: ChshReport, config: dict, wall_time_ms: float | None = None) -> dict:
    doc = {
        "command": "chsh",
        "config": config,
        "correlations": {
            label: {
                "E": est.value,
                "std_error": est.std_error,
                "n": None if report.exact else est.n,
            }
            for label, est in report.correlations.items()
        },
        "I": report.value,
        "I_std_error": report.std_error,
        "bound": LHV_BOUND,
        "quantum_target": QUANTUM_TARGET,
        "exceeds_bound": report.value > LHV_BOUND,
        "delta_quantum_target": report.value - QUANTUM_TARGET,
        "errors_correlated": report.sampling == "shared",
        "exact": report.exact,
    }
    if report.disjoint is not None:
        doc["disjointness_certificate"] = report.disjoint
    if wall_time_ms is not None:
        doc["wall_time_ms"] = wall_time_ms
    return doc


def chsh_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["context", "E", "std_error", "n"])
    total = 0
    for label in CONTEXT_LABELS:
        c = doc["correlations"][label]
        n = "" if c["n"] is None else c["n"]
        total += c["n"] or 0
        w.writerow([label, _float(c["E"]), _float(c["std_error"]), n])
    if doc["config"]["sampling"] == "shared" and not doc["exact"]:
        total = doc["config"]["samples"]
    w.writerow(["I", _float(doc["I"]), _float(doc["I_std_error"]), total or ""])
    return buf.getvalue()


def emit_report(doc: dict, fmt: str = "json", path: str | Path | None = None) -> str:
    """Render ``doc`` and write it to ``path`` (if given); returns the text."""
    if fmt == "json":
        text = dumps(doc)
    elif fmt == "csv":
        if doc.get("command") != "chsh":
            raise ValueError("CSV output is only defined for chsh reports")
        text = chsh_csv(doc)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# ------------------------------------------------------------------ schemas

_NUM = {"type": "number"}
_ESTIMATE = {
    "type": "object",
    "required": ["E", "std_error", "n"],
    "additionalProperties": False,
    "properties": {
        "E": {"type": "number", "minimum": -0.25, "maximum": 0.25},
        "std_error": {"type": "number", "minimum": 0},
        "n": {"type": ["integer", "null"], "minimum": 1},
    },
}

CHSH_SCHEMA = {
    "type": "object",
    "required": ["command", "config", "correlations", "I", "I_std_error", "bound",
                 "quantum_target", "exceeds_bound", "delta_quantum_target",
                 "errors_correlated", "exact"],
    "additionalProperties": False,
    "properties": {
        "command": {"const": "chsh"},
        "config": {
            "type": "object",
            "required": ["model", "sampling", "angles", "samples", "seed"],
            "additionalProperties": False,
            "properties": {
                "model": {"enum": ["quantum", "lhv-sign", "contextual"]},
                "sampling": {"enum": ["shared", "per-context"]},
                "angles": {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
                "samples": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
            },
        },
        "correlations": {
            "type": "object",
            "required": list(CONTEXT_LABELS),
            "additionalProperties": False,
            "properties": {k: _ESTIMATE for k in CONTEXT_LABELS},
        },
        "I": {"type": "number", "minimum": 0},
        "I_std_error": {"type": "number", "minimum": 0},
        "bound": {"const": LHV_BOUND},
        "quantum_target": _NUM,
        "exceeds_bound": {"type": "boolean"},
        "delta_quantum_target": _NUM,
        "errors_correlated": {"type": "boolean"},
        "exact": {"type": "boolean"},
        "disjointness_certificate": {"type": "boolean"},
        "wall_time_ms": {"type": "number", "minimum": 0},
    },
}

_EVENT = {
    "type": "object",
    "required": ["members", "tags"],
    "additionalProperties": False,
    "properties": {
        "members": {"type": "array", "items": {"type": "integer"}},
        "tags": {"type": "array", "items": {"type": "string"}},
    },
}

ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["command", "space_size", "atoms", "n_events", "events", "closure_verified"],
    "additionalProperties": False,
    "properties": {
        "command": {"const": "algebra"},
        "space_size": {"type": "integer", "minimum": 1},
        "atoms": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "n_events": {"type": "integer", "minimum": 2},
        "events": {"type": "array", "items": _EVENT},
        "closure_verified": {"type": "boolean"},
        "measure": {
            "type": "object",
            "required": ["ok", "checks", "failures", "atom_weights"],
            "properties": {
                "ok": {"type": "boolean"},
                "checks": {"type": "integer"},
                "failures": {"type": "array"},
                "atom_weights": {"type": "array", "items": {"type": "string"}},
            },
        },
        "admissibility": {
            "type": "object",
            "required": ["admissible", "offending"],
            "additionalProperties": False,
            "properties": {
                "admissible": {"type": "boolean"},
                "offending": {"type": "array", "items": _EVENT},
            },
        },
    },
}

KS_SCHEMA = {
    "type": "object",
    "required": ["command", "satisfiable", "assignment", "n_directions", "n_triads"],
    "additionalProperties": False,
    "properties": {
        "command": {"const": "ks"},
        "satisfiable": {"type": "boolean"},
        "assignment": {
            "type": ["object", "null"],
            "additionalProperties": {"enum": [0, 1]},
        },
        "n_directions": {"type": "integer", "minimum": 0},
        "n_triads": {"type": "integer", "minimum": 0},
    },
}

SPIN1_SCHEMA = {
    "type": "object",
    "required": ["command", "config", "agreement", "std_error", "n", "agreements", "expected"],
    "additionalProperties": False,
    "properties": {
        "command": {"const": "spin1"},
        "config": {
            "type": "object",
            "required": ["flip_prob", "p_one", "samples", "seed"],
            "additionalProperties": False,
            "properties": {
                "flip_prob": {"type": "number", "minimum": 0, "maximum": 1},
                "p_one": {"type": "number", "minimum": 0, "maximum": 1},
                "samples": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "agreement": {"type": "number", "minimum": 0, "maximum": 1},
        "std_error": {"type": "number", "minimum": 0},
        "n": {"type": "integer", "minimum": 1},
        "agreements": {"type": "integer", "minimum": 0},
        "expected": {"type": "number"},
        "wall_time_ms": {"type": "number", "minimum": 0},
    },
}

SCHEMAS = {"chsh": CHSH_SCHEMA, "algebra": ALGEBRA_SCHEMA, "ks": KS_SCHEMA, "spin1": SPIN1_SCHEMA}
