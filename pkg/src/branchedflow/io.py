"""JSON documents for chains, forms, decompositions, graph problems and solutions.

Floats are written with ``repr`` precision, which round-trips every double
exactly.  Every reader validates its document against a JSON Schema before
building objects, and reports the offending field on failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .calibration import ConstantForm
from .chains import PolyChain, ZeroChain
from .decompose import PathDecomposition
from .norms import DEFAULT_TOL, AlphaParam, DimensionError
from .solver import FlowProblem, FlowSolution


class SchemaError(ValueError):
    def __init__(self, message: str, field: str = ""):
        super().__init__(message)
        self.field = field


_VEC = {"type": "array", "items": {"type": "number"}}
_ALPHA = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_POS_INT = {"type": "integer", "minimum": 1}

CHAIN_SCHEMA = {
    "type": "object",
    "required": ["dim", "n", "alpha", "pieces"],
    "properties": {
        "dim": _POS_INT,
        "n": _POS_INT,
        "alpha": _ALPHA,
        "pieces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["p", "q", "theta"],
                "properties": {"p": _VEC, "q": _VEC, "theta": _VEC},
            },
        },
    },
}

ZEROCHAIN_SCHEMA = {
    "type": "object",
    "required": ["dim", "n", "alpha", "atoms"],
    "properties": {
        "dim": _POS_INT,
        "n": _POS_INT,
        "alpha": _ALPHA,
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["x", "eta"],
                "properties": {"x": _VEC, "eta": _VEC},
            },
        },
    },
}

FORM_SCHEMA = {
    "type": "object",
    "required": ["dim", "n", "alpha", "matrix"],
    "properties": {
        "dim": _POS_INT,
        "n": _POS_INT,
        "alpha": _ALPHA,
        "matrix": {"type": "array", "minItems": 1, "items": _VEC},
    },
}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["alpha", "n", "nodes", "edges", "boundary"],
    "properties": {
        "alpha": _ALPHA,
        "n": _POS_INT,
        "nodes": {"type": "array", "minItems": 1, "items": _VEC},
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["u", "v"],
                "properties": {
                    "u": {"type": "integer", "minimum": 0},
                    "v": {"type": "integer", "minimum": 0},
                    "len": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "boundary": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node", "eta"],
                "properties": {"node": {"type": "integer", "minimum": 0}, "eta": _VEC},
            },
        },
    },
}

SCHEMAS = {
    "chain": CHAIN_SCHEMA,
    "zerochain": ZEROCHAIN_SCHEMA,
    "form": FORM_SCHEMA,
    "problem": PROBLEM_SCHEMA,
}


def validate(doc, kind: str) -> None:
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{kind} document invalid at {where}: {exc.message}", where) from None


def _require_len(values, size: int, where: str) -> None:
    if len(values) != size:
        raise SchemaError(f"{where} has length {len(values)}, expected {size}", where)


# ---------------------------------------------------------------------------
# chains


def chain_to_json(z: PolyChain) -> dict:
    return {
        "dim": z.dim,
        "n": z.n,
        "alpha": z.alpha,
        "pieces": [
            {"p": p.tolist(), "q": q.tolist(), "theta": t.tolist()}
            for p, q, t in zip(z.starts, z.ends, z.theta)
        ],
    }


def chain_from_json(doc: dict, tol: float = DEFAULT_TOL) -> PolyChain:
    validate(doc, "chain")
    d, n = doc["dim"], doc["n"]
    a = AlphaParam(doc["alpha"], n)
    pieces = doc["pieces"]
    for i, pc in enumerate(pieces):
        _require_len(pc["p"], d, f"pieces/{i}/p")
        _require_len(pc["q"], d, f"pieces/{i}/q")
        _require_len(pc["theta"], n, f"pieces/{i}/theta")
    if not pieces:
        return PolyChain.empty(d, a, tol)
    starts = np.array([pc["p"] for pc in pieces], dtype=float)
    ends = np.array([pc["q"] for pc in pieces], dtype=float)
    theta = np.array([pc["theta"] for pc in pieces], dtype=float)
    return PolyChain(a, starts, ends, theta, tol)


def zerochain_to_json(b: ZeroChain) -> dict:
    return {
        "dim": b.dim,
        "n": b.n,
        "alpha": b.alpha_param.alpha,
        "atoms": [{"x": x.tolist(), "eta": e.tolist()} for x, e in b.atoms()],
    }


def zerochain_from_json(doc: dict, tol: float = DEFAULT_TOL) -> ZeroChain:
    validate(doc, "zerochain")
    d, n = doc["dim"], doc["n"]
    a = AlphaParam(doc["alpha"], n)
    atoms = doc["atoms"]
    for i, at in enumerate(atoms):
        _require_len(at["x"], d, f"atoms/{i}/x")
        _require_len(at["eta"], n, f"atoms/{i}/eta")
    if not atoms:
        return ZeroChain.empty(d, a, tol)
    pts = np.array([at["x"] for at in atoms], dtype=float)
    eta = np.array([at["eta"] for at in atoms], dtype=float)
    return ZeroChain(a, pts, eta, tol)


# ---------------------------------------------------------------------------
# forms and decompositions


def form_to_json(w: ConstantForm) -> dict:
    return {"dim": w.d, "n": w.n, "alpha": w.alpha, "matrix": w.matrix.tolist()}


def form_from_json(doc: dict) -> ConstantForm:
    validate(doc, "form")
    rows = doc["matrix"]
    _require_len(rows, doc["dim"], "matrix")
    for i, r in enumerate(rows):
        _require_len(r, doc["n"], f"matrix/{i}")
    return ConstantForm(np.array(rows, dtype=float), doc["alpha"])


def decomposition_to_json(dec: PathDecomposition) -> dict:
    return {
        "paths": [chain_to_json(p) for p in dec.paths],
        "cycles": [chain_to_json(c) for c in dec.cycles],
        "pairing": list(dec.pairing),
    }


# ---------------------------------------------------------------------------
# graph problems


def problem_from_json(doc: dict, tol: float = DEFAULT_TOL) -> FlowProblem:
    validate(doc, "problem")
    nodes = np.array(doc["nodes"], dtype=float)
    if nodes.ndim != 2:
        raise SchemaError("nodes must all have the same dimension", "nodes")
    num, n = len(nodes), doc["n"]
    edges, lengths = [], []
    for i, e in enumerate(doc["edges"]):
        if e["u"] >= num or e["v"] >= num:
            raise SchemaError(f"edge {i} refers to a missing node", f"edges/{i}")
        edges.append((e["u"], e["v"]))
        lengths.append(e.get("len", float(np.linalg.norm(nodes[e["v"]] - nodes[e["u"]]))))
    supply = np.zeros((num, n))
    for i, at in enumerate(doc["boundary"]):
        if at["node"] >= num:
            raise SchemaError(f"boundary atom {i} refers to a missing node", f"boundary/{i}/node")
        _require_len(at["eta"], n, f"boundary/{i}/eta")
        supply[at["node"]] += at["eta"]
    try:
        return FlowProblem(nodes, np.array(edges, dtype=int).reshape(-1, 2), np.array(lengths),
                           AlphaParam(doc["alpha"], n), supply, tol)
    except DimensionError as exc:
        raise SchemaError(str(exc), "edges") from None


def problem_to_json(p: FlowProblem) -> dict:
    return {
        "alpha": p.alpha_param.alpha,
        "n": p.n,
        "nodes": p.nodes.tolist(),
        "edges": [{"u": int(u), "v": int(v), "len": float(l)} for (u, v), l in zip(p.edges, p.lengths)],
        "boundary": [{"node": int(i), "eta": p.supply[i].tolist()}
                     for i in np.flatnonzero(np.any(p.supply != 0, axis=1))],
    }


def solution_to_json(s: FlowSolution) -> dict:
    return s.to_dict()


# ---------------------------------------------------------------------------
# files


def dumps(doc) -> str:
    return json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n"


def load(path: str | Path):
    """Read a JSON document; ``-`` reads standard input."""
    try:
        if str(path) == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})", str(path)) from None


def save(doc, path: str | Path | None) -> None:
    """Write ``doc`` to ``path``, or to standard output when ``path`` is None or ``-``."""
    text = dumps(doc)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
