"""JSON encoding of matrices, forms, Siegel points, Hodge data and ring models.

Rationals travel as ``"p/q"`` strings and complex numbers as ``[re, im]``.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .forms import ComplexStructureOp, MetricForm, SkewForm
from .genus import CohomologyRingModel
from .hodge import HodgeStructure, LefschetzModule
from .lattice import to_fraction
from .siegel import SiegelPoint


def _scalar(x):
    if isinstance(x, list) and len(x) == 2:
        return complex(_real(x[0]), _real(x[1]))
    return _real(x)


def _real(x) -> float:
    if isinstance(x, str):
        return float(Fraction(x))
    if isinstance(x, (int, float)):
        return float(x)
    raise ValidationError(f"not a number: {x!r}")


def _rows(obj):
    if isinstance(obj, dict):
        try:
            r, c, data = int(obj["rows"]), int(obj["cols"]), list(obj["data"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError("matrix JSON needs rows, cols and data") from exc
        if len(data) != r * c:
            raise ValidationError("matrix data length differs from rows*cols")
        return [data[i * c : (i + 1) * c] for i in range(r)]
    if isinstance(obj, list) and obj and all(isinstance(row, list) for row in obj):
        return obj
    raise ValidationError("expected a matrix")


def matrix_from_json(obj) -> np.ndarray:
    rows = _rows(obj)
    vals = [[_scalar(x) for x in row] for row in rows]
    if len({len(r) for r in vals}) != 1:
        raise ValidationError("ragged matrix")
    dtype = complex if any(isinstance(x, complex) for row in vals for x in row) else float
    return np.array(vals, dtype=dtype)


def exact_matrix_from_json(obj) -> tuple:
    try:
        return tuple(tuple(to_fraction(x) for x in row) for row in _rows(obj))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(str(exc)) from exc


def encode_scalar(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def matrix_to_json(m) -> dict:
    if isinstance(m, np.ndarray):
        rows = m.tolist() if m.ndim == 2 else [m.tolist()]
    else:
        rows = [list(r) for r in m]
    return {
        "rows": len(rows),
        "cols": len(rows[0]) if rows else 0,
        "data": [encode_scalar(x) for row in rows for x in row],
    }


_FORM_KINDS = {"metric": MetricForm, "skew": SkewForm, "complex_structure": ComplexStructureOp}


def form_from_json(obj, kind: str | None = None):
    if isinstance(obj, dict) and "kind" in obj:
        if kind is not None and obj["kind"] != kind:
            raise ValidationError(f"expected a {kind} form, got {obj['kind']}")
        kind = obj["kind"]
        obj = obj.get("matrix")
    if kind not in _FORM_KINDS:
        raise ValidationError(f"unknown form kind {kind!r}")
    m = matrix_from_json(obj)
    if np.iscomplexobj(m):
        raise ValidationError("forms must be real")
    return _FORM_KINDS[kind](m)


def form_to_json(form) -> dict:
    for kind, cls in _FORM_KINDS.items():
        if isinstance(form, cls):
            mat = form.matrix if kind == "complex_structure" else form.gram
            return {"kind": kind, "matrix": matrix_to_json(mat)}
    raise TypeError(type(form))


def siegel_from_json(obj) -> SiegelPoint:
    try:
        re = matrix_from_json(obj["re"])
        im = matrix_from_json(obj["im"])
    except (KeyError, TypeError) as exc:
        raise ValidationError("Siegel JSON needs re and im") from exc
    if re.shape != im.shape or ("g" in obj and re.shape[0] != int(obj["g"])):
        raise ValidationError("Siegel JSON has inconsistent shapes")
    return SiegelPoint(re + 1j * im)


def siegel_to_json(Z: SiegelPoint) -> dict:
    return {"g": Z.g, "re": matrix_to_json(Z.X), "im": matrix_to_json(Z.Y)}


def hodge_from_json(obj) -> HodgeStructure:
    try:
        pieces = tuple((int(p["p"]), int(p["q"]), matrix_from_json(p["basis"])) for p in obj["pieces"])
        return HodgeStructure(int(obj["weight"]), int(obj["dim"]), pieces)
    except (KeyError, TypeError) as exc:
        raise ValidationError("Hodge JSON needs weight, dim and pieces") from exc


def hodge_to_json(hs: HodgeStructure) -> dict:
    return {
        "weight": hs.weight,
        "dim": hs.dim,
        "pieces": [{"p": p, "q": q, "basis": [[encode_scalar(complex(x)) for x in row] for row in b.tolist()]} for p, q, b in hs.pieces],
    }


def lefschetz_from_json(obj) -> LefschetzModule:
    try:
        weil = {int(k): matrix_from_json(v) for k, v in obj.get("weil", {}).items()}
        return LefschetzModule(
            int(obj["d"]),
            tuple(int(x) for x in obj["dims"]),
            tuple(matrix_from_json(m) if m and m != [[]] else np.zeros((0, 0)) for m in obj["L"]),
            tuple(matrix_from_json(m) if m and m != [[]] else np.zeros((0, 0)) for m in obj["pairing"]),
            weil,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad Lefschetz JSON: {exc}") from exc


def ring_model_from_json(obj) -> CohomologyRingModel:
    try:
        names = tuple(b["name"] for b in obj["basis"])
        degrees = tuple(int(b["degree"]) for b in obj["basis"])
        mult = {(int(i), int(j)): tuple(coeffs) for i, j, coeffs in obj.get("mult", [])}
        return CohomologyRingModel(
            names, degrees, mult, tuple(obj["integrate"]), tuple(tuple(e) for e in obj.get("lattice", [])), int(obj.get("dimension_param", 0))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad ring model JSON: {exc}") from exc


def ring_model_to_json(model: CohomologyRingModel) -> dict:
    seen = set()
    mult = []
    for (i, j), vec in sorted(model.mult.items()):
        if (j, i) in seen:
            continue
        seen.add((i, j))
        mult.append([i, j, [str(x) for x in vec]])
    return {
        "dimension_param": model.dimension_param,
        "basis": [{"name": n, "degree": d} for n, d in zip(model.names, model.degrees)],
        "mult": mult,
        "integrate": [str(x) for x in model.integral],
        "lattice": [[str(x) for x in v] for v in model.lattice],
    }


def dumps(payload) -> str:
    def default(o):
        if isinstance(o, np.ndarray):
            return matrix_to_json(o)
        enc = encode_scalar(o)
        if enc is o:
            raise TypeError(f"cannot encode {type(o)}")
        return enc

    return json.dumps(payload, default=default, sort_keys=True, indent=2)
