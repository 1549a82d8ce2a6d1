"""JSON documents: family files, vectors, matrices and reports.

Complex scalars are written as ``[re, im]`` pairs. Floats go through
Python's shortest round-trip repr, so values survive a write/read cycle bit
for bit.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from . import numkernel as nk
from . import subspace as sp
from .errors import InvalidInputError
from .fusion import WeightedFamily


def load_json(path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"{path}: cannot read ({exc.strerror})") from None
    return loads(text, source=str(path))


def loads(text: str, source: str = "<document>") -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def _reject_constant(name: str):
    raise InvalidInputError(f"non-finite number {name} is not allowed")


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _scalar(x, field: str, where: str):
    if field == "complex":
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            re, im = x, 0.0
        elif (
            isinstance(x, list) and len(x) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x)
        ):
            re, im = x
        else:
            raise InvalidInputError(f"{where}: expected a number or [re, im] pair")
        z = complex(float(re), float(im))
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise InvalidInputError(f"{where}: non-finite entry")
        return z
    if not isinstance(x, (int, float)) or isinstance(x, bool):
        raise InvalidInputError(f"{where}: expected a real number")
    if not math.isfinite(x):
        raise InvalidInputError(f"{where}: non-finite entry")
    return float(x)


def parse_vector_list(rows, n: int | None, field: str, where: str) -> np.ndarray:
    """List of vectors (each a list of scalars) -> matrix with the vectors as columns."""
    if not isinstance(rows, list):
        raise InvalidInputError(f"{where}: expected a list of vectors")
    cols = []
    for k, row in enumerate(rows):
        cols.append(parse_vector(row, n, field, f"{where}[{k}]"))
    dtype = np.complex128 if field == "complex" else np.float64
    if not cols:
        return np.zeros((n or 0, 0), dtype=dtype)
    return np.column_stack(cols).astype(dtype)


def parse_vector(row, n: int | None, field: str, where: str = "vector") -> np.ndarray:
    if not isinstance(row, list):
        raise InvalidInputError(f"{where}: expected a list of scalars")
    if n is not None and len(row) != n:
        raise InvalidInputError(f"{where}: length {len(row)}, expected {n}")
    vals = [_scalar(x, field, f"{where}[{t}]") for t, x in enumerate(row)]
    return np.array(vals, dtype=np.complex128 if field == "complex" else np.float64)


def parse_matrix(rows, n: int, field: str, where: str = "matrix") -> np.ndarray:
    """Square matrix given row by row."""
    M = parse_vector_list(rows, n, field, where)
    if M.shape[1] != n:
        raise InvalidInputError(f"{where}: expected {n} rows, got {M.shape[1]}")
    return M.T.copy()


def _field(doc: dict, where: str = "field") -> str:
    field = doc.get("field", "real")
    if field not in ("real", "complex"):
        raise InvalidInputError(f"{where}: must be 'real' or 'complex', got {field!r}")
    return field


def _ambient(doc: dict) -> int:
    n = doc.get("ambient_dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInputError("ambient_dim: expected a positive integer")
    if n > nk.MAX_DIM:
        raise InvalidInputError(f"ambient_dim: exceeds the cap {nk.MAX_DIM}")
    return n


def _weight(x, where: str) -> float:
    if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
        raise InvalidInputError(f"{where}: expected a finite number")
    if x <= 0:
        raise InvalidInputError(f"{where}: weights must be strictly positive, got {x}")
    return float(x)


def parse_family(doc) -> WeightedFamily:
    """Build a family from a family document (dict or JSON text).

    Basis rows may be any spanning set. Rows that are not orthonormal are
    re-orthonormalised, and ``meta["reorthonormalized"]`` records which
    subspaces needed it.
    """
    if isinstance(doc, str):
        doc = loads(doc)
    if not isinstance(doc, dict):
        raise InvalidInputError("family document must be a JSON object")
    n = _ambient(doc)
    field = _field(doc)
    items = doc.get("subspaces")
    if not isinstance(items, list):
        raise InvalidInputError("subspaces: expected a list")
    subs, weights, flags = [], [], []
    for i, item in enumerate(items):
        where = f"subspaces[{i}]"
        if not isinstance(item, dict):
            raise InvalidInputError(f"{where}: expected an object")
        if "weight" not in item or "basis" not in item:
            raise InvalidInputError(f"{where}: needs 'weight' and 'basis'")
        weights.append(_weight(item["weight"], f"{where}.weight"))
        M = parse_vector_list(item["basis"], n, field, f"{where}.basis")
        if M.shape[1] == 0:
            subs.append(sp.zero(n, field == "complex"))
            flags.append(False)
            continue
        gram = nk.adjoint(M) @ M
        redo = bool(nk.opnorm(gram - np.eye(M.shape[1])) > 1e-12)
        flags.append(redo)
        # orthonormal rows are kept verbatim so documents round-trip exactly
        subs.append(sp.from_spanning(M) if redo else sp.Subspace(n, M))
    return WeightedFamily(n, tuple(subs), np.array(weights, dtype=float),
                          {"reorthonormalized": flags, "field": field})


def _encode(x, complex_: bool):
    if complex_:
        z = complex(x)
        return [z.real, z.imag]
    return float(np.real(x))


def encode_vector(v, complex_: bool | None = None) -> list:
    v = np.asarray(v)
    c = np.iscomplexobj(v) if complex_ is None else complex_
    return [_encode(x, c) for x in v]


def encode_matrix_rows(M, complex_: bool | None = None) -> list:
    M = np.asarray(M)
    c = np.iscomplexobj(M) if complex_ is None else complex_
    return [encode_vector(row, c) for row in M]


def serialize_family(F: WeightedFamily) -> dict:
    complex_ = F.is_complex
    return {
        "ambient_dim": F.ambient_dim,
        "field": "complex" if complex_ else "real",
        "subspaces": [
            {"weight": float(v), "basis": [encode_vector(col, complex_) for col in W.basis.T]}
            for W, v in F
        ],
    }


def provenance(seed: int | None, tolerances: dict, **extra) -> dict:
    out = {"tool": "fusionframes", "version": __version__, "seed": seed, "tolerances": tolerances}
    out.update(extra)
    return out


def report(
    *,
    command: str,
    bounds=None,
    flags: dict | None = None,
    certificates=(),
    provenance: dict,
    result: dict | None = None,
) -> dict:
    """Report document: bounds, eigenvalues, flags, certificates, provenance."""
    doc: dict = {"command": command}
    if bounds is not None:
        doc["bounds"] = {"C": bounds.C, "D": bounds.D}
        doc["eigenvalues"] = list(bounds.eigenvalues)
    if flags is not None:
        doc["flags"] = flags
    doc["certificates"] = [c.as_dict() for c in certificates]
    if result is not None:
        doc["result"] = result
    doc["provenance"] = provenance
    return doc
