"""JSON encoding of matrices, vectors and reports.

Matrix files look like ``{"rows": 2, "cols": 2, "entries": [[re, im], ...]}``
with entries in row-major order, or ``{"diag": [d1, d2, ...]}`` for a real
diagonal matrix. A Choi matrix may add ``"in_dim"`` and ``"out_dim"``.
Floats are written with Python's shortest round-trip representation, so
reading back a written file reproduces every double exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channels import ChoiMatrix
from .exceptions import DMajorError


class MalformedInput(DMajorError):
    """A JSON document does not describe a matrix or vector."""


def _finite(values) -> None:
    if not all(math.isfinite(v) for v in values):
        raise MalformedInput("non-finite number in input")


def matrix_to_json(M) -> dict:
    M = np.asarray(M)
    if M.ndim != 2:
        raise MalformedInput(f"expected a 2-d array, got shape {M.shape}")
    Mc = M.astype(complex)
    entries = [[float(z.real), float(z.imag)] for z in Mc.ravel()]
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "entries": entries}


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict) and "diag" in obj:
        diag = [float(v) for v in obj["diag"]]
        _finite(diag)
        return np.diag(np.array(diag)).astype(complex)
    if isinstance(obj, list):
        # a bare nested list of reals or [re, im] pairs
        arr = np.array(obj, dtype=float)
        if arr.ndim == 3 and arr.shape[2] == 2:
            arr = arr[..., 0] + 1j * arr[..., 1]
        if arr.ndim != 2:
            raise MalformedInput("a list must be a 2-d array of numbers or [re, im] pairs")
        _finite(np.abs(arr).ravel())
        return arr.astype(complex)
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"matrix object needs rows, cols and entries ({exc})") from None
    if len(entries) != rows * cols:
        raise MalformedInput(f"expected {rows * cols} entries, found {len(entries)}")
    try:
        pairs = np.array([[float(e[0]), float(e[1])] if isinstance(e, (list, tuple)) else [float(e), 0.0]
                          for e in entries], dtype=float).reshape(rows * cols, 2)
    except (TypeError, ValueError, IndexError) as exc:
        raise MalformedInput(f"bad matrix entry ({exc})") from None
    _finite(pairs.ravel())
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols)


def vector_from_json(obj) -> np.ndarray:
    """A real vector: a bare list, ``{"vector": [...]}``, ``{"diag": [...]}`` or a one-row/column matrix."""
    if isinstance(obj, list) and all(isinstance(v, (int, float)) for v in obj):
        v = np.array(obj, dtype=float)
    elif isinstance(obj, dict) and "vector" in obj:
        v = np.array([float(x) for x in obj["vector"]])
    elif isinstance(obj, dict) and "diag" in obj:
        v = np.array([float(x) for x in obj["diag"]])
    else:
        M = matrix_from_json(obj)
        if min(M.shape) != 1:
            raise MalformedInput("expected a vector")
        if np.abs(M.imag).max(initial=0.0) > 0:
            raise MalformedInput("vector entries must be real")
        v = M.real.ravel()
    _finite(v)
    return v


def choi_to_json(C: ChoiMatrix) -> dict:
    out = matrix_to_json(C.matrix)
    out["in_dim"], out["out_dim"] = C.in_dim, C.out_dim
    return out


def choi_from_json(obj, in_dim: int | None = None) -> ChoiMatrix:
    M = matrix_from_json(obj)
    if M.shape[0] != M.shape[1]:
        raise MalformedInput("a Choi matrix must be square")
    size = M.shape[0]
    n = in_dim or (obj.get("in_dim") if isinstance(obj, dict) else None)
    k = obj.get("out_dim") if isinstance(obj, dict) else None
    if n is None and k is None:
        n = math.isqrt(size)
        if n * n != size:
            raise MalformedInput(f"cannot infer dimensions of a {size}x{size} Choi matrix; give in_dim")
    n = int(n) if n is not None else size // int(k)
    k = int(k) if k is not None else size // n
    if n * k != size:
        raise MalformedInput(f"in_dim*out_dim = {n * k} does not match size {size}")
    return ChoiMatrix(n, k, M)


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc})") from None


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(read_json(path))


def read_vector(path) -> np.ndarray:
    return vector_from_json(read_json(path))


def write_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)))


def to_jsonable(obj):
    """Recursively convert numpy values, enums and matrices for ``json.dumps``."""
    if isinstance(obj, ChoiMatrix):
        return choi_to_json(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and np.iscomplexobj(obj):
            return matrix_to_json(obj)
        if np.iscomplexobj(obj):
            if np.abs(obj.imag).max(initial=0.0) == 0:
                obj = obj.real
            else:
                return [[float(z.real), float(z.imag)] for z in obj.ravel()]
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"
