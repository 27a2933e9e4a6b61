"""JSON interchange for block matrices, rectangular matrices and matrix subspaces.

A file is an object ``{"m": m, "n": n, "kind": kind, "data": data}`` where
every complex entry is a ``[re, im]`` pair:

* ``state``: an ``mn x mn`` nested array, global index ``i * n + k`` for
  block ``i`` and inner index ``k``;
* ``rect``: an ``m x n`` nested array;
* ``subspace``: a list of ``m x n`` nested arrays spanning the subspace.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from pathlib import Path

import numpy as np

from .linalg import MatrixSubspace, as_dims, orthonormalize, vectorize

log = logging.getLogger(__name__)

KINDS = ("state", "rect", "subspace")


class ParseErrorCode(enum.IntEnum):
    MALFORMED = 2
    DIMENSION = 3
    NON_FINITE = 4
    SCHEMA = 5


class MatrixFileError(ValueError):
    def __init__(self, code: ParseErrorCode, message: str):
        super().__init__(message)
        self.code = code


def _number(x):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def _encode(M: np.ndarray):
    M = np.asarray(M, dtype=complex)
    if M.ndim == 0:
        return [_number(M.real), _number(M.imag)]
    return [_encode(row) for row in M]


def _decode(data, shape, what: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixFileError(ParseErrorCode.SCHEMA, f"{what}: entries must be [re, im] pairs") from exc
    if arr.shape != tuple(shape) + (2,):
        raise MatrixFileError(ParseErrorCode.DIMENSION,
                              f"{what}: expected shape {tuple(shape)} of [re, im] pairs, got {arr.shape[:-1]}")
    if not np.all(np.isfinite(arr)):
        raise MatrixFileError(ParseErrorCode.NON_FINITE, f"{what}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def to_document(obj, kind: str, dims=None) -> dict:
    if kind == "subspace":
        dims = obj.dims
        data = [_encode(z) for z in obj.basis]
    else:
        M = np.asarray(obj)
        if dims is None:
            if kind != "rect":
                raise ValueError("dims are required for a state")
            dims = M.shape
        data = _encode(M)
    m, n = as_dims(dims)
    return {"m": m, "n": n, "kind": kind, "data": data}


def dumps(obj, kind: str, dims=None) -> str:
    return json.dumps(to_document(obj, kind, dims))


def from_document(doc, orthonormalize_subspace: bool = True):
    """Decode a parsed document; returns ``(kind, dims, value)``.

    Subspaces come back as :class:`MatrixSubspace` (orthonormalized, with a
    warning if the input was not) unless ``orthonormalize_subspace`` is false,
    in which case the raw list of matrices is returned.
    """
    if not isinstance(doc, dict):
        raise MatrixFileError(ParseErrorCode.SCHEMA, "top level must be an object")
    missing = {"m", "n", "kind", "data"} - doc.keys()
    if missing:
        raise MatrixFileError(ParseErrorCode.SCHEMA, f"missing fields: {sorted(missing)}")
    kind = doc["kind"]
    if kind not in KINDS:
        raise MatrixFileError(ParseErrorCode.SCHEMA, f"unknown kind {kind!r}")
    m, n = doc["m"], doc["n"]
    if not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in (m, n)):
        raise MatrixFileError(ParseErrorCode.DIMENSION, "m and n must be positive integers")
    dims = as_dims((m, n))
    data = doc["data"]
    if kind == "state":
        return kind, dims, _decode(data, (m * n, m * n), "state")
    if kind == "rect":
        return kind, dims, _decode(data, (m, n), "rect")
    if not isinstance(data, list):
        raise MatrixFileError(ParseErrorCode.SCHEMA, "subspace data must be a list of matrices")
    mats = [_decode(z, (m, n), f"subspace element {i}") for i, z in enumerate(data)]
    if not orthonormalize_subspace:
        return kind, dims, mats
    if not mats:
        return kind, dims, MatrixSubspace.zero(dims)
    cols = np.stack([vectorize(z) for z in mats], axis=1)
    if not np.allclose(cols.conj().T @ cols, np.eye(len(mats)), atol=1e-10):
        log.warning("subspace basis was not orthonormal; orthonormalizing on load")
    return kind, dims, MatrixSubspace(dims, orthonormalize(cols))


def parse_matrix_file(raw: bytes | str, **kw):
    """Parse the bytes of a matrix file; returns ``(kind, dims, value)``."""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MatrixFileError(ParseErrorCode.MALFORMED, "file is not valid UTF-8") from exc
    try:
        doc = json.loads(raw, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(ParseErrorCode.MALFORMED, f"malformed JSON: {exc}") from exc
    return from_document(doc, **kw)


def _reject_constant(name):
    raise MatrixFileError(ParseErrorCode.NON_FINITE, f"non-finite number {name}")


def load(path, **kw):
    return parse_matrix_file(Path(path).read_bytes(), **kw)


def save(path, obj, kind: str, dims=None) -> None:
    Path(path).write_text(dumps(obj, kind, dims) + "\n")


def finite_or_none(x: float):
    return x if math.isfinite(x) else None
