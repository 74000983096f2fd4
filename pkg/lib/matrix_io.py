"""JSON wire formats for matrices and result records.

A matrix file is either the full form::

    {"rows": 2, "cols": 2, "entries": [[1.0, 0.0], [0.5, 0.0], [0.0, 0.0], [2.0, 0.0]]}

with ``[re, im]`` pairs in row-major order, or the shorthand real form::

    {"entries": [[1.0, 0.5], [0.0, 2.0]]}

Writers always emit the full form. Output is deterministic: keys are sorted
and floats use ``repr``, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import IO, Any, Union

import numpy as np
from numpy.typing import ArrayLike

PathLike = Union[str, Path]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{where}: number must be finite, got {value!r}")
    return value


def parse_matrix(doc: Any) -> np.ndarray:
    """Decode a matrix document; real results come back as float64."""
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ValueError("matrix document must be an object with an 'entries' field")
    entries = doc["entries"]
    if not isinstance(entries, list) or not entries:
        raise ValueError("'entries' must be a non-empty list")

    if "rows" not in doc and "cols" not in doc:
        width = {len(row) if isinstance(row, list) else -1 for row in entries}
        if len(width) != 1 or -1 in width or 0 in width:
            raise ValueError("shorthand 'entries' must be a list of equal-length rows")
        return np.array(
            [[_number(v, f"entries[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(entries)],
            dtype=np.float64,
        )

    rows = doc.get("rows")
    cols = doc.get("cols")
    for name, value in (("rows", rows), ("cols", cols)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"'{name}' must be a positive integer, got {value!r}")
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {len(entries)}")
    values = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError(f"entries[{i}] must be a [re, im] pair, got {pair!r}")
        values[i] = complex(_number(pair[0], f"entries[{i}][0]"), _number(pair[1], f"entries[{i}][1]"))
    matrix = values.reshape(rows, cols)
    if np.all(matrix.imag == 0):
        return np.ascontiguousarray(matrix.real)
    return matrix


def matrix_document(M: ArrayLike) -> dict[str, Any]:
    """Full-form document for a 2-D array."""
    arr = np.asarray(M)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    arr = arr.astype(np.complex128)
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in arr.ravel()],
    }


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def read_matrix(path: PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return parse_matrix(doc)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def write_matrix(path: PathLike, M: ArrayLike) -> None:
    Path(path).write_text(dumps(matrix_document(M)), encoding="utf-8")


def write_json(target: Union[PathLike, IO[str]], payload: Any) -> None:
    """Write a result record (certificate, bound, search trace) as sorted JSON."""
    text = dumps(payload)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


def load_json_object(path: PathLike) -> dict[str, Any]:
    """Read a JSON file that must hold an object (used for ``--config``)."""
    with open(path, encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object, got {type(doc).__name__}")
    return doc


__all__ = [
    "dumps",
    "load_json_object",
    "matrix_document",
    "parse_matrix",
    "read_matrix",
    "write_json",
    "write_matrix",
]
