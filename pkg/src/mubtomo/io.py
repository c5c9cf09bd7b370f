"""Serialization helpers: 17-significant-digit JSON and atomic writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_Float(obj.real), _Float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _Float(obj)
    return obj


class _Float(float):
    def __repr__(self) -> str:
        if self != self or self in (float("inf"), float("-inf")):
            return json.dumps(float(self))
        return format(float(self), ".17g")


def _iterencode(o, indent, level=0):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    if isinstance(o, _Float):
        yield repr(o)
    elif isinstance(o, dict):
        if not o:
            yield "{}"
            return
        yield "{"
        for i, (k, v) in enumerate(o.items()):
            yield (sep if i else "") + pad + json.dumps(k) + ": "
            yield from _iterencode(v, indent, level + 1)
        yield end + "}"
    elif isinstance(o, list):
        if not o:
            yield "[]"
            return
        flat = all(not isinstance(v, (dict, list)) for v in o)
        yield "["
        for i, v in enumerate(o):
            if flat:
                yield (", " if i else "")
            else:
                yield (sep if i else "") + pad
            yield from _iterencode(v, None if flat else indent, level + 1)
        yield ("" if flat else end) + "]"
    else:
        yield json.dumps(o)


def dumps(obj, indent: int | None = 1) -> str:
    """JSON text with every float written with 17 significant digits.

    Complex numbers become ``[re, im]`` pairs.
    """
    return "".join(_iterencode(_normalize(obj), indent)) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def complex_matrix_to_pairs(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def pairs_to_complex_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
