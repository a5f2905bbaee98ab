from __future__ import annotations

import csv
import hashlib
import json
import math
import pathlib
from typing import Any, Iterable, List, Mapping, Sequence

import numpy as np

# ────────────────────────────────────────────────────────────────────────────
# Basic JSON helpers
# ────────────────────────────────────────────────────────────────────────────

def _ensure_parent_dir(path: str | pathlib.Path) -> None:
    pathlib.Path(path).expanduser().parent.mkdir(parents=True, exist_ok=True)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays (recursively) into plain JSON types."""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no inf/nan
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, pathlib.Path):
        return str(value)
    return value


def load_json(path: str | pathlib.Path, *, default: Any | None = None) -> Any:
    """
    Load JSON from *path*.
    Returns *default* if the file does not exist.
    Raises on malformed JSON.
    """
    path = pathlib.Path(path)
    if not path.exists():
        return default
    with path.open(encoding="utf-8") as fh:
        return json.load(fh)


def dumps_json(data: Any, *, indent: int = 2) -> str:
    """Deterministic JSON text (sorted keys, trailing newline)."""
    return json.dumps(to_jsonable(data), indent=indent, ensure_ascii=False, sort_keys=True) + "\n"


def save_json(path: str | pathlib.Path, data: Any, *, indent: int = 2) -> None:
    """Write *data* to *path* as pretty-printed UTF-8 JSON."""
    _ensure_parent_dir(path)
    pathlib.Path(path).write_text(dumps_json(data, indent=indent), encoding="utf-8")

# ────────────────────────────────────────────────────────────────────────────
# CSV helpers
# ────────────────────────────────────────────────────────────────────────────

def save_csv(path: str | pathlib.Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a header plus rows; floats are written with repr precision."""
    _ensure_parent_dir(path)
    with pathlib.Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def load_csv_matrix(path: str | pathlib.Path) -> np.ndarray:
    """Read a numeric CSV (optional non-numeric header row) into a 2-D array."""
    rows: List[List[float]] = []
    with pathlib.Path(path).open(encoding="utf-8", newline="") as fh:
        for index, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                if index == 0:
                    continue
                raise
    return np.array(rows, dtype=float)

# ────────────────────────────────────────────────────────────────────────────
# Digests
# ────────────────────────────────────────────────────────────────────────────

def blob_digest(content: bytes) -> str:
    """Git-style blob SHA-1 of *content*."""
    header = f"blob {len(content)}\0".encode("ascii")
    return hashlib.sha1(header + content).hexdigest()


def file_digest(path: str | pathlib.Path) -> str:
    return blob_digest(pathlib.Path(path).read_bytes())


def array_digest(*arrays: np.ndarray) -> str:
    """Short, stable digest of one or more float arrays (used in report inputs)."""
    sha = hashlib.sha1()
    for array in arrays:
        data = np.ascontiguousarray(np.asarray(array, dtype=np.float64))
        sha.update(str(data.shape).encode("ascii"))
        sha.update(data.tobytes())
    return sha.hexdigest()[:16]


__all__ = [
    "to_jsonable",
    "load_json",
    "dumps_json",
    "save_json",
    "save_csv",
    "load_csv_matrix",
    "blob_digest",
    "file_digest",
    "array_digest",
]
