"""JSON instance documents with line-anchored error messages."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hypergroup import HaarWeights, HypergroupTable, StructureError, compute_haar, invariance_residual
from .potential import GrowthSpace


class DocumentError(ValueError):
    """Malformed document; ``str(err)`` reads ``path:line:col: message``."""

    def __init__(self, path, line: int, col: int, message: str):
        super().__init__(f"{path}:{line}:{col}: {message}")
        self.path, self.line, self.col, self.message = str(path), line, col, message


def _locate(text: str, key: str | None) -> tuple[int, int]:
    if key is None:
        return 1, 1
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    if not m:
        return 1, 1
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _decode_special(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    return x


class Source:
    """A parsed JSON file that remembers its text for error anchoring."""

    def __init__(self, path, text: str | None = None):
        self.path = str(path)
        if text is None:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise DocumentError(path, 1, 1, f"cannot read file: {exc.strerror}") from None
        self.text = text
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(path, exc.lineno, exc.colno, exc.msg) from None

    def error(self, key: str | None, message: str) -> DocumentError:
        line, col = _locate(self.text, key)
        return DocumentError(self.path, line, col, message)


def _vector(src: Source, key: str, raw, n: int | None = None) -> np.ndarray:
    try:
        arr = np.array([_decode_special(v) for v in raw], dtype=float) if isinstance(raw, list) else None
    except (TypeError, ValueError):
        arr = None
    if arr is None or arr.ndim != 1:
        raise src.error(key, f"{key!r} must be a flat list of numbers")
    if not np.all(np.isfinite(arr)):
        raise src.error(key, f"{key!r} must contain finite numbers")
    if n is not None and arr.size != n:
        raise src.error(key, f"{key!r} has {arr.size} entries, expected {n}")
    return arr


@dataclass(eq=False)
class InstanceDocument:
    table: HypergroupTable | None = None
    haar: HaarWeights | None = None
    rho: np.ndarray | None = None
    functions: dict[str, np.ndarray] = field(default_factory=dict)
    growth: GrowthSpace | None = None
    suite: dict | None = None
    meta: dict = field(default_factory=dict)

    def require_table(self) -> HypergroupTable:
        if self.table is None:
            raise StructureError("the document has no hypergroup block")
        return self.table

    def weights(self) -> HaarWeights:
        if self.haar is None:
            self.haar = compute_haar(self.require_table())
        return self.haar

    def to_dict(self) -> dict:
        doc: dict = dict(self.meta)
        if self.table is not None:
            doc.update(self.table.to_dict())
            if self.table.name:
                doc["name"] = self.table.name
        if self.haar is not None:
            doc["haar"] = self.haar.weights.tolist()
        if self.rho is not None:
            doc["rho"] = np.asarray(self.rho).tolist()
        if self.functions:
            doc["functions"] = {k: v.tolist() for k, v in self.functions.items()}
        if self.growth is not None:
            doc["growth"] = self.growth.to_dict()
        if self.suite is not None:
            doc["suite"] = self.suite
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


TABLE_KEYS = ("n", "identity", "involution", "tensor")
KNOWN_KEYS = set(TABLE_KEYS) | {"name", "haar", "rho", "functions", "growth", "suite", "family", "size", "seed"}


def parse_instance(src: Source) -> InstanceDocument:
    data = src.data
    if not isinstance(data, dict):
        raise src.error(None, "an instance document must be a JSON object")
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise src.error(unknown[0], f"unknown field {unknown[0]!r}")
    doc = InstanceDocument(meta={k: data[k] for k in ("family", "size", "seed") if k in data})
    present = [k for k in TABLE_KEYS if k in data]
    if present:
        try:
            doc.table = HypergroupTable.from_dict(data)
        except StructureError as exc:
            missing = [k for k in TABLE_KEYS if k not in data]
            raise src.error(present[0] if missing else _blame(str(exc)), str(exc)) from None
        if "name" in data:
            doc.table = HypergroupTable(doc.table.n, doc.table.identity, doc.table.involution, doc.table.tensor, str(data["name"]))
    n = doc.table.n if doc.table is not None else None
    if "haar" in data:
        w = _vector(src, "haar", data["haar"], n)
        try:
            doc.haar = HaarWeights(w)
        except ValueError as exc:
            raise src.error("haar", str(exc)) from None
        if doc.table is not None:
            res = invariance_residual(doc.table, doc.haar.weights)
            if res > 1e-9:
                raise src.error("haar", f"supplied Haar weights are not invariant (residual {res:.3g})")
    if "rho" in data:
        try:
            rho = np.array(data["rho"], dtype=float)
        except (TypeError, ValueError):
            raise src.error("rho", "'rho' must be a square numeric matrix") from None
        size = rho.shape[0] if rho.ndim == 2 else -1
        if rho.ndim != 2 or rho.shape[1] != size or (n is not None and size != n):
            raise src.error("rho", f"'rho' must be a {n or 'k'} x {n or 'k'} matrix, got shape {rho.shape}")
        doc.rho = rho
        n = n if n is not None else size
    if "functions" in data:
        fns = data["functions"]
        if not isinstance(fns, dict):
            raise src.error("functions", "'functions' must map names to value lists")
        for name, vals in fns.items():
            doc.functions[name] = _vector(src, name, vals, n)
            n = n if n is not None else doc.functions[name].size
    if "growth" in data:
        doc.growth = _parse_growth(src, data["growth"], doc, n)
    if "suite" in data:
        if not isinstance(data["suite"], dict):
            raise src.error("suite", "'suite' must be an object")
        doc.suite = data["suite"]
    if doc.table is None and doc.rho is None and not doc.functions and doc.growth is None and doc.suite is None:
        raise src.error(None, "the document has no actionable block (hypergroup, rho, functions, growth or suite)")
    return doc


def _blame(message: str) -> str | None:
    for key in ("tensor", "involution", "identity", "n"):
        if key in message:
            return key
    return None


def _parse_growth(src: Source, block, doc: InstanceDocument, n) -> GrowthSpace:
    if not isinstance(block, dict):
        raise src.error("growth", "'growth' must be an object")
    missing = [k for k in ("radii", "A", "N") if k not in block]
    if missing:
        raise src.error("growth", f"growth block is missing {', '.join(missing)}")
    radii = _vector(src, "radii", block["radii"], n)
    if "weights" in block:
        weights = _vector(src, "weights", block["weights"], radii.size)
    elif doc.table is not None:
        weights = doc.weights().weights
    else:
        raise src.error("growth", "growth block needs 'weights' when there is no hypergroup")
    try:
        A, N = float(block["A"]), float(block["N"])
    except (TypeError, ValueError):
        raise src.error("growth", "'A' and 'N' must be numbers") from None
    if not (A > 0 and N > 0 and math.isfinite(A) and math.isfinite(N)):
        raise src.error("growth", "'A' and 'N' must be positive")
    if np.any(radii < 0):
        raise src.error("radii", "radii must be nonnegative")
    table = doc.table if doc.table is not None and radii.size == doc.table.n else None
    return GrowthSpace(radii=radii, weights=np.asarray(weights, dtype=float), A=A, N=N, table=table)


def load_instance(path) -> InstanceDocument:
    return parse_instance(Source(path))


def load_function(path, n: int | None = None) -> np.ndarray:
    """A function file holds ``{"values": [...]}`` or a bare list."""
    src = Source(path)
    raw = src.data.get("values") if isinstance(src.data, dict) else src.data
    if raw is None:
        raise src.error(None, "a function file needs a 'values' list")
    return _vector(src, "values", raw, n)


def dumps_function(values) -> str:
    return json.dumps({"values": np.asarray(values, dtype=float).tolist()}) + "\n"
