"""Claim records and their line-oriented text serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in obj]
        return sorted(items) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def provenance_hash(provenance: dict) -> str:
    return hashlib.sha256(canonical_json(provenance).encode()).hexdigest()


def ids_hash(ids) -> str:
    arr = np.asarray(sorted(int(i) for i in ids), dtype=np.int64)
    return hashlib.sha256(arr.tobytes()).hexdigest()


@dataclass
class Certificate:
    """A checkable pass/fail claim about one object."""

    kind: str
    passed: bool
    provenance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    witness: Any = None
    sampled: bool = False

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["provenance_hash"] = provenance_hash(self.provenance)
        return _plain(d)

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def rle_encode(values) -> list[list[int]]:
    """Run-length encode a sequence as [value, run] pairs."""
    out: list[list[int]] = []
    for v in np.asarray(values).tolist():
        if out and out[-1][0] == v:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return out


def rle_decode(pairs) -> np.ndarray:
    if not pairs:
        return np.zeros(0, dtype=np.int64)
    vals = np.array([v for v, _ in pairs], dtype=np.int64)
    runs = np.array([r for _, r in pairs], dtype=np.int64)
    return np.repeat(vals, runs)
