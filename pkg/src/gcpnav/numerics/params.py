"""Named parameter slices over one flat float64 vector, with serialization.

File format (version GCPPS1):
    line 1: ``GCPPS1``
    line 2: JSON manifest ``{"params": [{"name", "offset", "shape"}, ...],
            "meta": {...}}`` -- meta is an arbitrary JSON object callers use
            to echo model/config provenance into checkpoints
    line 3: ``BINARY``
    then:   the flat parameter vector as little-endian float64 bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .engine import Node

_MAGIC = "GCPPS1"


class ParamError(ValueError):
    pass


@dataclass
class _Slice:
    offset: int
    shape: tuple


class ParamStore:
    """Registry of named parameter arrays packed into one flat vector.

    Slice names are unique and slices are disjoint by construction; the
    flat vector is the single mutable object optimizers update in place.
    Views returned by :meth:`view` alias the flat vector.
    """

    def __init__(self):
        self._slices: dict[str, _Slice] = {}
        self._flat = np.zeros(0, dtype=np.float64)
        self._views: dict[str, np.ndarray] = {}

    # -- registration -----------------------------------------------------

    def add(self, name: str, values: np.ndarray) -> None:
        if name in self._slices:
            raise ParamError(f"duplicate parameter name: {name!r}")
        arr = np.asarray(values, dtype=np.float64)
        self._slices[name] = _Slice(self._flat.size, arr.shape)
        self._flat = np.concatenate([self._flat, arr.ravel()])
        self._rebuild_views()

    def _rebuild_views(self) -> None:
        self._views = {}
        for name, sl in self._slices.items():
            n = int(np.prod(sl.shape, dtype=np.intp)) if sl.shape else 1
            self._views[name] = self._flat[sl.offset : sl.offset + n].reshape(sl.shape)

    # -- access -----------------------------------------------------------

    @property
    def size(self) -> int:
        return self._flat.size

    @property
    def flat(self) -> np.ndarray:
        return self._flat

    def names(self) -> list[str]:
        return list(self._slices)

    def layout(self, name: str) -> tuple[int, tuple]:
        sl = self._slices[name]
        return sl.offset, sl.shape

    def view(self, name: str) -> np.ndarray:
        return self._views[name]

    def node(self, name: str) -> Node:
        """Leaf graph node aliasing this parameter's current values."""
        return Node(self._views[name], param_name=name)

    def slice_of_index(self, i: int) -> str:
        """Name of the slice containing flat index i (for error reporting)."""
        for name, sl in self._slices.items():
            n = int(np.prod(sl.shape, dtype=np.intp)) if sl.shape else 1
            if sl.offset <= i < sl.offset + n:
                return name
        raise ParamError(f"index {i} outside parameter vector of size {self.size}")

    def set_flat(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self._flat.shape:
            raise ParamError(f"flat vector length mismatch: {values.shape} vs {self._flat.shape}")
        self._flat[:] = values

    def copy(self) -> "ParamStore":
        out = ParamStore()
        out._slices = {k: _Slice(v.offset, v.shape) for k, v in self._slices.items()}
        out._flat = self._flat.copy()
        out._rebuild_views()
        return out

    # -- serialization ----------------------------------------------------

    def save(self, path, meta: dict | None = None) -> None:
        manifest = {
            "params": [
                {"name": n, "offset": sl.offset, "shape": list(sl.shape)}
                for n, sl in self._slices.items()
            ],
            "meta": meta or {},
        }
        with open(path, "wb") as f:
            f.write(_MAGIC.encode() + b"\n")
            f.write(json.dumps(manifest).encode() + b"\n")
            f.write(b"BINARY\n")
            f.write(self._flat.astype("<f8").tobytes())

    @classmethod
    def load(cls, path) -> tuple["ParamStore", dict]:
        with open(path, "rb") as f:
            magic = f.readline().strip().decode()
            if magic != _MAGIC:
                raise ParamError(f"bad magic {magic!r}, expected {_MAGIC!r}")
            manifest = json.loads(f.readline())
            tag = f.readline().strip()
            if tag != b"BINARY":
                raise ParamError(f"expected BINARY separator, got {tag!r}")
            blob = f.read()
        store = cls()
        total = 0
        for p in manifest["params"]:
            shape = tuple(p["shape"])
            n = int(np.prod(shape, dtype=np.intp)) if shape else 1
            if p["offset"] != total:
                raise ParamError(f"non-contiguous manifest at {p['name']!r}")
            store._slices[p["name"]] = _Slice(p["offset"], shape)
            total += n
        if len(blob) != 8 * total:
            raise ParamError(f"parameter blob has {len(blob)} bytes, expected {8 * total}")
        store._flat = np.frombuffer(blob, dtype="<f8").astype(np.float64)
        store._rebuild_views()
        return store, manifest.get("meta", {})
