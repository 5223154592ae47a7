"""Symmetry-reduced LGF tables and their binary/CSV persistence.

Binary layout (little-endian)::

    "LGFT"  u16 version  8s stencil  u8 dim  u32 extent  u32 J
    f64 eps_a  f64 eps_r  f64 t_min  f64 T_min  i64 timestamp
    f64 values[count]  u32 crc32(values)

Values follow ``itertools.combinations_with_replacement`` order of the
sorted non-negative tuples.  Entries outside a sphere restriction are NaN.
"""
from __future__ import annotations

import struct
import time
import zlib
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from ._kernels import expand_symmetric
from .free3d import canonical, canonical_tuples

__all__ = ["LgfTable", "TableFormatError", "MAGIC", "VERSION"]

MAGIC = b"LGFT"
VERSION = 1
_HEADER = struct.Struct("<4sH8sBII4dq")
_CRC = struct.Struct("<I")


class TableFormatError(ValueError):
    pass


@dataclass
class LgfTable:
    stencil: str
    dim: int
    extent: int
    J: int
    eps_a: float
    eps_r: float
    t_min: float
    T_min: float
    values: np.ndarray
    timestamp: int = 0
    evaluations: int = 0
    _index: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype="<f8")
        if self.values.size != comb(self.extent + self.dim, self.dim):
            raise ValueError("value count does not match the canonical tuple count")

    @property
    def tuples(self) -> list[tuple[int, ...]]:
        return canonical_tuples(self.extent, self.dim)

    def lookup(self, n) -> float:
        """Value at any index; signs and order of the components are irrelevant."""
        if self._index is None:
            self._index = {t: i for i, t in enumerate(self.tuples)}
        key = canonical(n)
        if len(key) != self.dim:
            raise ValueError(f"expected {self.dim} indices")
        if key[-1] > self.extent:
            raise IndexError(f"{tuple(n)} lies outside the table extent {self.extent}")
        return float(self.values[self._index[key]])

    def dense(self) -> np.ndarray:
        """Full array over ``[0, extent]^dim`` filled by symmetry."""
        return expand_symmetric(self.values, self.extent, self.dim)

    # -- persistence -------------------------------------------------------
    def to_bytes(self) -> bytes:
        name = self.stencil.encode("ascii")
        if len(name) > 8:
            raise ValueError("stencil id longer than 8 bytes")
        head = _HEADER.pack(MAGIC, VERSION, name.ljust(8, b"\0"), self.dim, self.extent,
                            self.J, self.eps_a, self.eps_r, self.t_min, self.T_min,
                            int(self.timestamp))
        payload = self.values.astype("<f8").tobytes()
        return head + payload + _CRC.pack(zlib.crc32(payload))

    @classmethod
    def from_bytes(cls, data: bytes) -> "LgfTable":
        if len(data) < _HEADER.size + _CRC.size:
            raise TableFormatError("file too short")
        (magic, ver, name, dim, extent, J, ea, er, tmin, Tmin,
         stamp) = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise TableFormatError("bad magic")
        if ver != VERSION:
            raise TableFormatError(f"unsupported version {ver}")
        count = comb(extent + dim, dim)
        payload = data[_HEADER.size:-_CRC.size]
        if len(payload) != 8 * count:
            raise TableFormatError("payload length does not match header")
        (crc,) = _CRC.unpack(data[-_CRC.size:])
        if crc != zlib.crc32(payload):
            raise TableFormatError("CRC mismatch")
        values = np.frombuffer(payload, dtype="<f8").copy()
        return cls(name.rstrip(b"\0").decode("ascii"), dim, extent, J, ea, er, tmin, Tmin,
                   values, timestamp=stamp)

    def write(self, path, stamp: bool = True) -> None:
        if stamp and not self.timestamp:
            self.timestamp = int(time.time())
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path) -> "LgfTable":
        return cls.from_bytes(Path(path).read_bytes())

    def write_csv(self, path) -> None:
        cols = ",".join(f"n{i + 1}" for i in range(self.dim))
        lines = [f"{cols},value"]
        for n, v in zip(self.tuples, self.values):
            lines.append(",".join(str(x) for x in n) + f",{v:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")
