"""Versioned binary serialization of :class:`CubicalSet`.

Layout (big-endian)::

    magic  b"BBCS"          4 bytes
    version                 u8   (currently 1)
    dims                    u8
    box numerator length    u16, then ASCII decimal digits
    box denominator length  u16, then ASCII decimal digits
    resolutions             dims x u32
    occupancy               packbits of the row-major bitset (MSB first)
"""

from __future__ import annotations

import struct
from fractions import Fraction

import numpy as np

from .raster import CubicalSet

MAGIC = b"BBCS"
VERSION = 1


class CubicalFormatError(ValueError):
    pass


def _put_int(value: int) -> bytes:
    digits = str(value).encode("ascii")
    return struct.pack(">H", len(digits)) + digits


def dumps(cs: CubicalSet) -> bytes:
    box = Fraction(cs.box)
    head = MAGIC + struct.pack(">BB", VERSION, cs.dim)
    head += _put_int(box.numerator) + _put_int(box.denominator)
    head += struct.pack(f">{cs.dim}I", *cs.resolution)
    return head + np.packbits(cs.occupancy.ravel(order="C")).tobytes()


def loads(data: bytes) -> CubicalSet:
    if data[:4] != MAGIC:
        raise CubicalFormatError("not a cubical set file (bad magic)")
    try:
        version, dims = struct.unpack_from(">BB", data, 4)
        if version != VERSION:
            raise CubicalFormatError(f"unsupported format version {version}")
        pos = 6
        parts = []
        for _ in range(2):
            (length,) = struct.unpack_from(">H", data, pos)
            pos += 2
            parts.append(int(data[pos : pos + length].decode("ascii")))
            pos += length
        res = struct.unpack_from(f">{dims}I", data, pos)
        pos += 4 * dims
    except (struct.error, ValueError) as exc:
        raise CubicalFormatError(f"truncated or corrupt header: {exc}") from None
    total = int(np.prod(res))
    payload = np.frombuffer(data[pos:], dtype=np.uint8)
    if len(payload) != (total + 7) // 8:
        raise CubicalFormatError(f"expected {(total + 7) // 8} payload bytes, found {len(payload)}")
    bits = np.unpackbits(payload)[:total].astype(bool).reshape(res)
    return CubicalSet(Fraction(parts[0], parts[1]), res, bits)


def save(cs: CubicalSet, path) -> None:
    from ..report import atomic_write_bytes

    atomic_write_bytes(path, dumps(cs))


def load(path) -> CubicalSet:
    with open(path, "rb") as fh:
        return loads(fh.read())
