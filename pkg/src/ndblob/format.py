"""Binary blob format for dense n-dimensional numeric arrays.

A blob is a small header followed by the raw element bytes in
column-major order (elements consecutive along the first dimension,
the FORTRAN/LAPACK convention). All multi-byte fields are
little-endian. Two storage classes exist:

* short: the whole blob (header + payload) fits in 8000 bytes, at most
  6 dimensions, each dimension at most 32767. Fixed 24-byte header::

      byte  0        flags (bit 0 = 0 for short; other bits reserved)
      byte  1        element type code (1..8)
      byte  2        rank (1..6)
      byte  3        reserved
      bytes 4..7     total element count, u32
      bytes 8..19    six u16 dimension sizes (unused slots zero)
      bytes 20..23   reserved

* max: everything else, up to 32 dimensions, each at most 2**31 - 1.
  Self-delimiting header of 16 + 4 * rank bytes::

      byte  0        flags (bit 0 = 1 for max)
      byte  1        element type code
      bytes 2..3     reserved
      bytes 4..7     rank, u32
      bytes 8..15    total element count, u64
      then           rank u32 dimension sizes

Reserved bytes encode as zero and are ignored on decode.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .errors import BoundsError, FormatError, ShapeError
from .reader import BlockReader

__all__ = [
    "ElementType",
    "StorageClass",
    "ArrayHeader",
    "ArrayBlob",
    "SHORT_BLOB_LIMIT",
    "SHORT_HEADER_SIZE",
    "SHORT_MAX_RANK",
    "SHORT_MAX_DIM",
    "MAX_MAX_RANK",
    "MAX_MAX_DIM",
    "classify",
    "strides_for",
    "linearize",
    "delinearize",
    "encode_header",
    "decode_header",
    "header_from_bytes",
    "unpack_scalar",
    "from_numpy",
    "to_numpy",
]

SHORT_BLOB_LIMIT = 8000     # on-page budget for a whole short blob
SHORT_HEADER_SIZE = 24
SHORT_MAX_RANK = 6
SHORT_MAX_DIM = 32767       # dimension sizes are signed 16-bit in short headers
MAX_MAX_RANK = 32           # parser safety cap for max headers
MAX_MAX_DIM = 2**31 - 1     # dimension sizes are signed 32-bit in max headers

_FLAG_MAX = 0x01


class ElementType(enum.IntEnum):
    """The eight supported element kinds; values are the on-disk codes."""

    INT8 = 1
    INT16 = 2
    INT32 = 3
    INT64 = 4
    FLOAT32 = 5
    FLOAT64 = 6
    COMPLEX64 = 7    # pairs of float32 (real, imag)
    COMPLEX128 = 8   # pairs of float64 (real, imag)

    @property
    def byte_width(self) -> int:
        return _BYTE_WIDTH[self]

    @property
    def is_complex(self) -> bool:
        return self in (ElementType.COMPLEX64, ElementType.COMPLEX128)

    @property
    def is_integer(self) -> bool:
        return self in (ElementType.INT8, ElementType.INT16,
                        ElementType.INT32, ElementType.INT64)

    @property
    def is_float(self) -> bool:
        return self in (ElementType.FLOAT32, ElementType.FLOAT64)

    @property
    def dtype(self) -> np.dtype:
        """Matching little-endian numpy dtype."""
        return _DTYPE[self]

    @classmethod
    def from_code(cls, code: int) -> "ElementType":
        try:
            return cls(code)
        except ValueError:
            raise FormatError(f"unknown element type code {code}") from None

    @classmethod
    def from_dtype(cls, dtype) -> "ElementType":
        kind = np.dtype(dtype).newbyteorder("<")
        for elem, dt in _DTYPE.items():
            if dt == kind:
                return elem
        raise FormatError(f"no element type matches dtype {np.dtype(dtype)}")

    @classmethod
    def parse(cls, name: str) -> "ElementType":
        """Resolve a spelled-out name ('float64') or short alias ('f64')."""
        try:
            return _NAMES[str(name).strip().lower()]
        except KeyError:
            raise FormatError(
                f"unknown element type {name!r}; use one of "
                f"{', '.join(sorted(set(_NAMES)))}") from None


_BYTE_WIDTH = {
    ElementType.INT8: 1,
    ElementType.INT16: 2,
    ElementType.INT32: 4,
    ElementType.INT64: 8,
    ElementType.FLOAT32: 4,
    ElementType.FLOAT64: 8,
    ElementType.COMPLEX64: 8,
    ElementType.COMPLEX128: 16,
}

_NAMES = {
    "i8": ElementType.INT8, "int8": ElementType.INT8,
    "i16": ElementType.INT16, "int16": ElementType.INT16,
    "i32": ElementType.INT32, "int32": ElementType.INT32,
    "i64": ElementType.INT64, "int64": ElementType.INT64,
    "f32": ElementType.FLOAT32, "float32": ElementType.FLOAT32,
    "f64": ElementType.FLOAT64, "float64": ElementType.FLOAT64,
    "c64": ElementType.COMPLEX64, "complex64": ElementType.COMPLEX64,
    "c128": ElementType.COMPLEX128, "complex128": ElementType.COMPLEX128,
}

_DTYPE = {
    ElementType.INT8: np.dtype("<i1"),
    ElementType.INT16: np.dtype("<i2"),
    ElementType.INT32: np.dtype("<i4"),
    ElementType.INT64: np.dtype("<i8"),
    ElementType.FLOAT32: np.dtype("<f4"),
    ElementType.FLOAT64: np.dtype("<f8"),
    ElementType.COMPLEX64: np.dtype("<c8"),
    ElementType.COMPLEX128: np.dtype("<c16"),
}


_SCALAR_STRUCT = {
    ElementType.INT8: struct.Struct("<b"),
    ElementType.INT16: struct.Struct("<h"),
    ElementType.INT32: struct.Struct("<i"),
    ElementType.INT64: struct.Struct("<q"),
    ElementType.FLOAT32: struct.Struct("<f"),
    ElementType.FLOAT64: struct.Struct("<d"),
    ElementType.COMPLEX64: struct.Struct("<2f"),
    ElementType.COMPLEX128: struct.Struct("<2d"),
}


def unpack_scalar(elem: ElementType, buffer, offset: int = 0):
    """One element out of payload bytes, as a Python scalar."""
    if elem.is_complex:
        re, im = _SCALAR_STRUCT[elem].unpack_from(buffer, offset)
        return complex(re, im)
    return _SCALAR_STRUCT[elem].unpack_from(buffer, offset)[0]


class StorageClass(enum.Enum):
    SHORT = "short"
    MAX = "max"


def classify(elem: ElementType, dims: Sequence[int]) -> StorageClass:
    """Pick the storage class for an array of the given type and shape.

    Short iff the whole blob fits the 8000-byte on-page budget AND the
    rank and dimension limits of the 24-byte header hold.
    """
    dims = tuple(int(d) for d in dims)
    total = prod(dims)
    if (len(dims) <= SHORT_MAX_RANK
            and all(d <= SHORT_MAX_DIM for d in dims)
            and SHORT_HEADER_SIZE + total * elem.byte_width <= SHORT_BLOB_LIMIT):
        return StorageClass.SHORT
    return StorageClass.MAX


def strides_for(dims: Sequence[int]) -> tuple[int, ...]:
    """Column-major element strides: stride[0] = 1, stride[d] = prod(dims[:d])."""
    out = []
    acc = 1
    for d in dims:
        out.append(acc)
        acc *= int(d)
    return tuple(out)


def linearize(dims: Sequence[int], indices: Sequence[int]) -> int:
    """Map a multi-index to its column-major linear position."""
    if len(indices) != len(dims):
        raise ShapeError(
            f"index has {len(indices)} coordinates, array has rank {len(dims)}")
    linear = 0
    stride = 1
    for d, (n, i) in enumerate(zip(dims, indices)):
        i = int(i)
        if not 0 <= i < n:
            raise BoundsError(
                f"index {i} out of bounds for dimension {d} of size {n}")
        linear += i * stride
        stride *= int(n)
    return linear


def delinearize(dims: Sequence[int], linear: int) -> tuple[int, ...]:
    """Inverse of :func:`linearize`."""
    total = prod(dims)
    if not 0 <= linear < total:
        raise BoundsError(f"linear index {linear} out of bounds for {total} elements")
    coords = []
    for n in dims:
        coords.append(linear % n)
        linear //= n
    return tuple(coords)


@dataclass(frozen=True)
class ArrayHeader:
    """Decoded blob header. `rank` and `total_count` derive from `dims`."""

    storage: StorageClass
    elem: ElementType
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        self._validate()

    def _validate(self) -> None:
        if self.rank < 1:
            raise FormatError("array rank must be at least 1")
        if any(d < 0 for d in self.dims):
            raise FormatError(f"negative dimension size in {self.dims}")
        if self.storage is StorageClass.SHORT:
            if self.rank > SHORT_MAX_RANK:
                raise FormatError(
                    f"short arrays allow at most {SHORT_MAX_RANK} dimensions, got {self.rank}")
            if any(d > SHORT_MAX_DIM for d in self.dims):
                raise FormatError(
                    f"short array dimension exceeds {SHORT_MAX_DIM}: {self.dims}")
            if self.blob_size > SHORT_BLOB_LIMIT:
                raise FormatError(
                    f"short blob would be {self.blob_size} bytes, "
                    f"limit is {SHORT_BLOB_LIMIT}")
        else:
            if self.rank > MAX_MAX_RANK:
                raise FormatError(
                    f"max arrays allow at most {MAX_MAX_RANK} dimensions, got {self.rank}")
            if any(d > MAX_MAX_DIM for d in self.dims):
                raise FormatError(
                    f"max array dimension exceeds {MAX_MAX_DIM}: {self.dims}")
            if self.total_count >= 2**64:
                raise FormatError("dimension product overflows the 64-bit count field")

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def total_count(self) -> int:
        return prod(self.dims)

    @property
    def header_size(self) -> int:
        if self.storage is StorageClass.SHORT:
            return SHORT_HEADER_SIZE
        return 16 + 4 * self.rank

    @property
    def payload_size(self) -> int:
        return self.total_count * self.elem.byte_width

    @property
    def blob_size(self) -> int:
        return self.header_size + self.payload_size

    @property
    def strides(self) -> tuple[int, ...]:
        return strides_for(self.dims)


def encode_header(header: ArrayHeader) -> bytes:
    """Serialize a header to its exact byte layout (24 B short, 16+4r max)."""
    if header.storage is StorageClass.SHORT:
        dims6 = header.dims + (0,) * (SHORT_MAX_RANK - header.rank)
        return struct.pack(
            "<BBBBI6HI",
            0, header.elem, header.rank, 0,
            header.total_count, *dims6, 0)
    return struct.pack(
        f"<BBHIQ{header.rank}I",
        _FLAG_MAX, header.elem, 0,
        header.rank, header.total_count, *header.dims)


def _parse_short(head24: bytes) -> ArrayHeader:
    elem = ElementType.from_code(head24[1])
    rank = head24[2]
    (count,) = struct.unpack_from("<I", head24, 4)
    if rank < 1:
        raise FormatError("short header has rank 0")
    if rank > SHORT_MAX_RANK:
        raise FormatError(f"short header rank {rank} exceeds {SHORT_MAX_RANK}")
    dims = struct.unpack_from(f"<{rank}H", head24, 8)
    if any(d > SHORT_MAX_DIM for d in dims):
        raise FormatError(
            f"short header dimension exceeds {SHORT_MAX_DIM}: {dims}")
    if prod(dims) != count:
        raise FormatError(
            f"header count {count} does not match dimension product {prod(dims)}")
    return ArrayHeader(StorageClass.SHORT, elem, dims)


def _parse_max(head16: bytes, dim_bytes: bytes) -> ArrayHeader:
    elem = ElementType.from_code(head16[1])
    (rank,) = struct.unpack_from("<I", head16, 4)
    (count,) = struct.unpack_from("<Q", head16, 8)
    dims = struct.unpack(f"<{rank}I", dim_bytes)
    if any(d > MAX_MAX_DIM for d in dims):
        raise FormatError(f"max header dimension exceeds {MAX_MAX_DIM}: {dims}")
    if prod(dims) != count:
        raise FormatError(
            f"header count {count} does not match dimension product {prod(dims)}")
    return ArrayHeader(StorageClass.MAX, elem, dims)


def _max_rank(head16: bytes) -> int:
    (rank,) = struct.unpack_from("<I", head16, 4)
    if rank < 1:
        raise FormatError("max header has rank 0")
    if rank > MAX_MAX_RANK:
        raise FormatError(f"max header rank {rank} exceeds {MAX_MAX_RANK}")
    return rank


def decode_header(reader: BlockReader) -> ArrayHeader:
    """Decode a header from the start of `reader`.

    Reads exactly 24 bytes for a short blob and 16 + 4 * rank bytes for
    a max blob. Reserved bytes are ignored; everything else is checked.
    """
    head = reader.read_at(0, 16)
    if not head[0] & _FLAG_MAX:
        return _parse_short(head + reader.read_at(16, 8))
    rank = _max_rank(head)
    return _parse_max(head, reader.read_at(16, 4 * rank))


def header_from_bytes(data: bytes) -> ArrayHeader:
    """Decode a header from an in-memory blob prefix (hot path: no
    reader machinery, just struct unpacking over the buffer)."""
    if len(data) < 16:
        raise FormatError(
            f"truncated input: need bytes [0, 16) but source has {len(data)}")
    if not data[0] & _FLAG_MAX:
        if len(data) < SHORT_HEADER_SIZE:
            raise FormatError(
                f"truncated input: short header needs {SHORT_HEADER_SIZE} "
                f"bytes, got {len(data)}")
        return _parse_short(data[:SHORT_HEADER_SIZE])
    rank = _max_rank(data)
    if len(data) < 16 + 4 * rank:
        raise FormatError(
            f"truncated input: max header needs {16 + 4 * rank} bytes, "
            f"got {len(data)}")
    return _parse_max(data, data[16:16 + 4 * rank])


@dataclass(frozen=True)
class ArrayBlob:
    """An immutable array value: header plus column-major payload bytes.

    This is the unit that lives in a SQL column or an ``.ablob`` file.
    Every manipulating operation returns a new blob.
    """

    header: ArrayHeader
    payload: bytes = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "payload", bytes(self.payload))
        if len(self.payload) != self.header.payload_size:
            raise FormatError(
                f"payload is {len(self.payload)} bytes, header implies "
                f"{self.header.payload_size}")

    # convenience passthroughs
    @property
    def elem(self) -> ElementType:
        return self.header.elem

    @property
    def storage(self) -> StorageClass:
        return self.header.storage

    @property
    def dims(self) -> tuple[int, ...]:
        return self.header.dims

    @property
    def rank(self) -> int:
        return self.header.rank

    @property
    def total_count(self) -> int:
        return self.header.total_count

    def to_bytes(self) -> bytes:
        return encode_header(self.header) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "ArrayBlob":
        data = bytes(data)
        header = header_from_bytes(data)
        expected = header.header_size + header.payload_size
        if len(data) != expected:
            raise FormatError(
                f"blob is {len(data)} bytes, header implies {expected}")
        return cls(header, data[header.header_size:])

    def to_numpy(self) -> np.ndarray:
        return to_numpy(self)

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "ArrayBlob":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())

    def __len__(self) -> int:
        return self.header.blob_size


def to_numpy(blob: ArrayBlob) -> np.ndarray:
    """Read-only numpy view of the blob's elements, shaped like the array.

    The buffer is shared with the payload, so this never copies; the
    result is column-major (``order='F'``) by construction.
    """
    flat = np.frombuffer(blob.payload, dtype=blob.elem.dtype)
    return flat.reshape(blob.dims, order="F")


def from_numpy(array: np.ndarray, elem: ElementType | None = None) -> ArrayBlob:
    """Encode a numpy array as a blob.

    The element type is inferred from the dtype unless given explicitly
    (in which case the array is cast). Zero-rank inputs become shape
    ``(1,)``, since rank-0 arrays do not exist in this format.
    """
    array = np.asarray(array)
    if elem is None:
        elem = ElementType.from_dtype(array.dtype)
    if array.ndim == 0:
        array = array.reshape(1)
    payload = array.astype(elem.dtype, copy=False).tobytes(order="F")
    header = ArrayHeader(classify(elem, array.shape), elem, array.shape)
    return ArrayBlob(header, payload)
