"""Array manipulation operations.

All operations are pure functions: blobs are immutable, every update
returns a new blob, and inputs are never touched. Anything that changes
the array's size re-picks the storage class, so a small window cut out
of a max array comes back as a short blob that fits on a page.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .errors import (
    BoundsError,
    CapacityError,
    FormatError,
    RangeError,
    ShapeError,
    TypeMismatchError,
)
from .format import (
    ArrayBlob,
    ArrayHeader,
    ElementType,
    StorageClass,
    classify,
    decode_header,
    delinearize,
    linearize,
    to_numpy,
    unpack_scalar,
)
from .reader import BlockReader

__all__ = [
    "SubarrayRange",
    "check_elem",
    "make_vector",
    "make_matrix",
    "make_filled",
    "item",
    "item_streamed",
    "update_item",
    "subarray",
    "subarray_streamed",
    "reshape",
    "cast_raw",
    "raw",
    "convert_elem",
    "convert_storage",
]

_INT_BOUNDS = {
    ElementType.INT8: (-(2**7), 2**7 - 1),
    ElementType.INT16: (-(2**15), 2**15 - 1),
    ElementType.INT32: (-(2**31), 2**31 - 1),
    ElementType.INT64: (-(2**63), 2**63 - 1),
}

# widest finite magnitude of the float component for each non-integer type
_FLOAT_MAX = {
    ElementType.FLOAT32: float(np.finfo(np.float32).max),
    ElementType.FLOAT64: float(np.finfo(np.float64).max),
    ElementType.COMPLEX64: float(np.finfo(np.float32).max),
    ElementType.COMPLEX128: float(np.finfo(np.float64).max),
}


def check_elem(blob: ArrayBlob, elem: ElementType | None) -> None:
    """Runtime type tag check: reject a blob bound to the wrong element type."""
    if elem is not None and blob.elem is not elem:
        raise TypeMismatchError(
            f"element type mismatch: expected {elem.name}, got {blob.elem.name}")


def _scalar(elem: ElementType, value, where: str = "value"):
    """Coerce one Python number to `elem`, or raise."""
    if isinstance(value, (complex, np.complexfloating)) and not isinstance(
            value, (float, int, np.floating, np.integer)):
        if not elem.is_complex:
            raise TypeMismatchError(
                f"complex {where} not representable in {elem.name}")
        _check_float(elem, value.real, where)
        _check_float(elem, value.imag, where)
        return elem.dtype.type(complex(value))
    if isinstance(value, (bool, int, np.integer)):
        value = int(value)
        if elem.is_integer:
            lo, hi = _INT_BOUNDS[elem]
            if not lo <= value <= hi:
                raise RangeError(
                    f"{where} {value} out of range for {elem.name} [{lo}, {hi}]")
            return elem.dtype.type(value)
        try:
            as_float = float(value)
        except OverflowError:
            raise RangeError(
                f"{where} {value} out of range for {elem.name}") from None
        _check_float(elem, as_float, where)
        return elem.dtype.type(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if elem.is_integer:
            if not (np.isfinite(value) and value.is_integer()):
                raise RangeError(
                    f"{where} {value!r} is not an integer, cannot store in {elem.name}")
            return _scalar(elem, int(value), where)
        _check_float(elem, value, where)
        return elem.dtype.type(value)
    raise TypeMismatchError(
        f"{where} of type {type(value).__name__} not representable in {elem.name}")


def _check_float(elem: ElementType, value: float, where: str) -> None:
    # non-finite values are representable; finite overflow to inf is not
    if np.isfinite(value) and abs(value) > _FLOAT_MAX[elem]:
        raise RangeError(f"{where} {value!r} overflows {elem.name}")


def _pack_values(elem: ElementType, values: Sequence) -> bytes:
    out = np.empty(len(values), dtype=elem.dtype)
    for i, v in enumerate(values):
        out[i] = _scalar(elem, v, where=f"value at position {i}")
    return out.tobytes()


def _build(elem: ElementType, dims: Sequence[int], payload: bytes) -> ArrayBlob:
    return ArrayBlob(ArrayHeader(classify(elem, dims), elem, dims), payload)


def make_vector(elem: ElementType, values: Sequence) -> ArrayBlob:
    """Rank-1 array from listed values; an empty list gives dims [0]."""
    values = list(values)
    return _build(elem, (len(values),), _pack_values(elem, values))


def make_matrix(elem: ElementType, rows: int, cols: int, values: Sequence) -> ArrayBlob:
    """Rank-2 array; values are consumed in storage (column-major) order.

    ``make_matrix(e, 2, 2, (a, b, c, d))`` places a at [0,0], b at [1,0],
    c at [0,1] and d at [1,1].
    """
    values = list(values)
    if rows < 0 or cols < 0:
        raise ShapeError(f"negative matrix shape {rows}x{cols}")
    if len(values) != rows * cols:
        raise ShapeError(
            f"{rows}x{cols} matrix needs {rows * cols} values, got {len(values)}")
    return _build(elem, (rows, cols), _pack_values(elem, values))


def make_filled(elem: ElementType, dims: Sequence[int], fill) -> ArrayBlob:
    """Array of the given shape with every element equal to `fill`."""
    dims = tuple(int(d) for d in dims)
    one = _scalar(elem, fill, where="fill value")
    payload = np.full(prod(dims), one, dtype=elem.dtype).tobytes()
    return _build(elem, dims, payload)


def item(blob: ArrayBlob, indices: Sequence[int], elem: ElementType | None = None):
    """Element at a zero-based multi-index, as a Python scalar."""
    check_elem(blob, elem)
    linear = linearize(blob.dims, indices)
    return unpack_scalar(blob.elem, blob.payload, linear * blob.elem.byte_width)


def item_streamed(reader: BlockReader, indices: Sequence[int],
                  elem: ElementType | None = None):
    """Like :func:`item`, but pulls only the header and one element
    through the reader. Requires a max blob (short blobs are on-page
    values and are read whole)."""
    header = decode_header(reader)
    _require_max(header)
    if elem is not None and header.elem is not elem:
        raise TypeMismatchError(
            f"element type mismatch: expected {elem.name}, got {header.elem.name}")
    linear = linearize(header.dims, indices)
    w = header.elem.byte_width
    data = reader.read_at(header.header_size + linear * w, w)
    return unpack_scalar(header.elem, data)


def update_item(blob: ArrayBlob, indices: Sequence[int], value,
                elem: ElementType | None = None) -> ArrayBlob:
    """New blob with one element replaced; the input is unchanged."""
    check_elem(blob, elem)
    linear = linearize(blob.dims, indices)
    scalar = _scalar(blob.elem, value)
    w = blob.elem.byte_width
    buf = bytearray(blob.payload)
    buf[linear * w:(linear + 1) * w] = scalar.tobytes()
    return ArrayBlob(blob.header, bytes(buf))


@dataclass(frozen=True)
class SubarrayRange:
    """Per-dimension (offset, length) pairs naming a contiguous window."""

    offset: tuple[int, ...]
    length: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "offset", tuple(int(o) for o in self.offset))
        object.__setattr__(self, "length", tuple(int(n) for n in self.length))
        if len(self.offset) != len(self.length):
            raise ShapeError(
                f"range has {len(self.offset)} offsets but {len(self.length)} lengths")
        if any(o < 0 for o in self.offset) or any(n < 0 for n in self.length):
            raise BoundsError("range offsets and lengths must be nonnegative")

    @property
    def rank(self) -> int:
        return len(self.offset)

    def check_against(self, dims: Sequence[int]) -> None:
        if self.rank != len(dims):
            raise ShapeError(
                f"range rank {self.rank} does not match array rank {len(dims)}")
        for d, (o, n, size) in enumerate(zip(self.offset, self.length, dims)):
            if o + n > size:
                raise BoundsError(
                    f"range [{o}, {o + n}) exceeds dimension {d} of size {size}")


def _squeeze_dims(lengths: Sequence[int]) -> tuple[int, ...]:
    kept = tuple(n for n in lengths if n != 1)
    return kept if kept else (1,)


def subarray(blob: ArrayBlob, ranges: SubarrayRange, squeeze: bool = False,
             elem: ElementType | None = None) -> ArrayBlob:
    """Contiguous window of the array.

    With `squeeze`, every dimension of length 1 is dropped from the
    result (a window that is 1 everywhere becomes a one-element vector).
    The result's storage class is recomputed from its own size.
    """
    check_elem(blob, elem)
    ranges.check_against(blob.dims)
    window = to_numpy(blob)[tuple(
        slice(o, o + n) for o, n in zip(ranges.offset, ranges.length))]
    dims = _squeeze_dims(ranges.length) if squeeze else ranges.length
    return _build(blob.elem, dims, window.tobytes(order="F"))


def _read_runs(reader: BlockReader, header: ArrayHeader,
               ranges: SubarrayRange) -> bytes:
    """Fetch the window as one read per maximal run of consecutive elements."""
    dims, w = header.dims, header.elem.byte_width
    base = header.header_size
    if prod(ranges.length) == 0:
        return b""
    p = 0
    while p < len(dims) and ranges.offset[p] == 0 and ranges.length[p] == dims[p]:
        p += 1
    if p == len(dims):
        return reader.read_at(base, header.total_count * w)
    strides = header.strides
    run_elems = prod(dims[:p]) * ranges.length[p]
    run_start0 = ranges.offset[p] * strides[p]
    # vary the lowest-stride free dimension fastest: ascending linear order
    upper = [range(ranges.offset[d], ranges.offset[d] + ranges.length[d])
             for d in range(len(dims) - 1, p, -1)]
    chunks = []
    for combo in itertools.product(*upper):
        start = run_start0 + sum(
            i * strides[d] for i, d in zip(combo, range(len(dims) - 1, p, -1)))
        chunks.append(reader.read_at(base + start * w, run_elems * w))
    return b"".join(chunks)


def subarray_streamed(reader: BlockReader, ranges: SubarrayRange,
                      squeeze: bool = False,
                      elem: ElementType | None = None) -> ArrayBlob:
    """Window of a max blob read through the counting reader.

    Only the byte runs covering the requested elements are fetched, so
    a small window of a large array touches a small fraction of the
    payload. Result is identical to materializing the whole blob and
    calling :func:`subarray`.
    """
    header = decode_header(reader)
    _require_max(header)
    if elem is not None and header.elem is not elem:
        raise TypeMismatchError(
            f"element type mismatch: expected {elem.name}, got {header.elem.name}")
    ranges.check_against(header.dims)
    payload = _read_runs(reader, header, ranges)
    dims = _squeeze_dims(ranges.length) if squeeze else ranges.length
    return _build(header.elem, dims, payload)


def _require_max(header: ArrayHeader) -> None:
    if header.storage is not StorageClass.MAX:
        raise TypeMismatchError(
            "streamed access requires a max blob; short blobs are single "
            "on-page values")


def reshape(blob: ArrayBlob, new_dims: Sequence[int],
            elem: ElementType | None = None) -> ArrayBlob:
    """Same elements, new shape; the payload bytes are reused verbatim.

    Keeps the source storage class when the new shape still satisfies
    its limits, otherwise re-encodes as a max blob.
    """
    check_elem(blob, elem)
    new_dims = tuple(int(d) for d in new_dims)
    if prod(new_dims) != blob.total_count:
        raise ShapeError(
            f"reshape {blob.dims} -> {new_dims} changes the element count "
            f"({blob.total_count} -> {prod(new_dims)})")
    try:
        header = ArrayHeader(blob.storage, blob.elem, new_dims)
    except FormatError:
        header = ArrayHeader(StorageClass.MAX, blob.elem, new_dims)
    return ArrayBlob(header, blob.payload)


def cast_raw(elem: ElementType, dims: Sequence[int], raw_bytes: bytes) -> ArrayBlob:
    """Adopt raw consecutive numbers as an array by prefixing a header."""
    dims = tuple(int(d) for d in dims)
    expected = prod(dims) * elem.byte_width
    if len(raw_bytes) != expected:
        raise FormatError(
            f"raw payload is {len(raw_bytes)} bytes, {elem.name}{list(dims)} "
            f"needs {expected}")
    return _build(elem, dims, bytes(raw_bytes))


def raw(blob: ArrayBlob, elem: ElementType | None = None) -> bytes:
    """The payload bytes with the header stripped."""
    check_elem(blob, elem)
    return blob.payload


def _first_bad(mask: np.ndarray, dims: Sequence[int]) -> str:
    linear = int(np.argmax(mask.reshape(-1, order="F")))
    return f"element {list(delinearize(dims, linear))}"


def convert_elem(blob: ArrayBlob, target: ElementType,
                 policy: str = "strict") -> ArrayBlob:
    """Elementwise conversion to another element type.

    strict is lossless-or-error: integer values must survive exactly
    (no rounding, no overflow) and finite floats must not overflow the
    narrower float. saturate rounds half-to-even into integer targets,
    clamps integer overflow, maps NaN to 0 for integer targets, and
    keeps IEEE rounding (including overflow to inf) for float targets.
    Complex to real is undefined; real to complex gets imaginary 0.
    """
    if policy not in ("strict", "saturate"):
        raise ValueError(f"unknown conversion policy {policy!r}")
    src = blob.elem
    if src.is_complex and not target.is_complex:
        raise TypeMismatchError(
            f"cannot convert complex {src.name} to real {target.name}")
    values = to_numpy(blob)
    if target.is_integer:
        out = _to_integer(values, src, target, policy, blob.dims)
    else:
        out = _to_float_like(values, src, target, policy, blob.dims)
    return _build(target, blob.dims, out.tobytes(order="F"))


def _to_integer(values, src, target, policy, dims):
    lo, hi = _INT_BOUNDS[target]
    if src.is_integer:
        bad = (values < lo) | (values > hi)
        if policy == "strict":
            if bad.any():
                raise RangeError(
                    f"{_first_bad(bad, dims)} out of range for {target.name}")
            return values.astype(target.dtype)
        return np.clip(values, lo, hi).astype(target.dtype)
    with np.errstate(invalid="ignore"):
        rounded = np.rint(values)
    finite = np.isfinite(values)
    if policy == "strict":
        if not finite.all():
            raise RangeError(
                f"{_first_bad(~finite, dims)} is not finite, cannot store "
                f"in {target.name}")
        if (rounded != values).any():
            raise RangeError(
                f"{_first_bad(rounded != values, dims)} is not an integer "
                f"value, strict conversion to {target.name} refused")
    # float bounds: hi may not be representable, so test against hi + 1
    # (a power of two, always exact in the payload float width)
    too_hi = finite & (rounded >= float(hi + 1))
    too_lo = finite & (rounded < float(lo))
    if policy == "strict":
        bad = too_hi | too_lo
        if bad.any():
            raise RangeError(
                f"{_first_bad(bad, dims)} out of range for {target.name}")
        return rounded.astype(target.dtype)
    out = np.zeros(values.shape, dtype=target.dtype, order="F")
    ok = finite & ~too_hi & ~too_lo
    out[ok] = rounded[ok].astype(target.dtype)
    out[too_hi | (~finite & (values > 0))] = hi
    out[too_lo | (~finite & (values < 0))] = lo
    return out


def _to_float_like(values, src, target, policy, dims):
    with np.errstate(over="ignore", invalid="ignore"):
        converted = values.astype(target.dtype)
    if policy == "saturate":
        return converted
    if src.is_integer:
        # exactness check: the float must map back to the same integer
        back = np.rint(converted.real)
        lo, hi = _INT_BOUNDS[src]
        in_range = (back >= float(lo)) & (back < float(hi + 1)) & np.isfinite(back)
        restored = np.where(in_range, back, 0).astype(src.dtype)
        bad = ~in_range | (restored != values)
        if bad.any():
            raise RangeError(
                f"{_first_bad(bad, dims)} not exactly representable in "
                f"{target.name}")
        return converted
    # float or complex source: strict rejects finite values that overflow
    overflow = np.isfinite(values) & ~np.isfinite(converted)
    if src.is_complex:
        overflow = (
            (np.isfinite(values.real) & ~np.isfinite(converted.real))
            | (np.isfinite(values.imag) & ~np.isfinite(converted.imag)))
    if overflow.any():
        raise RangeError(
            f"{_first_bad(overflow, dims)} overflows {target.name}")
    return converted


def convert_storage(blob: ArrayBlob, target: StorageClass) -> ArrayBlob:
    """Re-encode the same logical array under the other storage class."""
    if blob.storage is target:
        return blob
    try:
        header = ArrayHeader(target, blob.elem, blob.dims)
    except FormatError as e:
        raise CapacityError(str(e)) from None
    return ArrayBlob(header, blob.payload)
