"""Bridges between row-per-element tables and array blobs.

An array can be assembled from (index, value) rows either through the
three-phase aggregate protocol (init / accumulate / finish) or in one
call from a row cursor; both paths produce byte-identical blobs and
row order never matters. The reverse direction expands a blob into one
row per element in ascending column-major order. A small CSV codec
carries the same rows through files: columns i_0..i_{r-1},value with a
mandatory header row.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    CoverageError,
    DuplicateCellError,
    FormatError,
    ShapeError,
)
from .format import (
    ArrayBlob,
    ArrayHeader,
    ElementType,
    classify,
    linearize,
    to_numpy,
)
from .ops import _scalar, make_vector
from .text import _formatter

__all__ = [
    "IndexedValue",
    "ConcatState",
    "concat_init",
    "concat_accumulate",
    "concat_finish",
    "concat_from_cursor",
    "to_table",
    "read_indexed_csv",
    "write_indexed_csv",
]


@dataclass(frozen=True)
class IndexedValue:
    """One table row: the element's coordinates (a rank-1 integer array
    blob, as they travel through SQL) and its value."""

    indices: ArrayBlob
    value: object

    @classmethod
    def of(cls, coords: Sequence[int], value) -> "IndexedValue":
        return cls(make_vector(ElementType.INT32, [int(c) for c in coords]), value)

    @property
    def coords(self) -> tuple[int, ...]:
        return _blob_coords(self.indices)


def _blob_coords(blob: ArrayBlob) -> tuple[int, ...]:
    if blob.rank != 1 or not blob.elem.is_integer:
        raise ShapeError(
            f"index argument must be a rank-1 integer array, got "
            f"{blob.elem.name} rank {blob.rank}")
    return tuple(int(v) for v in to_numpy(blob))


Row = Union[IndexedValue, tuple]


def _row_parts(row: Row) -> tuple[tuple[int, ...], object]:
    if isinstance(row, IndexedValue):
        return row.coords, row.value
    indices, value = row
    if isinstance(indices, ArrayBlob):
        return _blob_coords(indices), value
    return tuple(int(i) for i in indices), value


class ConcatState:
    """Accumulator for building one array from rows.

    Occupancy is tracked with one bit per cell so the state stays small
    even for large targets. Single-owner: do not share across threads.
    """

    def __init__(self, elem: ElementType, dims: tuple[int, ...], policy: str):
        self.elem = elem
        self.dims = dims
        self.policy = policy
        self.total = prod(dims)
        self.seen_count = 0
        self._data = bytearray(self.total * elem.byte_width)
        self._seen = bytearray((self.total + 7) // 8)

    def _mark(self, linear: int) -> bool:
        byte, bit = linear >> 3, 1 << (linear & 7)
        if self._seen[byte] & bit:
            return False
        self._seen[byte] |= bit
        self.seen_count += 1
        return True


def concat_init(elem: ElementType, dims_blob: ArrayBlob,
                policy: str = "strict") -> ConcatState:
    """Start assembling an array of the shape named by `dims_blob`
    (a rank-1 integer vector, the same argument Concat takes in SQL)."""
    if policy not in ("strict", "zero_fill"):
        raise ValueError(f"unknown concat policy {policy!r}")
    sizes = _blob_coords(dims_blob)
    if len(sizes) == 0:
        raise ShapeError("target shape must have at least one dimension")
    if any(s < 0 for s in sizes):
        raise ShapeError(f"target shape has a negative dimension: {list(sizes)}")
    return ConcatState(elem, sizes, policy)


def concat_accumulate(state: ConcatState, row: Row) -> ConcatState:
    """Write one row's value into its cell; duplicates are always errors."""
    coords, value = _row_parts(row)
    linear = linearize(state.dims, coords)
    scalar = _scalar(state.elem, value)
    if not state._mark(linear):
        raise DuplicateCellError(f"cell {list(coords)} assigned more than once")
    w = state.elem.byte_width
    state._data[linear * w:(linear + 1) * w] = scalar.tobytes()
    return state


def concat_finish(state: ConcatState) -> ArrayBlob:
    """Produce the assembled blob.

    Under the strict policy every cell must have been seen exactly
    once; zero_fill leaves unseen cells at additive zero.
    """
    if state.policy == "strict" and state.seen_count != state.total:
        missing = state.total - state.seen_count
        raise CoverageError(
            f"strict concat finished with {missing} of {state.total} cells unset")
    header = ArrayHeader(classify(state.elem, state.dims), state.elem, state.dims)
    return ArrayBlob(header, bytes(state._data))


def concat_from_cursor(elem: ElementType, dims_blob: ArrayBlob,
                       cursor: Iterable[Row],
                       policy: str = "strict") -> ArrayBlob:
    """One-call assembly from a row source; interchangeable with the
    three-phase path and produces byte-identical results."""
    state = concat_init(elem, dims_blob, policy)
    for row in cursor:
        concat_accumulate(state, row)
    return concat_finish(state)


def to_table(blob: ArrayBlob) -> Iterator[IndexedValue]:
    """Expand a blob into one row per element.

    Rows come out in ascending linear (column-major) order, exactly
    total_count of them, each cell once.
    """
    n = blob.total_count
    if n == 0:
        return
    coords = np.unravel_index(np.arange(n), blob.dims, order="F")
    flat = to_numpy(blob).reshape(-1, order="F")
    for i in range(n):
        yield IndexedValue.of([int(c[i]) for c in coords], flat[i].item())


def _csv_header(rank: int) -> list[str]:
    return [f"i_{d}" for d in range(rank)] + ["value"]


def write_indexed_csv(dest, blob: ArrayBlob) -> None:
    """Write the to_table rows as CSV (header row included)."""
    own = isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__")
    f = open(dest, "w", newline="") if own else dest
    try:
        fmt = _formatter(blob.elem)
        writer = csv.writer(f)
        writer.writerow(_csv_header(blob.rank))
        for row in to_table(blob):
            writer.writerow([*row.coords, fmt(row.value)])
    finally:
        if own:
            f.close()


def read_indexed_csv(src, elem: ElementType) -> Iterator[IndexedValue]:
    """Yield IndexedValue rows from a CSV file (path or text file object).

    The header row is mandatory and must be exactly i_0..i_{r-1},value.
    """
    own = isinstance(src, (str, bytes)) or hasattr(src, "__fspath__")
    f = open(src, "r", newline="") if own else src
    try:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("CSV is empty; a header row is required") from None
        rank = len(header) - 1
        if rank < 1 or [h.strip() for h in header] != _csv_header(rank):
            raise FormatError(
                f"CSV header must be i_0..i_{{r-1}},value; got {header}")
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != rank + 1:
                raise FormatError(
                    f"CSV line {lineno}: expected {rank + 1} columns, "
                    f"got {len(cells)}")
            try:
                coords = [int(c) for c in cells[:rank]]
                value = _parse_csv_value(elem, cells[rank])
            except ValueError as e:
                raise FormatError(f"CSV line {lineno}: {e}") from None
            yield IndexedValue.of(coords, value)
    finally:
        if own:
            f.close()


def _parse_csv_value(elem: ElementType, text: str):
    text = text.strip()
    if elem.is_integer:
        return int(text)
    if elem.is_complex:
        return complex(text)
    return float(text)
