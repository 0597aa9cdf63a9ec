"""sqlite3 bindings for the array operation surface.

`register_all(connection)` installs the whole function catalog on a
connection. Function names follow ``<Elem>Array[Max]_<Op>[_<n>]``;
the element prefixes mirror the host SQL type names::

    TinyIntArray  INT8        RealArray         FLOAT32
    SmallIntArray INT16       FloatArray        FLOAT64
    IntArray      INT32       ComplexRealArray  COMPLEX64
    BigIntArray   INT64       ComplexArray      COMPLEX128

so for example ``FloatArray_Item_1(v, 0)`` reads element 0 of a short
FLOAT64 vector and ``IntArrayMax_Subarray`` windows a max INT32 array.
Array arguments and results travel as the blob bytes; indexes and
scalars are native INTEGER/REAL values. Functions bound to one element
type and storage class reject blobs tagged otherwise, which is what
catches type mixups at run time.

sqlite has no table-valued functions, so ToTable is emulated with a
recursive-series recipe (see :func:`array_to_table_query`); the
Concat aggregate is a true aggregate usable under GROUP BY, and
ConcatQuery is the cursor-driven alternative that reads rows from a
query string.

sqlite3 on CPython masks messages of exceptions raised inside UDFs.
The registered functions record the underlying error per connection;
run statements through :class:`Session` (or call :func:`last_error`)
to get SQL errors that carry the real message.
"""

from __future__ import annotations

import functools
import sqlite3
from dataclasses import dataclass

from .backends import fft_forward, fft_inverse, svd
from .errors import (
    BlobError,
    BoundsError,
    FormatError,
    ShapeError,
    TypeMismatchError,
)
from .format import (
    ArrayBlob,
    ElementType,
    StorageClass,
    delinearize,
)
from .ops import (
    SubarrayRange,
    cast_raw,
    convert_elem,
    convert_storage,
    item,
    make_filled,
    make_matrix,
    make_vector,
    raw,
    reshape,
    subarray,
    update_item,
)
from .table import _blob_coords, concat_accumulate, concat_from_cursor, concat_finish, concat_init
from .text import _formatter, from_text, to_text

__all__ = [
    "ELEM_PREFIX",
    "FunctionBinding",
    "Session",
    "array_to_table_query",
    "array_to_table",
    "catalog",
    "last_error",
    "prefix_for",
    "register_all",
    "register_concat_aggregate",
    "to_table_function",
]

ELEM_PREFIX = {
    ElementType.INT8: "TinyIntArray",
    ElementType.INT16: "SmallIntArray",
    ElementType.INT32: "IntArray",
    ElementType.INT64: "BigIntArray",
    ElementType.FLOAT32: "RealArray",
    ElementType.FLOAT64: "FloatArray",
    ElementType.COMPLEX64: "ComplexRealArray",
    ElementType.COMPLEX128: "ComplexArray",
}

_MAX_VECTOR_ARITY = 6
_MAX_MATRIX_SIDE = 3
_MAX_INDEX_ARITY = 6


def prefix_for(elem: ElementType, storage: StorageClass) -> str:
    return ELEM_PREFIX[elem] + ("Max" if storage is StorageClass.MAX else "")


@dataclass(frozen=True)
class FunctionBinding:
    """One catalog entry: SQL name, the operation it dispatches to, the
    bound element type / storage class (None for generic helpers), and
    the fixed argument count."""

    sql_name: str
    target_op: str
    elem: ElementType | None
    storage: StorageClass | None
    arity: int
    kind: str = "scalar"  # or "aggregate"


class _ErrorChannel:
    """Last library error raised inside a UDF on one connection."""

    def __init__(self):
        self.last = None

    def record(self, exc: BlobError) -> None:
        self.last = exc

    def clear(self) -> None:
        self.last = None


# sqlite3.Connection is not weakref-able, so key by id; the registered
# closures pin each channel for the connection's lifetime anyway
_channels: dict[int, _ErrorChannel] = {}


def _channel_for(con: sqlite3.Connection) -> _ErrorChannel:
    channel = _channels.get(id(con))
    if channel is None:
        channel = _ErrorChannel()
        _channels[id(con)] = channel
    return channel


def last_error(con: sqlite3.Connection) -> BlobError | None:
    """The library error behind the most recent UDF failure, if any."""
    channel = _channels.get(id(con))
    return channel.last if channel is not None else None


def _in_blob(data, elem: ElementType | None = None,
             storage: StorageClass | None = None) -> ArrayBlob:
    blob = ArrayBlob.from_bytes(data)
    if elem is not None and blob.elem is not elem:
        raise TypeMismatchError(
            f"element type mismatch: expected {elem.name}, got {blob.elem.name}")
    if storage is not None and blob.storage is not storage:
        raise TypeMismatchError(
            f"storage class mismatch: expected {storage.value}, "
            f"got {blob.storage.value}")
    return blob


def _in_value(elem: ElementType, v):
    # complex scalars cannot travel as sqlite values; accept their text form
    if elem.is_complex and isinstance(v, str):
        return complex(v)
    return v


def _in_policy(policy, allowed: tuple) -> str:
    # policy strings arrive as SQL data; bad ones must carry a message
    if policy not in allowed:
        raise FormatError(
            f"unknown policy {policy!r}; expected one of {', '.join(allowed)}")
    return policy


def _out_value(elem: ElementType, v):
    if elem.is_complex:
        return _formatter(elem)(v)
    return v


def _item_at(blob: ArrayBlob, linear: int):
    return item(blob, delinearize(blob.dims, int(linear)))


def _bindings(elem: ElementType, storage: StorageClass):
    """Yield (suffix, arity, op_name, factory) for one prefix.

    Each factory takes (con, channel) and returns the raw callable; the
    connection is only used by ConcatQuery.
    """
    short = storage is StorageClass.SHORT
    inb = lambda data: _in_blob(data, elem, storage)

    def vec(n):
        return lambda con, ch: lambda *vals: make_vector(
            elem, [_in_value(elem, v) for v in vals]).to_bytes()

    def mat(n):
        return lambda con, ch: lambda *vals: make_matrix(
            elem, n, n, [_in_value(elem, v) for v in vals]).to_bytes()

    def item_n(n):
        return lambda con, ch: lambda data, *ix: _out_value(
            elem, item(inb(data), ix))

    def update_n(n):
        return lambda con, ch: lambda data, *rest: update_item(
            inb(data), rest[:-1], _in_value(elem, rest[-1])).to_bytes()

    for n in range(1, _MAX_VECTOR_ARITY + 1):
        yield f"Vector_{n}", n, "make_vector", vec(n)
    for n in range(1, _MAX_MATRIX_SIDE + 1):
        yield f"Matrix_{n}", n * n, "make_matrix", mat(n)
    yield "Fill", 2, "make_filled", lambda con, ch: lambda dims, v: make_filled(
        elem, _blob_coords(ArrayBlob.from_bytes(dims)), _in_value(elem, v)).to_bytes()
    for n in range(1, _MAX_INDEX_ARITY + 1):
        yield f"Item_{n}", n + 1, "item", item_n(n)
    yield "ItemAt", 2, "item", lambda con, ch: lambda data, linear: _out_value(
        elem, _item_at(inb(data), linear))
    for n in range(1, _MAX_INDEX_ARITY + 1):
        yield f"UpdateItem_{n}", n + 2, "update_item", update_n(n)
    yield "Subarray", 4, "subarray", lambda con, ch: lambda data, off, ln, sq: subarray(
        inb(data),
        SubarrayRange(_blob_coords(ArrayBlob.from_bytes(off)),
                      _blob_coords(ArrayBlob.from_bytes(ln))),
        squeeze=bool(sq)).to_bytes()
    yield "Reshape", 2, "reshape", lambda con, ch: lambda data, dims: reshape(
        inb(data), _blob_coords(ArrayBlob.from_bytes(dims))).to_bytes()
    yield "Cast", 2, "cast_raw", lambda con, ch: lambda raw_bytes, dims: cast_raw(
        elem, _blob_coords(ArrayBlob.from_bytes(dims)), raw_bytes).to_bytes()
    yield "Raw", 1, "raw", lambda con, ch: lambda data: raw(inb(data))
    yield "ToString", 1, "to_text", lambda con, ch: lambda data: to_text(inb(data))
    yield "FromString", 1, "from_text", lambda con, ch: lambda s: from_text(
        elem, s).to_bytes()
    yield "Convert", 3, "convert_elem", lambda con, ch: lambda data, target, policy: (
        convert_elem(inb(data), ElementType.parse(target),
                     _in_policy(policy, ("strict", "saturate"))).to_bytes())
    if short:
        yield "ToMax", 1, "convert_storage", lambda con, ch: lambda data: (
            convert_storage(inb(data), StorageClass.MAX).to_bytes())
    else:
        yield "ToShort", 1, "convert_storage", lambda con, ch: lambda data: (
            convert_storage(inb(data), StorageClass.SHORT).to_bytes())
    yield "ConcatQuery", 2, "concat_from_cursor", lambda con, ch: (
        _concat_query(con, elem, "strict"))
    yield "ConcatQuery", 3, "concat_from_cursor", lambda con, ch: (
        _concat_query(con, elem, None))
    if not elem.is_integer:
        yield "FFTForward", 1, "fft_forward", lambda con, ch: lambda data: (
            fft_forward(inb(data)).to_bytes())
        yield "FFTInverse", 1, "fft_inverse", lambda con, ch: lambda data: (
            fft_inverse(inb(data)).to_bytes())
    if elem.is_float:
        for which in ("U", "S", "Vt"):
            yield (f"SVD_{which}", 1, "svd",
                   (lambda w: lambda con, ch: lambda data: getattr(
                       _svd_cached(bytes(data)), w.lower()).to_bytes())(which))


@functools.lru_cache(maxsize=16)
def _svd_cached(data: bytes):
    return svd(ArrayBlob.from_bytes(data), mode="thin")


def _concat_query(con: sqlite3.Connection, elem: ElementType, policy):
    def run(dims_data, query, *rest):
        chosen = _in_policy(policy if policy is not None else rest[0],
                            ("strict", "zero_fill"))
        cur = con.execute(query)

        def rows():
            for row in cur:
                if len(row) != 2:
                    raise ShapeError(
                        f"concat query must return (index, value) rows, "
                        f"got {len(row)} columns")
                ix, v = row
                yield ArrayBlob.from_bytes(ix), _in_value(elem, v)

        return concat_from_cursor(
            elem, ArrayBlob.from_bytes(dims_data), rows(), chosen).to_bytes()

    return run


def _wrap(channel: _ErrorChannel, fn):
    @functools.wraps(fn)
    def wrapper(*args):
        if any(a is None for a in args):
            return None  # SQL NULL propagates
        try:
            return fn(*args)
        except BlobError as e:
            channel.record(e)
            raise
    return wrapper


def _generic_helpers():
    yield "Array_Rank", 1, "header", lambda b: ArrayBlob.from_bytes(b).rank
    yield "Array_Count", 1, "header", lambda b: ArrayBlob.from_bytes(b).total_count
    yield "Array_Dim", 2, "header", _array_dim
    yield "Array_Dims", 1, "header", lambda b: make_vector(
        ElementType.INT32, ArrayBlob.from_bytes(b).dims).to_bytes()
    yield "Array_Coord", 3, "to_table", lambda b, linear, d: _array_coord(
        b, linear, d)
    yield "Array_Coords", 2, "to_table", lambda b, linear: make_vector(
        ElementType.INT32,
        delinearize(ArrayBlob.from_bytes(b).dims, int(linear))).to_bytes()
    yield "Array_ElemType", 1, "header", lambda b: ArrayBlob.from_bytes(b).elem.name
    yield "Array_Storage", 1, "header", lambda b: (
        ArrayBlob.from_bytes(b).storage.value)
    yield "Array_HeaderSize", 1, "header", lambda b: (
        ArrayBlob.from_bytes(b).header.header_size)


def _array_dim(b, d):
    dims = ArrayBlob.from_bytes(b).dims
    if not 0 <= int(d) < len(dims):
        raise BoundsError(f"dimension {d} out of range for rank {len(dims)}")
    return dims[int(d)]


def _array_coord(b, linear, d):
    coords = delinearize(ArrayBlob.from_bytes(b).dims, int(linear))
    if not 0 <= int(d) < len(coords):
        raise BoundsError(f"dimension {d} out of range for rank {len(coords)}")
    return coords[int(d)]


def _make_concat_aggregate(elem: ElementType, channel: _ErrorChannel):
    class Concat:
        def __init__(self):
            self.state = None
            self.failed = False

        def step(self, dims, ix, value):
            try:
                if self.state is None:
                    self.state = concat_init(
                        elem, ArrayBlob.from_bytes(dims), policy="strict")
                concat_accumulate(
                    self.state,
                    (ArrayBlob.from_bytes(ix), _in_value(elem, value)))
            except BlobError as e:
                self.failed = True
                channel.record(e)
                raise

        def finalize(self):
            # the host still finalizes after a failed step; keep the
            # recorded root cause instead of a secondary coverage error
            if self.state is None or self.failed:
                return None
            try:
                return concat_finish(self.state).to_bytes()
            except BlobError as e:
                channel.record(e)
                raise

    return Concat


def catalog() -> list[FunctionBinding]:
    """Every binding register_all installs, for documentation and tests."""
    out = []
    for elem in ElementType:
        for storage in StorageClass:
            p = prefix_for(elem, storage)
            for suffix, arity, op, _factory in _bindings(elem, storage):
                out.append(FunctionBinding(f"{p}_{suffix}", op, elem, storage, arity))
            out.append(FunctionBinding(
                f"{p}_Concat", "concat", elem, storage, 3, kind="aggregate"))
    for name, arity, op, _fn in _generic_helpers():
        out.append(FunctionBinding(name, op, None, None, arity))
    return out


def register_all(con: sqlite3.Connection) -> int:
    """Install the full catalog on a connection; returns the binding count."""
    channel = _channel_for(con)
    count = 0
    for elem in ElementType:
        for storage in StorageClass:
            p = prefix_for(elem, storage)
            for suffix, arity, op, factory in _bindings(elem, storage):
                deterministic = suffix != "ConcatQuery"
                con.create_function(
                    f"{p}_{suffix}", arity, _wrap(channel, factory(con, channel)),
                    deterministic=deterministic)
                count += 1
    for name, arity, op, fn in _generic_helpers():
        con.create_function(name, arity, _wrap(channel, fn), deterministic=True)
        count += 1
    count += register_concat_aggregate(con)
    return count


def register_concat_aggregate(con: sqlite3.Connection) -> int:
    """Install the <Prefix>_Concat aggregates (strict policy); usable
    under GROUP BY. Returns the number installed."""
    channel = _channel_for(con)
    count = 0
    for elem in ElementType:
        for storage in StorageClass:
            con.create_aggregate(
                f"{prefix_for(elem, storage)}_Concat", 3,
                _make_concat_aggregate(elem, channel))
            count += 1
    return count


def to_table_function(con: sqlite3.Connection) -> int:
    """Install everything the ToTable emulation needs: the generic
    header/coordinate helpers plus the per-prefix ItemAt readers.

    sqlite cannot grow result rows from a scalar function, so the
    expansion itself is the recursive-series recipe produced by
    :func:`array_to_table_query`.
    """
    channel = _channel_for(con)
    count = 0
    for name, arity, op, fn in _generic_helpers():
        con.create_function(name, arity, _wrap(channel, fn), deterministic=True)
        count += 1
    for elem in ElementType:
        for storage in StorageClass:
            p = prefix_for(elem, storage)
            fn = (lambda e, st: lambda data, linear: _out_value(
                e, _item_at(_in_blob(data, e, st), linear)))(elem, storage)
            con.create_function(f"{p}_ItemAt", 2, _wrap(channel, fn),
                                deterministic=True)
            count += 1
    return count


def array_to_table_query(prefix: str, rank: int, blob_param: str = ":blob") -> str:
    """SQL text that expands a blob parameter into (i_0..i_{r-1}, value)
    rows in ascending column-major order.

    Equivalent of ``SELECT * FROM ArrayToTable(blob)`` on engines with
    table-valued functions. Example::

        con.execute(array_to_table_query("FloatArray", 2), {"blob": b})
    """
    cols = ", ".join(
        f"Array_Coord({blob_param}, i, {d}) AS i_{d}" for d in range(rank))
    return (
        "WITH RECURSIVE seq(i) AS ("
        f"SELECT 0 WHERE Array_Count({blob_param}) > 0 "
        f"UNION ALL SELECT i + 1 FROM seq WHERE i + 1 < Array_Count({blob_param})) "
        f"SELECT {cols}, {prefix}_ItemAt({blob_param}, i) AS value FROM seq")


def array_to_table(con: sqlite3.Connection, blob: ArrayBlob) -> list[tuple]:
    """Run the ToTable recipe for `blob` on `con` and return its rows."""
    query = array_to_table_query(prefix_for(blob.elem, blob.storage), blob.rank)
    return con.execute(query, {"blob": blob.to_bytes()}).fetchall()


class Session:
    """A connection with the catalog registered and readable SQL errors.

    The host replaces UDF exception text with a generic message;
    `execute`/`query` re-raise with the recorded library error
    appended, so a type mismatch reads as one.
    """

    def __init__(self, database: str = ":memory:",
                 connection: sqlite3.Connection | None = None):
        self.connection = connection or sqlite3.connect(database)
        self.bindings = register_all(self.connection)
        self._channel = _channel_for(self.connection)

    def execute(self, sql: str, params=()) -> sqlite3.Cursor:
        self._channel.clear()
        try:
            return self.connection.execute(sql, params)
        except sqlite3.Error as e:
            raise self._decorate(e) from e

    def query(self, sql: str, params=()) -> list[tuple]:
        cur = self.execute(sql, params)
        try:
            return cur.fetchall()
        except sqlite3.Error as e:
            raise self._decorate(e) from e

    def _decorate(self, e: sqlite3.Error) -> sqlite3.Error:
        if self._channel.last is not None:
            return type(e)(f"{e} [{self._channel.last}]")
        return e

    def close(self) -> None:
        self.connection.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
