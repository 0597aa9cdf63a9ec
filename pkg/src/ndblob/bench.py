"""Benchmark harness: per-call cost of array UDFs during table scans.

Twin tables carry the same numbers, one as plain scalar columns
(Tscalar: id, v1..vN) and one as a single blob column (Tvector: id, v).
Five queries run against them, each on a fresh connection:

    1  SELECT COUNT(*) FROM Tscalar          (scan baseline, scalar)
    2  SELECT COUNT(*) FROM Tvector          (scan baseline, vector)
    3  SELECT SUM(v1) FROM Tscalar           (native column read)
    4  SELECT SUM(<P>_Item_1(v, 0)) ...      (array UDF per row)
    5  SELECT SUM(EmptyFunction(v, 0)) ...   (UDF dispatch cost alone)

Per-call overhead is (wall - count_baseline) / rows, both measured on
the cold run. Explicit cache clearing is platform-specific, so cold is
approximated by a fresh connection per query; the immediate second
execution is reported alongside as the warm run. Queries 3 and 4 must
agree on the SUM; that is asserted on every run. Timing numbers are
reported, never asserted: they are machine facts, not contracts.

Two extra passes round out the picture: assembling one array from an
(ix, v) rows table through the true aggregate vs the cursor-driven
query function (byte-identical results, both timed), and windowing an
8x8x8 cube out of a 64x64x64 float32 max blob through the counting
reader to show how little of the payload a streamed subarray touches.
"""

from __future__ import annotations

import csv
import io
import os
import sqlite3
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from .format import (
    ArrayBlob,
    ArrayHeader,
    ElementType,
    StorageClass,
    classify,
    encode_header,
)
from .ops import SubarrayRange, make_vector, subarray_streamed
from .reader import BlockReader
from .sql import prefix_for, register_all

__all__ = [
    "BenchConfig",
    "BenchReport",
    "PartialReadReport",
    "BenchResult",
    "bench_run",
    "bench_partial_read",
    "format_report",
    "write_csv",
]

# figures reported for the original implementation on its host engine,
# printed for context only
_CONTEXT_NOTE = (
    "context: the original library on its native host measured ~2 us per "
    "UDF call, with >=38% of CPU going to dispatch even for an empty UDF; "
    "absolute numbers are hardware-specific and are not asserted here")


@dataclass(frozen=True)
class BenchConfig:
    row_count: int = 1_000_000
    vector_dim: int = 5
    elem: ElementType = ElementType.FLOAT64
    seed: int = 20240917


@dataclass
class BenchReport:
    query_id: int
    wall_time: float          # seconds, cold (fresh connection)
    rows: int
    per_call_overhead: float  # seconds per row over the count baseline
    bytes_read: int = 0
    sql: str = ""
    warm_time: float = 0.0    # second execution on the same connection


@dataclass
class PartialReadReport:
    dims: tuple
    window: tuple
    blob_bytes: int
    bytes_read: int
    read_calls: int
    fraction: float


@dataclass
class ConcatPathReport:
    rows: int
    aggregate_s: float
    cursor_s: float
    identical: bool


@dataclass
class BenchResult:
    config: BenchConfig
    reports: list
    scalar_sum: float
    vector_sum: float
    scalar_value_bytes: int
    vector_value_bytes: int
    per_row_delta: int
    scalar_file_bytes: int
    vector_file_bytes: int
    partial: PartialReadReport
    concat_paths: "ConcatPathReport | None" = None


def _populate(workdir: str, config: BenchConfig) -> tuple[str, str, int]:
    """Build the twin tables in separate database files; returns their
    paths and the per-row blob size."""
    dim = config.vector_dim
    header = encode_header(ArrayHeader(
        classify(config.elem, (dim,)), config.elem, (dim,)))
    scalar_path = os.path.join(workdir, "tscalar.db")
    vector_path = os.path.join(workdir, "tvector.db")
    scon = sqlite3.connect(scalar_path)
    vcon = sqlite3.connect(vector_path)
    cols = ", ".join(f"v{i + 1} REAL" for i in range(dim))
    scon.execute(f"CREATE TABLE Tscalar (id INTEGER PRIMARY KEY, {cols})")
    vcon.execute("CREATE TABLE Tvector (id INTEGER PRIMARY KEY, v BLOB)")
    rng = np.random.default_rng(config.seed)
    dtype = config.elem.dtype
    marks = ", ".join("?" * dim)
    chunk = 100_000
    done = 0
    while done < config.row_count:
        n = min(chunk, config.row_count - done)
        ids = range(done + 1, done + n + 1)
        data = rng.random((n, dim)).astype(dtype)
        scon.executemany(
            f"INSERT INTO Tscalar VALUES (?, {marks})",
            ((i, *map(float, row)) for i, row in zip(ids, data)))
        vcon.executemany(
            "INSERT INTO Tvector VALUES (?, ?)",
            ((i, header + row.tobytes()) for i, row in zip(ids, data)))
        done += n
    scon.commit()
    vcon.commit()
    scon.close()
    vcon.close()
    return scalar_path, vector_path, len(header) + dim * dtype.itemsize


def _timed(path: str, sql: str, setup=None) -> tuple[float, float, object]:
    """Run one scalar-result query on a fresh connection.

    Returns (cold, warm, value): the first execution on the new
    connection and an immediate repeat on the same one.
    """
    con = sqlite3.connect(path)
    try:
        if setup is not None:
            setup(con)
        start = time.perf_counter()
        value = con.execute(sql).fetchone()[0]
        cold = time.perf_counter() - start
        start = time.perf_counter()
        con.execute(sql).fetchone()
        warm = time.perf_counter() - start
        return cold, warm, value
    finally:
        con.close()


def bench_run(config: BenchConfig = BenchConfig(), workdir: str | None = None) -> BenchResult:
    """Populate the twin tables and time the five scan queries.

    Raises RuntimeError if the correctness assertions fail (row counts,
    and SUM equality between the scalar-column and blob-item paths).
    """
    own = workdir is None
    tmp = tempfile.TemporaryDirectory(prefix="ndblob-bench-") if own else None
    workdir = tmp.name if own else workdir
    try:
        scalar_path, vector_path, blob_len = _populate(workdir, config)
        rows = config.row_count
        prefix = prefix_for(config.elem, classify(config.elem, (config.vector_dim,)))

        def with_udfs(con):
            register_all(con)
            con.create_function("EmptyFunction", 2,
                                lambda b, i: 0.0, deterministic=True)

        q1 = "SELECT COUNT(*) FROM Tscalar"
        q2 = "SELECT COUNT(*) FROM Tvector"
        q3 = "SELECT SUM(v1) FROM Tscalar"
        q4 = f"SELECT SUM({prefix}_Item_1(v, 0)) FROM Tvector"
        q5 = "SELECT SUM(EmptyFunction(v, 0)) FROM Tvector"

        t1, w1, c1 = _timed(scalar_path, q1)
        t2, w2, c2 = _timed(vector_path, q2)
        t3, w3, sum3 = _timed(scalar_path, q3)
        t4, w4, sum4 = _timed(vector_path, q4, setup=with_udfs)
        t5, w5, _ = _timed(vector_path, q5, setup=with_udfs)

        if c1 != rows or c2 != rows:
            raise RuntimeError(
                f"row count mismatch: expected {rows}, got {c1} and {c2}")
        tol = 1e-6 * max(1.0, abs(sum3))
        if abs(sum3 - sum4) > tol:
            raise RuntimeError(
                f"scalar-column SUM {sum3!r} and blob-item SUM {sum4!r} "
                f"disagree beyond {tol}")

        reports = [
            BenchReport(1, t1, rows, 0.0, sql=q1, warm_time=w1),
            BenchReport(2, t2, rows, 0.0, sql=q2, warm_time=w2),
            BenchReport(3, t3, rows, (t3 - t1) / rows, sql=q3, warm_time=w3),
            BenchReport(4, t4, rows, (t4 - t2) / rows, sql=q4, warm_time=w4),
            BenchReport(5, t5, rows, (t5 - t2) / rows, sql=q5, warm_time=w5),
        ]
        return BenchResult(
            config=config,
            reports=reports,
            scalar_sum=sum3,
            vector_sum=sum4,
            scalar_value_bytes=rows * config.vector_dim * config.elem.byte_width,
            vector_value_bytes=rows * blob_len,
            per_row_delta=blob_len - config.vector_dim * config.elem.byte_width,
            scalar_file_bytes=os.path.getsize(scalar_path),
            vector_file_bytes=os.path.getsize(vector_path),
            partial=bench_partial_read(),
            concat_paths=bench_concat_paths(min(rows, 50_000)),
        )
    finally:
        if own:
            tmp.cleanup()


def bench_concat_paths(row_count: int = 50_000) -> ConcatPathReport:
    """Assemble one vector from an (ix, v) rows table through the true
    aggregate and through the cursor-driven query function; both must
    produce byte-identical blobs. The original host made aggregates
    pathologically slow by serializing their state per row; here the
    two paths are expected to be close, and the numbers let you check.
    """
    con = sqlite3.connect(":memory:")
    try:
        register_all(con)
        con.execute("CREATE TABLE rows (ix BLOB, v REAL)")
        rng = np.random.default_rng(11)
        values = rng.random(row_count)
        con.executemany(
            "INSERT INTO rows VALUES (?, ?)",
            ((make_vector(ElementType.INT32, [i]).to_bytes(), float(values[i]))
             for i in range(row_count)))
        dims = make_vector(ElementType.INT32, [row_count]).to_bytes()
        prefix = prefix_for(ElementType.FLOAT64,
                            classify(ElementType.FLOAT64, (row_count,)))

        start = time.perf_counter()
        via_agg = con.execute(
            f"SELECT {prefix}_Concat(?, ix, v) FROM rows", (dims,)).fetchone()[0]
        aggregate_s = time.perf_counter() - start

        start = time.perf_counter()
        via_cur = con.execute(
            f"SELECT {prefix}_ConcatQuery(?, 'SELECT ix, v FROM rows')",
            (dims,)).fetchone()[0]
        cursor_s = time.perf_counter() - start

        identical = via_agg == via_cur
        if not identical:
            raise RuntimeError(
                "aggregate and cursor Concat paths produced different blobs")
        return ConcatPathReport(row_count, aggregate_s, cursor_s, identical)
    finally:
        con.close()


def bench_partial_read(side: int = 64, window: int = 8) -> PartialReadReport:
    """Window a cube out of a float32 max blob through the counting
    reader and report how many bytes the streamed read touched."""
    dims = (side, side, side)
    rng = np.random.default_rng(7)
    values = rng.random(dims, dtype=np.float32)
    header = ArrayHeader(StorageClass.MAX, ElementType.FLOAT32, dims)
    blob = ArrayBlob(header, values.tobytes(order="F"))
    reader = BlockReader(blob.to_bytes())
    ranges = SubarrayRange((5, 9, 17), (window,) * 3)
    subarray_streamed(reader, ranges)
    return PartialReadReport(
        dims=dims,
        window=(window,) * 3,
        blob_bytes=len(blob),
        bytes_read=reader.bytes_read,
        read_calls=reader.read_calls,
        fraction=reader.bytes_read / len(blob),
    )


def write_csv(reports, dest) -> None:
    """query_id,rows,wall_s,per_call_us,bytes_read"""
    own = isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__")
    f = open(dest, "w", newline="") if own else dest
    try:
        writer = csv.writer(f)
        writer.writerow(["query_id", "rows", "wall_s", "per_call_us", "bytes_read"])
        for r in reports:
            writer.writerow([
                r.query_id, r.rows, f"{r.wall_time:.6f}",
                f"{r.per_call_overhead * 1e6:.3f}", r.bytes_read])
    finally:
        if own:
            f.close()


def format_report(result: BenchResult) -> str:
    out = io.StringIO()
    cfg = result.config
    print(f"rows={cfg.row_count}  vector_dim={cfg.vector_dim}  "
          f"elem={cfg.elem.name}", file=out)
    print(f"{'query':>5}  {'cold [s]':>9}  {'warm [s]':>9}  "
          f"{'per-call [us]':>13}  sql", file=out)
    for r in result.reports:
        print(f"{r.query_id:>5}  {r.wall_time:>9.3f}  {r.warm_time:>9.3f}  "
              f"{r.per_call_overhead * 1e6:>13.3f}  {r.sql}", file=out)
    print(f"SUM check: scalar {result.scalar_sum!r} vs blob {result.vector_sum!r}",
          file=out)
    print(f"stored values: Tscalar {result.scalar_value_bytes} B, "
          f"Tvector {result.vector_value_bytes} B "
          f"(+{result.per_row_delta} B/row of header)", file=out)
    print(f"database files: Tscalar {result.scalar_file_bytes} B, "
          f"Tvector {result.vector_file_bytes} B", file=out)
    if result.concat_paths is not None:
        c = result.concat_paths
        print(f"concat paths: {c.rows} rows assembled in {c.aggregate_s:.3f}s "
              f"(aggregate) vs {c.cursor_s:.3f}s (cursor query), "
              f"byte-identical: {c.identical}", file=out)
    p = result.partial
    print(f"partial read: {p.window} window of a {p.dims} float32 max blob "
          f"read {p.bytes_read} of {p.blob_bytes} B "
          f"({100 * p.fraction:.2f}%) in {p.read_calls} reads", file=out)
    print(_CONTEXT_NOTE, file=out)
    return out.getvalue()
