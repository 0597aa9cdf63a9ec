"""Acceptance suite: one test per shipping criterion.

Each test prints a PASS line with its elapsed time (run with -s to see
them) and enforces both the numeric tolerances and the runtime budget.
"""

import time
from contextlib import contextmanager
from math import prod
from pathlib import Path

import numpy as np
import pytest

import ndblob as nb
from ndblob import ElementType, StorageClass
from ndblob.bench import BenchConfig, bench_run, format_report
from ndblob.fft import fft_nd
from ndblob.sql import Session
from ndblob.svd import jacobi_svd

from helpers import (
    ALL_ELEMS,
    naive_dft,
    oracle_singular_values,
    random_values,
)

E = ElementType
FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@contextmanager
def criterion(number: int, budget_s: float, summary: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} FAIL: {summary}")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_s, (
        f"criterion {number} took {elapsed:.1f}s, budget {budget_s}s")
    print(f"ACCEPTANCE {number} PASS ({elapsed:.2f}s < {budget_s:.0f}s): {summary}")


def test_criterion_1_format_golden():
    with criterion(1, 1.0, "five-double vector is a 64-byte blob matching "
                           "the committed fixture byte for byte"):
        blob = nb.make_vector(E.FLOAT64, (1.0, 2.0, 3.0, 4.0, 5.0))
        data = blob.to_bytes()
        assert len(data) == 64
        assert blob.header.header_size == 24
        assert data == (FIXTURES / "short_f64_vector5.ablob").read_bytes()
        assert nb.ArrayBlob.from_bytes(data).to_bytes() == data


def test_criterion_2_round_trip_property_suite():
    with criterion(2, 30.0, "10,000 randomized blobs: header, blob and text "
                            "round trips exact (nan bitwise)"):
        rng = np.random.default_rng(20240101)
        cases = 10_000
        for i in range(cases):
            elem = ALL_ELEMS[i % 8]
            want_max = (i // 8) % 2 == 1
            rank = int(rng.integers(1, 5))
            dims = tuple(int(rng.integers(1, 7)) for _ in range(rank))
            if i % 250 == 0:
                dims = dims[:-1] + (0,)  # zero-size dims stay covered
            values = random_values(rng, elem, prod(dims))
            blob = nb.cast_raw(elem, dims, values.tobytes())
            if want_max:
                blob = nb.convert_storage(blob, StorageClass.MAX)
            # header codec round trip
            header = blob.header
            assert nb.header_from_bytes(nb.encode_header(header)) == header
            # whole-blob binary round trip, bitwise
            data = blob.to_bytes()
            again = nb.ArrayBlob.from_bytes(data)
            assert again.to_bytes() == data
            # text round trip, bitwise (canonical nan spelling); shapes with
            # a zero-size dimension cannot carry their shape through "{}"
            if blob.total_count > 0:
                assert nb.from_text(elem, nb.to_text(blob)).payload == blob.payload
        assert cases == 10_000


def test_criterion_3_subarray_oracle_equivalence():
    with criterion(3, 30.0, "1,000 streamed subarrays byte-identical to "
                            "materialize-then-slice; 8^3-of-64^3 window reads "
                            "under 5% of the payload"):
        rng = np.random.default_rng(20240202)
        for i in range(1_000):
            elem = ALL_ELEMS[i % 8]
            rank = int(rng.integers(1, 5))
            dims = tuple(int(rng.integers(1, 9)) for _ in range(rank))
            values = random_values(rng, elem, prod(dims))
            blob = nb.convert_storage(
                nb.cast_raw(elem, dims, values.tobytes()), StorageClass.MAX)
            offs, lens = [], []
            for d in dims:
                o = int(rng.integers(0, d + 1))
                offs.append(o)
                lens.append(int(rng.integers(0, d - o + 1)))
            ranges = nb.SubarrayRange(offs, lens)
            squeeze = bool(rng.integers(0, 2))
            reader = nb.BlockReader(blob.to_bytes())
            streamed = nb.subarray_streamed(reader, ranges, squeeze=squeeze)
            materialized = nb.subarray(blob, ranges, squeeze=squeeze)
            assert streamed.to_bytes() == materialized.to_bytes()

        cube = np.random.default_rng(7).random((64, 64, 64), dtype=np.float32)
        blob = nb.from_numpy(cube)
        header_size = blob.header.header_size
        reader = nb.BlockReader(blob.to_bytes())
        out = nb.subarray_streamed(reader, nb.SubarrayRange((5, 9, 17), (8, 8, 8)))
        assert np.array_equal(nb.to_numpy(out), cube[5:13, 9:17, 17:25])
        assert reader.bytes_read <= header_size + 64 * 8 * 4   # 64 runs x 8 el x 4 B
        assert reader.read_calls <= 2 + 64                     # header + one per run
        assert reader.bytes_read < 0.05 * len(blob.payload)


def test_criterion_4_table_bridge():
    with criterion(4, 30.0, "concat(to_table(x)) == x for 1,000 arrays; "
                            "aggregate and cursor paths byte-identical; row "
                            "order never matters"):
        rng = np.random.default_rng(20240303)
        for i in range(1_000):
            elem = ALL_ELEMS[i % 8]
            rank = int(rng.integers(1, 4))
            dims = tuple(int(rng.integers(1, 6)) for _ in range(rank))
            values = random_values(rng, elem, prod(dims))
            blob = nb.cast_raw(elem, dims, values.tobytes())
            rows = list(nb.to_table(blob))
            dims_blob = nb.make_vector(E.INT32, blob.dims)

            state = nb.concat_init(elem, dims_blob)
            for row in rows:
                nb.concat_accumulate(state, row)
            via_aggregate = nb.concat_finish(state)
            assert via_aggregate.to_bytes() == blob.to_bytes()

            via_cursor = nb.concat_from_cursor(elem, dims_blob, rows)
            assert via_cursor.to_bytes() == via_aggregate.to_bytes()

            if len(rows) > 1:
                shuffled = rows.copy()
                rng.shuffle(shuffled)
                permuted = nb.concat_from_cursor(elem, dims_blob, shuffled)
                assert permuted.to_bytes() == blob.to_bytes()


def test_criterion_5_fft():
    with criterion(5, 60.0, "analytic transforms exact to 1e-12; direct-sum "
                            "oracle agreement to 1e-9 for N <= 256; round "
                            "trip and Parseval to 1e-9 for N <= 4096"):
        delta = np.zeros(8)
        delta[0] = 1.0
        assert np.abs(fft_nd(delta) - np.ones(8)).max() <= 1e-12
        assert np.abs(fft_nd(np.ones(4)) - np.array([4, 0, 0, 0])).max() <= 1e-12

        rng = np.random.default_rng(20240404)
        shapes = [(n,) for n in range(1, 65)]
        shapes += [(81,), (100,), (127,), (128,), (243,), (251,), (255,), (256,)]
        shapes += [(2, 3), (3, 5), (8, 8), (16, 16), (5, 7), (15, 17), (16, 12)]
        shapes += [(2, 3, 4), (3, 3, 3), (4, 4, 4), (6, 6, 7), (2, 2, 64)]
        shapes += [(2, 3, 2, 3), (2, 2, 2, 2), (4, 4, 4, 4)]
        for shape in shapes:
            assert prod(shape) <= 256
            x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            want = naive_dft(x)
            got = fft_nd(x)
            scale = max(np.abs(want).max(), 1.0)
            assert np.abs(got - want).max() <= 1e-9 * scale, f"shape {shape}"

        for shape in [(1024,), (4096,), (4095,), (4093,), (2048,),
                      (16, 16, 16), (8, 16, 32), (13, 9, 35)]:
            assert prod(shape) <= 4096
            x = rng.standard_normal(shape)
            spectrum = fft_nd(x)
            back = fft_nd(spectrum, inverse=True)
            assert np.abs(back - x).max() <= 1e-9 * np.abs(x).max(), f"{shape}"
            energy = np.sum(np.abs(x) ** 2)
            assert abs(energy - np.sum(np.abs(spectrum) ** 2) / x.size) \
                <= 1e-9 * energy, f"{shape}"


def test_criterion_6_svd():
    with criterion(6, 60.0, "500 random matrices up to 64x64: reconstruction "
                            "1e-10 Frobenius, orthonormality 1e-10, singular "
                            "values vs sqrt-eigenvalue oracle 1e-8"):
        rng = np.random.default_rng(20240505)
        for case in range(500):
            m = int(rng.integers(1, 65))
            n = int(rng.integers(1, 65))
            a = rng.standard_normal((m, n)) * np.exp(rng.uniform(-2.0, 2.0))
            full = case % 10 == 0
            u, s, vt = jacobi_svd(a, full=full)
            k = min(m, n)
            assert (np.diff(s) <= 0).all() and (s >= 0).all()
            recon = (u[:, :k] * s) @ vt[:k]
            fro = np.linalg.norm(a) or 1.0
            assert np.linalg.norm(recon - a) <= 1e-10 * fro, f"case {case}"
            assert np.abs(u.T @ u - np.eye(u.shape[1])).max() <= 1e-10
            assert np.abs(vt @ vt.T - np.eye(vt.shape[0])).max() <= 1e-10
            want = oracle_singular_values(a)[:k]
            assert np.abs(s - want).max() <= 1e-8 * max(s[0], 1e-300), f"case {case}"


def test_criterion_7_sql_integration():
    with criterion(7, 10.0, "the documented SQL session runs end to end "
                            "through the registered functions"):
        with Session() as ses:
            # vector construction and zero-based item access
            assert ses.query(
                "SELECT FloatArray_Item_1(FloatArray_Vector_5"
                "(1.0, 2.0, 3.0, 4.0, 5.0), 3)")[0][0] == 4.0
            # matrix fills column-major, so [1,0] is the second listed value
            assert ses.query(
                "SELECT FloatArray_Item_2(FloatArray_Matrix_2"
                "(0.1, 0.2, 0.3, 0.4), 1, 0)")[0][0] == 0.2
            # 5x5x5 window of a 3-d max array
            big = nb.from_numpy(np.random.default_rng(0).random((12, 12, 12)))
            cube_bytes = ses.query(
                "SELECT FloatArrayMax_Subarray(:a, IntArray_Vector_3(1, 4, 6), "
                "IntArray_Vector_3(5, 5, 5), 0)", {"a": big.to_bytes()})[0][0]
            cube = nb.ArrayBlob.from_bytes(cube_bytes)
            assert cube.dims == (5, 5, 5)
            assert cube.to_bytes() == nb.subarray(
                big, nb.SubarrayRange((1, 4, 6), (5, 5, 5))).to_bytes()
            # in-place style update produces a new value
            updated = ses.query(
                "SELECT FloatArray_UpdateItem_1(FloatArray_Vector_5"
                "(1.0, 2.0, 3.0, 4.0, 5.0), 3, 4.5)")[0][0]
            assert nb.to_numpy(nb.ArrayBlob.from_bytes(updated)).tolist() == \
                [1.0, 2.0, 3.0, 4.5, 5.0]
            # aggregate assembly from an (ix, v) table
            ses.execute("CREATE TABLE t (ix BLOB, v REAL)")
            ses.connection.executemany(
                "INSERT INTO t VALUES (?, ?)",
                [(nb.make_vector(E.INT32, [i]).to_bytes(), float(10 + i))
                 for i in range(4)])
            dims = nb.make_vector(E.INT32, [4]).to_bytes()
            assembled = ses.query(
                "SELECT FloatArrayMax_Concat(?, ix, v) FROM t", (dims,))[0][0]
            assert nb.to_numpy(nb.ArrayBlob.from_bytes(assembled)).tolist() == \
                [10.0, 11.0, 12.0, 13.0]
            # ToTable -> Concat round trip inside a single statement
            blob = nb.from_numpy(np.random.default_rng(1).random((3, 4)))
            round_tripped = ses.query(
                "WITH RECURSIVE seq(i) AS ("
                "SELECT 0 WHERE Array_Count(:blob) > 0 "
                "UNION ALL SELECT i + 1 FROM seq WHERE i + 1 < Array_Count(:blob)) "
                "SELECT FloatArray_Concat(Array_Dims(:blob), "
                "Array_Coords(:blob, i), FloatArray_ItemAt(:blob, i)) FROM seq",
                {"blob": blob.to_bytes()})[0][0]
            assert round_tripped == blob.to_bytes()


def test_criterion_8_benchmark_harness():
    with criterion(8, 600.0, "1e6-row harness: equal SUMs, nonnegative "
                             "ordered per-call overheads, 24 B/row of header"):
        result = bench_run(BenchConfig(row_count=1_000_000))
        print(format_report(result), end="")

        # (a) same numbers through both access paths
        assert result.scalar_sum == pytest.approx(result.vector_sum, rel=1e-6)

        # (b) overheads nonnegative, empty-UDF <= item-UDF
        by_id = {r.query_id: r for r in result.reports}
        assert by_id[3].per_call_overhead >= 0
        assert by_id[4].per_call_overhead >= 0
        assert by_id[5].per_call_overhead >= 0
        assert by_id[5].per_call_overhead <= by_id[4].per_call_overhead

        # (c) storage accounting: exactly the header per row
        assert result.per_row_delta == 24
        assert result.vector_value_bytes >= result.scalar_value_bytes
        assert result.vector_file_bytes >= result.scalar_file_bytes
