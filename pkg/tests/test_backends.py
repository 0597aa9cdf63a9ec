import struct

import numpy as np
import pytest

from ndblob import (
    BackendError,
    ElementType,
    MathBackend,
    NumpyBackend,
    active_backend,
    available_backends,
    fft_forward,
    from_numpy,
    item,
    register_backend,
    select_backend,
    svd,
    to_numpy,
)

E = ElementType


def test_builtin_backends_present():
    names = available_backends()
    assert "reference" in names and "numpy" in names
    assert active_backend().name == "reference"


def test_select_and_restore():
    try:
        assert select_backend("numpy").name == "numpy"
        assert active_backend().name == "numpy"
    finally:
        select_backend("reference")


def test_unknown_backend_lookup():
    with pytest.raises(BackendError, match="unknown backend"):
        select_backend("lapacke")


def test_broken_backend_rejected():
    class Broken(MathBackend):
        name = "broken"
        capabilities = frozenset({"fft"})

        def fft(self, values, inverse):
            return np.zeros_like(np.asarray(values, dtype=complex))

    with pytest.raises(BackendError, match="qualification failed"):
        register_backend(Broken())
    assert "broken" not in available_backends()


def test_empty_capabilities_rejected():
    class Inert(MathBackend):
        name = "inert"
        capabilities = frozenset()

    with pytest.raises(BackendError):
        register_backend(Inert())


def test_partial_capability_dispatch():
    class FftOnly(MathBackend):
        name = "fft-only"
        capabilities = frozenset({"fft"})

        def fft(self, values, inverse):
            return NumpyBackend().fft(values, inverse)

    try:
        register_backend(FftOnly())
        blob = from_numpy(np.eye(3))
        with pytest.raises(BackendError, match="lacks svd"):
            svd(blob, backend="fft-only")
        out = fft_forward(blob, backend="fft-only")
        assert out.dims == (3, 3)
    finally:
        from ndblob import backends as b
        b._backends.pop("fft-only", None)


class TestCrossBackendAgreement:
    def test_fft_agrees(self):
        rng = np.random.default_rng(21)
        for shape in [(16,), (12,), (3, 5), (2, 3, 4), (101,)]:
            blob = from_numpy(rng.standard_normal(shape))
            a = to_numpy(fft_forward(blob, backend="reference"))
            b = to_numpy(fft_forward(blob, backend="numpy"))
            assert np.abs(a - b).max() <= 1e-9 * max(1.0, np.abs(b).max())

    def test_svd_agrees_on_singular_values(self):
        rng = np.random.default_rng(22)
        for shape in [(10, 4), (4, 10), (12, 12)]:
            blob = from_numpy(rng.standard_normal(shape))
            a = to_numpy(svd(blob, backend="reference").s)
            b = to_numpy(svd(blob, backend="numpy").s)
            assert np.abs(a - b).max() <= 1e-9 * max(1.0, b[0])

    def test_svd_reconstructions_agree(self):
        rng = np.random.default_rng(23)
        a = rng.standard_normal((9, 6))
        blob = from_numpy(a)
        ra = svd(blob, backend="reference").reconstruct()
        rb = svd(blob, backend="numpy").reconstruct()
        assert np.abs(ra - rb).max() <= 1e-9


class TestZeroCopyContract:
    """The payload of a rank-2 FLOAT64 blob is directly consumable as a
    column-major matrix: explicit stride arithmetic over the raw bytes
    reproduces item() for every cell."""

    def test_stride_reader_reproduces_item(self):
        rng = np.random.default_rng(30)
        for _ in range(10):
            m, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            blob = from_numpy(rng.standard_normal((m, n)))
            payload = blob.payload
            for i in range(m):
                for j in range(n):
                    (direct,) = struct.unpack_from("<d", payload, (i + j * m) * 8)
                    assert direct == item(blob, [i, j])

    def test_backend_sees_column_major_view(self):
        blob = from_numpy(np.array([[1.0, 3.0], [2.0, 4.0]]))
        view = to_numpy(blob)
        assert view.flags.f_contiguous
        assert view.tobytes(order="F") == blob.payload
        # the view's buffer IS the payload: no transformation happened
        assert np.shares_memory(view, np.frombuffer(blob.payload, dtype="<f8"))
