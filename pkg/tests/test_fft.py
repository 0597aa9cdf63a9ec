import numpy as np
import pytest

from ndblob import (
    ElementType,
    TypeMismatchError,
    fft_forward,
    fft_inverse,
    from_numpy,
    make_vector,
    to_numpy,
)
from ndblob.fft import dft_1d, fft_nd

from helpers import naive_dft, naive_dft_scalar

E = ElementType


class TestOracleSelfCheck:
    """The vectorized direct-sum oracle agrees with a fully scalar sum."""

    @pytest.mark.parametrize("shape", [(4,), (5,), (2, 3), (2, 2, 2)])
    def test_oracles_agree(self, shape):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        assert np.allclose(naive_dft(x), naive_dft_scalar(x), atol=1e-10)


class TestAnalyticCases:
    def test_delta_to_all_ones(self):
        x = np.zeros(8)
        x[0] = 1.0
        out = fft_nd(x)
        assert np.abs(out - np.ones(8)).max() <= 1e-12

    def test_constant_to_scaled_delta(self):
        out = fft_nd(np.ones(4))
        assert np.abs(out - np.array([4, 0, 0, 0])).max() <= 1e-12

    def test_inverse_of_all_ones_is_delta(self):
        out = fft_nd(np.ones(4), inverse=True)
        want = np.array([1, 0, 0, 0], dtype=complex)
        assert np.abs(out - want).max() <= 1e-12

    def test_single_frequency(self):
        n = 16
        x = np.exp(2j * np.pi * 3 * np.arange(n) / n)
        out = fft_nd(x)
        want = np.zeros(n, dtype=complex)
        want[3] = n
        assert np.abs(out - want).max() <= 1e-9


class TestAgainstOracle:
    @pytest.mark.parametrize("shape", [
        (1,), (2,), (3,), (4,), (5,), (6,), (7,), (8,), (9,), (12,), (13,),
        (16,), (17,), (25,), (27,), (31,), (32,), (45,), (64,), (67,), (100,),
        (2, 3), (4, 4), (3, 5), (8, 8), (5, 7),
        (2, 3, 4), (3, 3, 3), (4, 4, 4),
        (2, 3, 2, 3),
    ])
    def test_matches_direct_sum(self, shape):
        rng = np.random.default_rng(sum(shape))
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        got = fft_nd(x)
        want = naive_dft(x)
        scale = max(np.abs(want).max(), 1.0)
        assert np.abs(got - want).max() <= 1e-9 * scale

    def test_inverse_matches_direct_sum(self):
        rng = np.random.default_rng(42)
        x = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        got = fft_nd(x, inverse=True)
        want = naive_dft(x, inverse=True)
        assert np.abs(got - want).max() <= 1e-9 * max(np.abs(want).max(), 1.0)


class TestRoundTripAndParseval:
    @pytest.mark.parametrize("shape", [
        (64,), (100,), (729,), (1024,), (4095,), (4096,), (4093,),
        (16, 16, 16), (8, 16, 32), (13, 9, 5),
    ])
    def test_round_trip(self, shape):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(shape)
        back = fft_nd(fft_nd(x), inverse=True)
        assert np.abs(back - x).max() <= 1e-12 * np.abs(x).max()

    @pytest.mark.parametrize("shape", [(256,), (4096,), (4095,), (12, 12)])
    def test_parseval(self, shape):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        big_x = fft_nd(x)
        lhs = np.sum(np.abs(x) ** 2)
        rhs = np.sum(np.abs(big_x) ** 2) / x.size
        assert abs(lhs - rhs) <= 1e-9 * lhs

    def test_linearity(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(60) + 1j * rng.standard_normal(60)
        y = rng.standard_normal(60) + 1j * rng.standard_normal(60)
        lhs = fft_nd(2.5 * x - 1.5j * y)
        rhs = 2.5 * fft_nd(x) - 1.5j * fft_nd(y)
        assert np.abs(lhs - rhs).max() <= 1e-9 * np.abs(rhs).max()


class TestBlobLevel:
    def test_delta_blob(self):
        blob = make_vector(E.FLOAT64, (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
        out = fft_forward(blob)
        assert out.elem is E.COMPLEX128
        assert out.dims == blob.dims
        assert np.abs(to_numpy(out) - 1.0).max() <= 1e-12

    def test_round_trip_through_blobs(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((2, 3, 4))
        back = fft_inverse(fft_forward(from_numpy(x)))
        assert np.abs(to_numpy(back) - x).max() <= 1e-12

    def test_float32_yields_complex64(self):
        blob = from_numpy(np.ones(4, dtype=np.float32))
        assert fft_forward(blob).elem is E.COMPLEX64

    def test_integer_blob_rejected(self):
        with pytest.raises(TypeMismatchError):
            fft_forward(make_vector(E.INT32, (1, 2)))

    def test_inverse_requires_complex(self):
        with pytest.raises(TypeMismatchError):
            fft_inverse(make_vector(E.FLOAT64, (1.0, 2.0)))

    def test_empty_array(self):
        blob = make_vector(E.FLOAT64, ())
        out = fft_forward(blob)
        assert out.total_count == 0

    def test_complex_input(self):
        x = np.array([1 + 1j, 2 - 1j, 0.5j])
        got = to_numpy(fft_forward(from_numpy(x)))
        assert np.allclose(got, naive_dft(x), atol=1e-9)


def test_dft_1d_convenience():
    x = np.arange(10, dtype=float)
    assert np.allclose(dft_1d(x), naive_dft(x), atol=1e-9)
    assert np.allclose(dft_1d(dft_1d(x), inverse=True), x, atol=1e-12)
