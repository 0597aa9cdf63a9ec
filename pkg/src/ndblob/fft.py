"""Reference discrete Fourier transform.

Self-contained n-dimensional DFT over complex128 arrays:

* power-of-two lengths run an iterative radix-2 butterfly,
* composite lengths split on the smallest prime factor (Cooley-Tukey),
* small prime lengths fall back to the direct O(n^2) definition,
* large prime lengths use Bluestein's chirp-z with power-of-two
  convolutions (the squared index is reduced mod 2n before it ever
  touches a float, so twiddle angles stay small and accurate).

Convention: forward is unnormalized, X[k] = sum_n x[n] e^{-2pi i <k, n/N>};
the inverse carries the 1/N factor so inverse(forward(x)) == x.
"""

from __future__ import annotations

import numpy as np

__all__ = ["fft_nd", "dft_1d"]


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _fft_pow2(x: np.ndarray, sign: int) -> np.ndarray:
    n, m = x.shape
    if n == 1:
        return x.copy()
    y = x[_bit_reverse_indices(n)]
    half = 1
    while half < n:
        tw = np.exp((sign * 1j * np.pi / half) * np.arange(half))
        y = y.reshape(-1, 2, half, m)
        even = y[:, 0]
        odd = y[:, 1] * tw[None, :, None]
        y = np.concatenate([even + odd, even - odd], axis=1)
        half *= 2
    return y.reshape(n, m)


def _direct(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[0]
    k = np.arange(n)
    w = np.exp((sign * 2j * np.pi / n) * (k[:, None] * k[None, :]))
    return w @ x


def _bluestein(x: np.ndarray, sign: int) -> np.ndarray:
    n, m = x.shape
    k = np.arange(n)
    q = (k * k) % (2 * n)
    chirp = np.exp((sign * 1j * np.pi / n) * q)
    size = 1 << (2 * n - 1).bit_length()
    a = np.zeros((size, m), dtype=np.complex128)
    a[:n] = x * chirp[:, None]
    b = np.zeros(size, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    b[size - n + 1:] = np.conj(chirp[1:][::-1])
    conv = _fft_pow2(_fft_pow2(a, -1) * _fft_pow2(b[:, None], -1), +1) / size
    return conv[:n] * chirp[:, None]


def _smallest_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def _fft_axis0(x: np.ndarray, sign: int) -> np.ndarray:
    """Transform along axis 0 of a 2-d complex array, batched over axis 1."""
    n, m = x.shape
    if n <= 1:
        return x.copy()
    if n & (n - 1) == 0:
        return _fft_pow2(x, sign)
    p = _smallest_factor(n)
    if p == n:
        return _direct(x, sign) if n <= 64 else _bluestein(x, sign)
    q = n // p
    subs = np.empty((q, p, m), dtype=np.complex128)
    for s in range(p):
        subs[:, s, :] = x[s::p]
    sub_dft = _fft_axis0(subs.reshape(q, p * m), sign).reshape(q, p, m)
    k = np.arange(n)
    tw = np.exp((sign * 2j * np.pi / n) * (k[:, None] * np.arange(p)[None, :]))
    return np.einsum("kp,kpm->km", tw, sub_dft[k % q])


def dft_1d(values, inverse: bool = False) -> np.ndarray:
    """One-dimensional transform of a 1-d sequence."""
    x = np.asarray(values, dtype=np.complex128).reshape(-1, 1)
    out = _fft_axis0(x, +1 if inverse else -1)[:, 0]
    return out / x.shape[0] if inverse else out


def fft_nd(values, inverse: bool = False) -> np.ndarray:
    """Full n-dimensional transform (applied along every axis)."""
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.size == 0:
        return x.copy()
    sign = +1 if inverse else -1
    out = x
    for axis in range(out.ndim):
        moved = np.moveaxis(out, axis, 0)
        flat = moved.reshape(moved.shape[0], -1)
        out = np.moveaxis(_fft_axis0(flat, sign).reshape(moved.shape), 0, axis)
    if inverse:
        out = out / out.size
    return out
