"""Pluggable math backends and the blob-level FFT / SVD operations.

Backends work directly on the column-major numpy views of blob
payloads, so handing a matrix to a backend involves no data
transformation at all. A backend must pass this module's qualification
suite before it can be registered; the built-in "reference"
implementations are always available and selected by default, and a
"numpy" backend is registered alongside as a faster drop-in.

Registration is meant to happen at startup; the registry is read-only
afterwards and the math entry points themselves are pure and
reentrant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fft as _reffft
from . import svd as _refsvd
from .errors import BackendError, ShapeError, TypeMismatchError
from .format import ArrayBlob, ElementType, from_numpy, to_numpy

__all__ = [
    "MathBackend",
    "ReferenceBackend",
    "NumpyBackend",
    "SvdResult",
    "register_backend",
    "select_backend",
    "active_backend",
    "available_backends",
    "fft_forward",
    "fft_inverse",
    "svd",
]


class MathBackend:
    """Interface a math backend implements.

    `fft` transforms a complex128 array along every axis (unnormalized
    forward, 1/N inverse); `svd` factors a float64 matrix into
    (u, s, vt) with s descending. Only the capabilities a backend
    declares are exercised or dispatched to it. A backend that needs
    specially aligned or writable buffers must copy into its own
    scratch space; callers may hand it read-only payload views.
    """

    name: str = "?"
    capabilities: frozenset = frozenset()

    def fft(self, values: np.ndarray, inverse: bool) -> np.ndarray:
        raise NotImplementedError

    def svd(self, a: np.ndarray, full: bool):
        raise NotImplementedError


class ReferenceBackend(MathBackend):
    name = "reference"
    capabilities = frozenset({"fft", "svd"})

    def fft(self, values, inverse):
        return _reffft.fft_nd(values, inverse=inverse)

    def svd(self, a, full):
        return _refsvd.jacobi_svd(a, full=full)


class NumpyBackend(MathBackend):
    name = "numpy"
    capabilities = frozenset({"fft", "svd"})

    def fft(self, values, inverse):
        return np.fft.ifftn(values) if inverse else np.fft.fftn(values)

    def svd(self, a, full):
        return np.linalg.svd(a, full_matrices=full)


@dataclass(frozen=True)
class SvdResult:
    """SVD factors as blobs: u (m x m or m x k), s (rank-1, descending,
    nonnegative), vt (k x n or n x n)."""

    u: ArrayBlob
    s: ArrayBlob
    vt: ArrayBlob

    def reconstruct(self) -> np.ndarray:
        u = to_numpy(self.u)
        s = to_numpy(self.s)
        vt = to_numpy(self.vt)
        k = s.shape[0]
        return (u[:, :k] * s) @ vt[:k]


_backends: dict[str, MathBackend] = {}
_active: list[str] = ["reference"]


def _check(cond: bool, what: str) -> None:
    if not cond:
        raise BackendError(f"backend qualification failed: {what}")


def _qualify(backend: MathBackend) -> None:
    caps = frozenset(backend.capabilities)
    _check(bool(caps) and caps <= {"fft", "svd"},
           f"capabilities must be a nonempty subset of {{fft, svd}}, got {set(caps)}")
    rng = np.random.default_rng(20240917)
    if "fft" in caps:
        delta = np.zeros(8, dtype=np.complex128)
        delta[0] = 1.0
        _check(np.allclose(backend.fft(delta, False), np.ones(8), atol=1e-12),
               "forward transform of a unit impulse must be all ones")
        const = np.ones(4, dtype=np.complex128)
        _check(np.allclose(backend.fft(const, False), [4, 0, 0, 0], atol=1e-12),
               "forward transform of a constant must be a scaled impulse")
        for shape in [(12,), (2, 3, 4), (5, 5)]:
            x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            rt = backend.fft(backend.fft(x, False), True)
            _check(np.allclose(rt, x, atol=1e-9 * np.abs(x).max()),
                   f"inverse(forward(x)) must restore x for shape {shape}")
        x = rng.standard_normal(16) + 0j
        y = rng.standard_normal(16) + 0j
        lin = backend.fft(2.0 * x + 3.0 * y, False)
        ref = 2.0 * backend.fft(x, False) + 3.0 * backend.fft(y, False)
        _check(np.allclose(lin, ref, atol=1e-9 * np.abs(ref).max()),
               "transform must be linear")
    if "svd" in caps:
        _check(np.allclose(backend.svd(np.eye(3), False)[1], [1, 1, 1], atol=1e-12),
               "singular values of the identity must be ones")
        for shape, full in [((20, 8), False), ((8, 20), False), ((16, 16), True),
                            ((20, 8), True)]:
            a = rng.standard_normal(shape)
            u, s, vt = backend.svd(a, full)
            k = min(shape)
            _check(s.shape == (k,) and (np.diff(s) <= 0).all() and (s >= 0).all(),
                   f"singular values must be descending and nonnegative for {shape}")
            recon = (u[:, :k] * s) @ vt[:k]
            _check(np.abs(recon - a).max() <= 1e-10 * np.abs(a).max(),
                   f"u @ diag(s) @ vt must reconstruct the input for {shape}")
            _check(np.abs(u.T @ u - np.eye(u.shape[1])).max() <= 1e-10,
                   f"left factor must be column-orthonormal for {shape}")
            _check(np.abs(vt @ vt.T - np.eye(vt.shape[0])).max() <= 1e-10,
                   f"right factor must be row-orthonormal for {shape}")


def register_backend(backend: MathBackend) -> MathBackend:
    """Qualify and register a backend; rejects anything that fails the
    property suite."""
    _qualify(backend)
    _backends[backend.name] = backend
    return backend


def select_backend(name: str) -> MathBackend:
    """Make `name` the default backend for subsequent calls."""
    backend = _lookup(name)
    _active[0] = name
    return backend


def active_backend() -> MathBackend:
    return _backends[_active[0]]


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_backends))


def _lookup(name) -> MathBackend:
    if isinstance(name, MathBackend):
        return name
    if name is None:
        return active_backend()
    try:
        return _backends[name]
    except KeyError:
        raise BackendError(
            f"unknown backend {name!r}; registered: {', '.join(sorted(_backends))}"
        ) from None


def _dispatch(name, capability: str) -> MathBackend:
    backend = _lookup(name)
    if capability not in backend.capabilities:
        raise BackendError(f"backend {backend.name!r} lacks {capability}")
    return backend


def _complex_elem_for(elem: ElementType) -> ElementType:
    if elem in (ElementType.FLOAT32, ElementType.COMPLEX64):
        return ElementType.COMPLEX64
    return ElementType.COMPLEX128


def fft_forward(blob: ArrayBlob, backend=None) -> ArrayBlob:
    """Unnormalized forward DFT along every dimension; complex result of
    the same shape. Width follows the input: 32-bit floats yield
    COMPLEX64, 64-bit yield COMPLEX128."""
    if blob.elem.is_integer:
        raise TypeMismatchError(
            f"transform requires float or complex elements, got {blob.elem.name}")
    bk = _dispatch(backend, "fft")
    out = bk.fft(to_numpy(blob).astype(np.complex128), inverse=False)
    return from_numpy(out, _complex_elem_for(blob.elem))


def fft_inverse(blob: ArrayBlob, backend=None) -> ArrayBlob:
    """Inverse DFT with 1/N normalization, so inverse(forward(x)) == x."""
    if not blob.elem.is_complex:
        raise TypeMismatchError(
            f"inverse transform requires a complex blob, got {blob.elem.name}")
    bk = _dispatch(backend, "fft")
    out = bk.fft(to_numpy(blob).astype(np.complex128), inverse=True)
    return from_numpy(out, _complex_elem_for(blob.elem))


def svd(blob: ArrayBlob, mode: str = "thin", backend=None) -> SvdResult:
    """Singular value decomposition of a rank-2 real float blob.

    Factors always come back as FLOAT64 blobs (32-bit inputs are
    widened before factoring). `mode` is "thin" (m x k, k, k x n) or
    "full" (m x m, k, n x n).
    """
    if mode not in ("thin", "full"):
        raise ValueError(f"unknown svd mode {mode!r}")
    if not blob.elem.is_float:
        raise TypeMismatchError(
            f"svd requires real float elements, got {blob.elem.name}")
    if blob.rank != 2:
        raise ShapeError(f"svd requires a matrix, got rank {blob.rank}")
    bk = _dispatch(backend, "svd")
    u, s, vt = bk.svd(to_numpy(blob).astype(np.float64), full=(mode == "full"))
    return SvdResult(
        from_numpy(u, ElementType.FLOAT64),
        from_numpy(s, ElementType.FLOAT64),
        from_numpy(vt, ElementType.FLOAT64),
    )


register_backend(ReferenceBackend())
register_backend(NumpyBackend())
