"""Shared generators and independent oracles for the test suite.

The oracles here intentionally avoid the code paths they check: the
DFT oracle is the direct definition sum, and the singular value oracle
goes through a symmetric eigensolver on the Gram matrix.
"""

from __future__ import annotations

from math import prod

import numpy as np

from ndblob import (
    ArrayBlob,
    ElementType,
    StorageClass,
    cast_raw,
    convert_storage,
)

ALL_ELEMS = list(ElementType)

_INT_LO_HI = {
    ElementType.INT8: (-(2**7), 2**7 - 1),
    ElementType.INT16: (-(2**15), 2**15 - 1),
    ElementType.INT32: (-(2**31), 2**31 - 1),
    ElementType.INT64: (-(2**63), 2**63 - 1),
}


def random_values(rng: np.random.Generator, elem: ElementType, n: int,
                  specials: bool = True) -> np.ndarray:
    """Random payload values of the given element type; floats get an
    occasional canonical nan/inf/-0.0 sprinkled in."""
    if elem.is_integer:
        lo, hi = _INT_LO_HI[elem]
        return rng.integers(lo, hi, size=n, dtype=elem.dtype,
                            endpoint=True)
    def floats(k):
        out = (rng.standard_normal(k) * np.exp(rng.uniform(-3, 3, k)))
        if specials and k:
            picks = rng.random(k)
            out[picks < 0.02] = np.nan
            out[(picks >= 0.02) & (picks < 0.04)] = np.inf
            out[(picks >= 0.04) & (picks < 0.06)] = -np.inf
            out[(picks >= 0.06) & (picks < 0.08)] = -0.0
        return out
    if elem.is_complex:
        out = np.empty(n, dtype=elem.dtype)
        out.real = floats(n)
        out.imag = floats(n)
        return out
    return floats(n).astype(elem.dtype)


def random_dims(rng: np.random.Generator, max_rank: int = 4,
                max_total: int = 512, allow_zero: bool = False) -> tuple[int, ...]:
    rank = int(rng.integers(1, max_rank + 1))
    dims = []
    budget = max_total
    for _ in range(rank):
        low = 0 if (allow_zero and rng.random() < 0.05) else 1
        d = int(rng.integers(low, max(2, budget // 2) + 1))
        d = min(d, max(low, budget))
        dims.append(d)
        budget = max(1, budget // max(1, d))
    rng.shuffle(dims)
    return tuple(dims)


def random_blob(rng: np.random.Generator, elem: ElementType | None = None,
                storage: StorageClass | None = None, max_rank: int = 4,
                max_total: int = 512, allow_zero: bool = False) -> ArrayBlob:
    if elem is None:
        elem = ALL_ELEMS[rng.integers(0, len(ALL_ELEMS))]
    dims = random_dims(rng, max_rank=max_rank, max_total=max_total,
                       allow_zero=allow_zero)
    values = random_values(rng, elem, prod(dims))
    blob = cast_raw(elem, dims, values.tobytes())
    if storage is not None and blob.storage is not storage:
        blob = convert_storage(blob, storage)
    return blob


def naive_dft(x, inverse: bool = False) -> np.ndarray:
    """Direct-definition n-dimensional DFT, O(N^2): one explicit loop
    over output indices, the inner sum evaluated from the formula."""
    x = np.asarray(x, dtype=np.complex128)
    dims = x.shape
    n_total = x.size
    if n_total == 0:
        return x.copy()
    flat = x.reshape(-1)
    coords = np.unravel_index(np.arange(n_total), dims)
    sign = 2j * np.pi if inverse else -2j * np.pi
    out = np.empty(n_total, dtype=np.complex128)
    for j in range(n_total):
        k = np.unravel_index(j, dims)
        phase = sum(kd * nd / sz for kd, nd, sz in zip(k, coords, dims))
        out[j] = np.sum(flat * np.exp(sign * phase))
    out = out.reshape(dims)
    return out / n_total if inverse else out


def naive_dft_scalar(x) -> np.ndarray:
    """Fully scalar direct sum, used to cross-check naive_dft itself."""
    x = np.asarray(x, dtype=np.complex128)
    dims = x.shape
    out = np.zeros(dims, dtype=np.complex128)
    for k in np.ndindex(*dims):
        acc = 0.0 + 0.0j
        for n in np.ndindex(*dims):
            phase = sum(kd * nd / sz for kd, nd, sz in zip(k, n, dims))
            acc += complex(x[n]) * np.exp(-2j * np.pi * phase)
        out[k] = acc
    return out


def same_scalar(elem: ElementType, a, b) -> bool:
    """Value equality by payload bytes, so nan == nan."""
    return (np.array([a], dtype=elem.dtype).tobytes()
            == np.array([b], dtype=elem.dtype).tobytes())


def oracle_singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values as square roots of the Gram matrix eigenvalues,
    via an independent symmetric eigensolver."""
    a = np.asarray(a, dtype=np.float64)
    gram = a.T @ a if a.shape[0] >= a.shape[1] else a @ a.T
    eig = np.linalg.eigvalsh(gram)
    return np.sqrt(np.clip(eig, 0.0, None))[::-1]
