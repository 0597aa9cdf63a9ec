"""FFT and SVD straight off the blob payload.

The payload is column-major, which is exactly what FORTRAN-convention
math kernels want, so a blob's matrix view feeds a backend with no
marshaling at all. Backends are pluggable; a registration gate runs a
property suite so a broken one can never be selected.
"""

import numpy as np

from ndblob import (
    BackendError,
    ElementType,
    MathBackend,
    available_backends,
    fft_forward,
    fft_inverse,
    from_numpy,
    make_vector,
    register_backend,
    svd,
    to_numpy,
)

E = ElementType

# forward transform of a unit impulse is flat ones (textbook check)
delta = make_vector(E.FLOAT64, [1.0] + [0.0] * 7)
print("fft(delta)      :", to_numpy(fft_forward(delta)).real)

# inverse is normalized so the round trip is the identity
x = np.random.default_rng(0).standard_normal((3, 5, 7))  # non-power-of-two
back = fft_inverse(fft_forward(from_numpy(x)))
print("round trip error:", float(np.abs(to_numpy(back) - x).max()))

# SVD of a blob matrix: factors come back as blobs too
a = np.random.default_rng(1).standard_normal((8, 5))
result = svd(from_numpy(a))
s = to_numpy(result.s)
print("singular values :", np.array2string(s, precision=3))
print("reconstruction  :", float(np.abs(result.reconstruct() - a).max()))

# two backends ship: the built-in reference kernels and a numpy wrapper
print("backends        :", available_backends())
ref = to_numpy(svd(from_numpy(a), backend="reference").s)
fast = to_numpy(svd(from_numpy(a), backend="numpy").s)
print("backends agree  :", float(np.abs(ref - fast).max()))

# registration rejects anything that fails the property suite
class Sloppy(MathBackend):
    name = "sloppy"
    capabilities = frozenset({"fft"})

    def fft(self, values, inverse):
        return np.asarray(values, dtype=complex) * 0.99  # not a DFT

try:
    register_backend(Sloppy())
except BackendError as e:
    print("sloppy backend  :", str(e)[:72], "...")
