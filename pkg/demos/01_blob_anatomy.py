"""A tour of the blob format: headers, storage classes, element types.

An array value is a single byte string: a small header followed by the
elements in column-major order. Small arrays are "short" (fixed 24-byte
header, fits an 8 kB page); everything else is "max".
"""

import numpy as np

from ndblob import (
    ArrayBlob,
    ElementType,
    classify,
    encode_header,
    from_numpy,
    make_matrix,
    make_vector,
    to_numpy,
)

E = ElementType

# a five-element vector of doubles: 24-byte header + 40 payload bytes
v = make_vector(E.FLOAT64, [1.0, 2.0, 3.0, 4.0, 5.0])
print("vector          :", to_numpy(v))
print("blob size       :", len(v.to_bytes()), "bytes",
      f"({v.header.header_size} header + {v.header.payload_size} payload)")
print("storage class   :", v.storage.value)
print("header bytes    :", encode_header(v.header).hex(" "))

# the storage class is decided by size and shape
print()
print("1000 doubles    :", classify(E.FLOAT64, [1000]).value,
      "(24 + 8000 bytes is over the 8 kB page budget)")
print("rank 7          :", classify(E.FLOAT32, [2] * 7).value,
      "(short headers stop at 6 dimensions)")

# matrices fill in column-major order: (a, b, c, d) -> a=[0,0], b=[1,0]
m = make_matrix(E.FLOAT64, 2, 2, (0.1, 0.2, 0.3, 0.4))
print()
print("matrix [0,0],[1,0],[0,1],[1,1]:",
      [float(to_numpy(m)[ix]) for ix in [(0, 0), (1, 0), (0, 1), (1, 1)]])

# numpy arrays convert without reordering: the payload IS the F-order data
a = np.arange(12, dtype=np.int32).reshape(3, 4, order="F")
blob = from_numpy(a)
print()
print("from_numpy dims :", blob.dims, "payload:", blob.payload.hex(" ")[:47], "...")
view = to_numpy(blob)
print("zero-copy view  :", view.flags.f_contiguous, "(F-contiguous, read-only)")

# all eight element types, with their on-disk codes and widths
print()
print("code  name        bytes  integer  complex")
for elem in E:
    print(f"{int(elem):>4}  {elem.name:<10}  {elem.byte_width:>5}"
          f"  {str(elem.is_integer):<7}  {elem.is_complex}")

# blobs live happily in files; .ablob is just the raw bytes
path = "/tmp/demo_vector.ablob"
v.save(path)
again = ArrayBlob.load(path)
print()
print("file round trip :", again.to_bytes() == v.to_bytes(), f"({path})")
