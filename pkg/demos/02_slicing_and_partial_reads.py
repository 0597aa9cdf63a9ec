"""Windows, squeezing, and reading only the bytes you need.

Max blobs support partial reads: a counting reader fetches one
contiguous byte run per maximal run of consecutive elements, so a
small window of a big array barely touches the payload.
"""

import numpy as np

from ndblob import (
    BlockReader,
    ElementType,
    SubarrayRange,
    from_numpy,
    item,
    item_streamed,
    make_matrix,
    make_vector,
    subarray,
    subarray_streamed,
    to_numpy,
    update_item,
)

# a 64^3 float32 cube, about 1 MiB: stored as a max blob
cube = np.random.default_rng(0).random((64, 64, 64), dtype=np.float32)
blob = from_numpy(cube)
print("cube blob:", len(blob.to_bytes()), "bytes,", blob.storage.value)

# cut an 8x8x8 window the obvious way (whole blob in memory)
window = subarray(blob, SubarrayRange((5, 9, 17), (8, 8, 8)))
print("window  :", window.dims, "->", window.storage.value,
      f"({len(window.to_bytes())} bytes, back under the page budget)")

# the same through the counting reader: only 64 runs of 8 elements
reader = BlockReader(blob.to_bytes())
streamed = subarray_streamed(reader, SubarrayRange((5, 9, 17), (8, 8, 8)))
print("streamed == materialized:", streamed.to_bytes() == window.to_bytes())
print(f"bytes read: {reader.bytes_read} of {len(blob.to_bytes())} "
      f"({100 * reader.bytes_read / len(blob.to_bytes()):.2f}%) "
      f"in {reader.read_calls} reads")

# single elements are even cheaper: header plus one element
reader = BlockReader(blob.to_bytes())
x = item_streamed(reader, [10, 20, 30])
print(f"one element: {x:.6f} for {reader.bytes_read} bytes read")

# squeezing drops size-1 dimensions: the classic column-vector trick
m = make_matrix(ElementType.FLOAT64, 2, 2, (0.1, 0.2, 0.3, 0.4))
col = subarray(m, SubarrayRange((0, 1), (2, 1)), squeeze=True)
print()
print("second column of a 2x2:", to_numpy(col), "rank", col.rank)

# updates never mutate: you always get a new blob
v = make_vector(ElementType.FLOAT64, [1.0, 2.0, 3.0])
w = update_item(v, [1], 9.0)
print("update_item:", to_numpy(v), "->", to_numpy(w))
print("original intact:", item(v, [1]) == 2.0)
