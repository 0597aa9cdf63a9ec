"""Row-per-element tables in and out of arrays.

Assembly works two ways, an aggregate-style state machine and a
one-call cursor drain; both produce byte-identical blobs and neither
cares about row order. Expansion goes the other way, one row per
element in ascending column-major order. CSV files carry the same rows
with an i_0..i_{r-1},value header.
"""

import io

import numpy as np

from ndblob import (
    DuplicateCellError,
    ElementType,
    IndexedValue,
    concat_accumulate,
    concat_finish,
    concat_from_cursor,
    concat_init,
    from_numpy,
    make_vector,
    read_indexed_csv,
    to_numpy,
    to_table,
    write_indexed_csv,
)

E = ElementType

# expand an array into rows
matrix = from_numpy(np.array([[1.0, 3.0], [2.0, 4.0]]))
rows = list(to_table(matrix))
print("rows out (column-major order):")
for row in rows:
    print("   ", row.coords, "->", row.value)

# and assemble it back, rows shuffled, via the three-phase path
shape = make_vector(E.INT32, matrix.dims)
state = concat_init(E.FLOAT64, shape)
for row in rows[::-1]:
    concat_accumulate(state, row)
rebuilt = concat_finish(state)
print("rebuilt == original:", rebuilt.to_bytes() == matrix.to_bytes())

# the cursor path is interchangeable
again = concat_from_cursor(E.FLOAT64, shape, rows)
print("cursor path identical:", again.to_bytes() == rebuilt.to_bytes())

# assigning a cell twice is always an error (order must never matter)
state = concat_init(E.FLOAT64, make_vector(E.INT32, [2]))
concat_accumulate(state, IndexedValue.of([0], 1.0))
try:
    concat_accumulate(state, IndexedValue.of([0], 2.0))
except DuplicateCellError as e:
    print("duplicate cell ->", e)

# partial coverage: strict refuses, zero_fill completes with zeros
sparse = concat_from_cursor(
    E.FLOAT64, make_vector(E.INT32, [5]),
    [IndexedValue.of([2], 9.0)], policy="zero_fill")
print("zero_fill      ->", to_numpy(sparse))

# CSV round trip
buf = io.StringIO()
write_indexed_csv(buf, matrix)
print()
print("CSV form:")
print(buf.getvalue().strip())
back = concat_from_cursor(E.FLOAT64, shape,
                          read_indexed_csv(io.StringIO(buf.getvalue()), E.FLOAT64))
print("CSV round trip:", back.to_bytes() == matrix.to_bytes())
