"""The array functions as SQL, on an in-memory sqlite database.

register_all puts ~580 functions on a connection, named
<Elem>Array[Max]_<Op>[_<n>]: constructors, item access, windows,
updates, conversions, string forms, a true Concat aggregate and the
ToTable expansion recipe.
"""

import numpy as np

import ndblob as nb
from ndblob.sql import Session, array_to_table, array_to_table_query

E = nb.ElementType

ses = Session()
print("registered functions:", ses.bindings)

# build a vector, read the (zero-indexed) element 3
print(ses.query(
    "SELECT FloatArray_Item_1(FloatArray_Vector_5(1.0, 2.0, 3.0, 4.0, 5.0), 3)"))

# matrices fill column-major: Item_2(m, 1, 0) is the second listed value
print(ses.query(
    "SELECT FloatArray_Item_2(FloatArray_Matrix_2(0.1, 0.2, 0.3, 0.4), 1, 0)"))

# a 5x5x5 window of a three-dimensional max array
big = nb.from_numpy(np.random.default_rng(0).random((12, 12, 12)))
(cube,) = ses.query(
    "SELECT FloatArrayMax_Subarray(:a, IntArray_Vector_3(1, 4, 6), "
    "IntArray_Vector_3(5, 5, 5), 0)", {"a": big.to_bytes()})[0]
print("window dims:", nb.ArrayBlob.from_bytes(cube).dims)

# update one element; arrays are values, so you get a fresh blob back
(updated,) = ses.query(
    "SELECT FloatArray_UpdateItem_1(FloatArray_Vector_5"
    "(1.0, 2.0, 3.0, 4.0, 5.0), 3, 4.5)")[0]
print("updated    :", nb.to_numpy(nb.ArrayBlob.from_bytes(updated)))

# Concat is a real aggregate: assemble arrays from (ix, v) rows per group
ses.execute("CREATE TABLE obs (night INTEGER, ix BLOB, v REAL)")
rng = np.random.default_rng(1)
ses.connection.executemany(
    "INSERT INTO obs VALUES (?, ?, ?)",
    [(night, nb.make_vector(E.INT32, [i]).to_bytes(), float(rng.random()))
     for night in (1, 2) for i in range(4)])
dims = nb.make_vector(E.INT32, [4]).to_bytes()
for night, blob in ses.query(
        "SELECT night, FloatArray_Concat(?, ix, v) FROM obs "
        "GROUP BY night ORDER BY night", (dims,)):
    print("night", night, ":", nb.to_numpy(nb.ArrayBlob.from_bytes(blob)))

# ToTable has no table-valued functions to lean on in sqlite, so the
# expansion is a documented recursive-series recipe
m = nb.make_matrix(E.FLOAT64, 2, 2, (1.0, 2.0, 3.0, 4.0))
print("ToTable rows:", array_to_table(ses.connection, m))
print("recipe SQL  :", array_to_table_query("FloatArray", 2)[:80], "...")

# runtime tag checks catch type mixups, with the message preserved
try:
    ses.query("SELECT IntArray_Item_1(FloatArray_Vector_2(1.0, 2.0), 0)")
except Exception as e:
    print("type check  :", e)

ses.close()
