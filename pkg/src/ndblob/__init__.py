"""ndblob: dense n-dimensional numeric arrays as compact binary blobs.

A blob is a 24-byte (short) or 16+4r-byte (max) header followed by the
elements in column-major order, ready to hand to FORTRAN-convention
math libraries without any marshaling. The package provides the codec,
a full manipulation surface (slicing, reshaping, element access and
update, type and storage conversions, a text form), partial reads of
max blobs through a counting reader, bridges between arrays and
row-per-element tables, FFT and SVD behind a pluggable backend
registry, sqlite3 bindings (``ndblob.sql``), and a benchmark harness
(``ndblob.bench``).
"""

from .errors import (
    BackendError,
    BlobError,
    BoundsError,
    CapacityError,
    CoverageError,
    DuplicateCellError,
    FormatError,
    NonConvergenceError,
    RangeError,
    ShapeError,
    TextParseError,
    TypeMismatchError,
)
from .format import (
    ArrayBlob,
    ArrayHeader,
    ElementType,
    StorageClass,
    classify,
    decode_header,
    delinearize,
    encode_header,
    from_numpy,
    header_from_bytes,
    linearize,
    strides_for,
    to_numpy,
)
from .reader import BlockReader
from .ops import (
    SubarrayRange,
    cast_raw,
    check_elem,
    convert_elem,
    convert_storage,
    item,
    item_streamed,
    make_filled,
    make_matrix,
    make_vector,
    raw,
    reshape,
    subarray,
    subarray_streamed,
    update_item,
)
from .text import from_text, to_text
from .table import (
    ConcatState,
    IndexedValue,
    concat_accumulate,
    concat_finish,
    concat_from_cursor,
    concat_init,
    read_indexed_csv,
    to_table,
    write_indexed_csv,
)
from .backends import (
    MathBackend,
    NumpyBackend,
    ReferenceBackend,
    SvdResult,
    active_backend,
    available_backends,
    fft_forward,
    fft_inverse,
    register_backend,
    select_backend,
    svd,
)

__version__ = "0.1.0"
