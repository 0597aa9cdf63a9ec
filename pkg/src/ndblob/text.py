"""Nested-brace text form for arrays.

Grammar (whitespace allowed between tokens)::

    array  := "{" [ item ("," item)* ] "}"
    item   := array | scalar

The outermost braces enumerate dimension 0 and the innermost braces run
along the last dimension, so element [i0, i1, ..., ik] sits at nesting
position [i0][i1]...[ik]. A 2x2 matrix whose column-major payload is
(a, b, c, d) prints as ``{{a,c},{b,d}}`` and a vector as ``{1,2,3}``.

Floats use the shortest representation that parses back to the exact
value; non-finite values are spelled ``nan``, ``inf`` and ``-inf``.
Complex scalars are ``<real><+|-><imag>j``. Note that ``{}`` carries no
inner structure, so the shape of an array whose first dimension is zero
collapses to dims [0] on re-parse; arrays without zero-length
dimensions round-trip exactly.
"""

from __future__ import annotations

from math import copysign, isnan

import numpy as np

from .errors import ShapeError, TextParseError
from .format import ArrayBlob, ArrayHeader, ElementType, classify, to_numpy
from .ops import _scalar

__all__ = ["to_text", "from_text"]


def _fmt_float32(v) -> str:
    return str(np.float32(v))


def _fmt_float64(v) -> str:
    return repr(float(v))


def _fmt_complex(v, part_fmt) -> str:
    re_s = part_fmt(v.real)
    im = v.imag
    if isnan(im) or copysign(1.0, im) >= 0:
        return f"{re_s}+{part_fmt(im)}j"
    return f"{re_s}-{part_fmt(-im)}j"


def _formatter(elem: ElementType):
    if elem.is_integer:
        return lambda v: str(int(v))
    if elem is ElementType.FLOAT32:
        return _fmt_float32
    if elem is ElementType.FLOAT64:
        return _fmt_float64
    part = _fmt_float32 if elem is ElementType.COMPLEX64 else _fmt_float64
    return lambda v: _fmt_complex(v, part)


def to_text(blob: ArrayBlob) -> str:
    fmt = _formatter(blob.elem)
    arr = to_numpy(blob)

    def render(a) -> str:
        if a.ndim == 1:
            return "{" + ",".join(fmt(v) for v in a) + "}"
        return "{" + ",".join(render(a[i]) for i in range(a.shape[0])) + "}"

    return render(arr)


def _tokenize(s: str):
    """Yield (position, token) with token one of '{', '}', ',' or a scalar string."""
    i, n = 0, len(s)
    while i < n:
        c = s[i]
        if c.isspace():
            i += 1
            continue
        if c in "{},":
            yield i, c
            i += 1
            continue
        j = i
        while j < n and s[j] not in "{}," and not s[j].isspace():
            j += 1
        yield i, s[i:j]
        i = j


def _parse_nested(s: str):
    """Parse the brace structure into nested Python lists of scalar strings."""
    tokens = list(_tokenize(s))
    if not tokens:
        raise TextParseError("empty input", 0)
    pos = 0

    def parse_item():
        nonlocal pos
        at, tok = tokens[pos]
        if tok == "{":
            pos += 1
            items = []
            if pos < len(tokens) and tokens[pos][1] == "}":
                pos += 1
                return items
            while True:
                items.append(parse_item())
                if pos >= len(tokens):
                    raise TextParseError("unterminated array", at)
                at2, tok2 = tokens[pos]
                pos += 1
                if tok2 == "}":
                    return items
                if tok2 != ",":
                    raise TextParseError(f"expected ',' or '}}', got {tok2!r}", at2)
        if tok in ("}", ","):
            raise TextParseError(f"unexpected {tok!r}", at)
        pos += 1
        return (at, tok)

    at0, tok0 = tokens[0]
    if tok0 != "{":
        raise TextParseError("array text must start with '{'", at0)
    root = parse_item()
    if pos != len(tokens):
        raise TextParseError("trailing input after array", tokens[pos][0])
    return root


def _shape_of(node) -> tuple[int, ...]:
    if not isinstance(node, list):
        return ()
    if not node:
        return (0,)
    first = _shape_of(node[0])
    for child in node[1:]:
        if _shape_of(child) != first:
            raise ShapeError("ragged nesting: subarrays differ in shape")
    return (len(node),) + first


def _flatten(node, out) -> None:
    if isinstance(node, list):
        for child in node:
            _flatten(child, out)
    else:
        out.append(node)


def _parse_scalar(elem: ElementType, at: int, tok: str):
    try:
        if elem.is_integer:
            value = int(tok, 10)
        elif elem.is_complex:
            value = complex(tok)
        else:
            value = float(tok)
    except ValueError:
        raise TextParseError(f"bad {elem.name} literal {tok!r}", at) from None
    return _scalar(elem, value)


def from_text(elem: ElementType, s: str) -> ArrayBlob:
    """Parse the nested-brace form into a blob of the given element type."""
    root = _parse_nested(s)
    dims = _shape_of(root)
    if dims == ():
        raise TextParseError("array text must start with '{'", 0)
    leaves: list = []
    _flatten(root, leaves)
    arr = np.empty(len(leaves), dtype=elem.dtype)
    for i, (at, tok) in enumerate(leaves):
        arr[i] = _parse_scalar(elem, at, tok)
    # nesting is outermost-first, so the flat order is C order
    payload = arr.reshape(dims, order="C").tobytes(order="F")
    return ArrayBlob(ArrayHeader(classify(elem, dims), elem, dims), payload)
