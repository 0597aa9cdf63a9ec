"""Command-line front end for .ablob files.

Subcommands: create, item, subarray, update, reshape, cast, raw,
totable, fromcsv, fft, svd, text, bench. Element types are named
i8/i16/i32/i64/f32/f64/c64/c128 (long forms like float64 also work).
Reads of max blobs go through the counting reader, so `item` and
`subarray` on a large file only touch the bytes they need.

Exit status: 0 on success, 1 with a one-line diagnostic on operation
errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .backends import fft_forward, fft_inverse, svd
from .bench import BenchConfig, bench_run, format_report, write_csv
from .errors import BlobError
from .format import ArrayBlob, ElementType, StorageClass
from .ops import (
    SubarrayRange,
    cast_raw,
    convert_storage,
    item,
    item_streamed,
    make_filled,
    make_vector,
    raw,
    reshape,
    subarray,
    subarray_streamed,
    update_item,
)
from .reader import BlockReader
from .table import concat_from_cursor, read_indexed_csv, write_indexed_csv
from .text import _formatter, from_text, to_text


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",")) if text else ()


def _parse_value(elem: ElementType, text: str):
    if elem.is_integer:
        return int(text)
    if elem.is_complex:
        return complex(text)
    return float(text)


def _load(path: str) -> ArrayBlob:
    return ArrayBlob.load(path)


def _is_max_file(path: str) -> bool:
    with open(path, "rb") as f:
        return bool(f.read(1)[0] & 0x01)


def _cmd_create(args) -> int:
    elem = ElementType.parse(args.elem)
    dims = _ints(args.dims)
    if args.values is not None:
        values = ([_parse_value(elem, v) for v in args.values.split(",")]
                  if args.values else [])
        blob = make_vector(elem, values)
        if dims != (len(values),):
            blob = reshape(blob, dims)
    else:
        blob = make_filled(elem, dims, _parse_value(elem, args.fill))
    if args.storage:
        blob = convert_storage(blob, StorageClass(args.storage))
    blob.save(args.out)
    return 0


def _cmd_item(args) -> int:
    indices = _ints(args.indices)
    if _is_max_file(args.file):
        with BlockReader(args.file) as reader:
            value = item_streamed(reader, indices)
            elem = ElementType.from_code(reader.read_at(1, 1)[0])
    else:
        blob = _load(args.file)
        value, elem = item(blob, indices), blob.elem
    print(_formatter(elem)(value))
    return 0


def _cmd_subarray(args) -> int:
    ranges = SubarrayRange(_ints(args.offset), _ints(args.len))
    if _is_max_file(args.file):
        with BlockReader(args.file) as reader:
            out = subarray_streamed(reader, ranges, squeeze=args.squeeze)
    else:
        out = subarray(_load(args.file), ranges, squeeze=args.squeeze)
    out.save(args.out)
    return 0


def _cmd_update(args) -> int:
    blob = _load(args.file)
    value = _parse_value(blob.elem, args.value)
    update_item(blob, _ints(args.indices), value).save(args.out)
    return 0


def _cmd_reshape(args) -> int:
    reshape(_load(args.file), _ints(args.dims)).save(args.out)
    return 0


def _cmd_cast(args) -> int:
    with open(args.raw, "rb") as f:
        data = f.read()
    cast_raw(ElementType.parse(args.elem), _ints(args.dims), data).save(args.out)
    return 0


def _cmd_raw(args) -> int:
    with open(args.out, "wb") as f:
        f.write(raw(_load(args.file)))
    return 0


def _cmd_totable(args) -> int:
    blob = _load(args.file)
    if args.csv:
        write_indexed_csv(args.csv, blob)
    else:
        write_indexed_csv(sys.stdout, blob)
    return 0


def _cmd_fromcsv(args) -> int:
    elem = ElementType.parse(args.elem)
    dims_blob = make_vector(ElementType.INT32, _ints(args.dims))
    rows = read_indexed_csv(args.csv, elem)
    concat_from_cursor(elem, dims_blob, rows, policy=args.policy).save(args.out)
    return 0


def _cmd_fft(args) -> int:
    op = fft_inverse if args.inverse else fft_forward
    op(_load(args.file), backend=args.backend).save(args.out)
    return 0


def _cmd_svd(args) -> int:
    result = svd(_load(args.file), mode=args.mode, backend=args.backend)
    result.u.save(args.u)
    result.s.save(args.s)
    result.vt.save(args.vt)
    return 0


def _cmd_text(args) -> int:
    if args.parse is not None:
        if not args.out or not args.elem:
            print("text --parse requires --elem and --out", file=sys.stderr)
            return 2
        from_text(ElementType.parse(args.elem), args.parse).save(args.out)
        return 0
    if not args.file:
        print("text: give a file to print, or --parse", file=sys.stderr)
        return 2
    print(to_text(_load(args.file)))
    return 0


def _cmd_bench(args) -> int:
    config = BenchConfig(row_count=args.rows, vector_dim=args.dim,
                         elem=ElementType.parse(args.elem))
    result = bench_run(config, workdir=args.workdir)
    print(format_report(result), end="")
    if args.csv:
        write_csv(result.reports, args.csv)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndblob", description="manipulate .ablob array files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("create", help="build an array from values or a fill")
    p.add_argument("--elem", required=True)
    p.add_argument("--dims", required=True)
    p.add_argument("--values", help="comma-separated, storage (column-major) order")
    p.add_argument("--fill", default="0")
    p.add_argument("--storage", choices=["short", "max"])
    p.add_argument("out")
    p.set_defaults(func=_cmd_create)

    p = sub.add_parser("item", help="print one element")
    p.add_argument("file")
    p.add_argument("indices", help="comma-separated, e.g. 3 or 1,0")
    p.set_defaults(func=_cmd_item)

    p = sub.add_parser("subarray", help="cut a contiguous window")
    p.add_argument("file")
    p.add_argument("--offset", required=True)
    p.add_argument("--len", required=True)
    p.add_argument("--squeeze", action="store_true")
    p.add_argument("out")
    p.set_defaults(func=_cmd_subarray)

    p = sub.add_parser("update", help="write one element")
    p.add_argument("file")
    p.add_argument("indices")
    p.add_argument("value")
    p.add_argument("out")
    p.set_defaults(func=_cmd_update)

    p = sub.add_parser("reshape", help="same elements, new shape")
    p.add_argument("file")
    p.add_argument("--dims", required=True)
    p.add_argument("out")
    p.set_defaults(func=_cmd_reshape)

    p = sub.add_parser("cast", help="prefix raw numbers with a header")
    p.add_argument("--elem", required=True)
    p.add_argument("--dims", required=True)
    p.add_argument("raw")
    p.add_argument("out")
    p.set_defaults(func=_cmd_cast)

    p = sub.add_parser("raw", help="strip the header")
    p.add_argument("file")
    p.add_argument("out")
    p.set_defaults(func=_cmd_raw)

    p = sub.add_parser("totable", help="expand to CSV rows (i_0..i_{r-1},value)")
    p.add_argument("file")
    p.add_argument("--csv", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_totable)

    p = sub.add_parser("fromcsv", help="assemble an array from CSV rows")
    p.add_argument("--elem", required=True)
    p.add_argument("--dims", required=True)
    p.add_argument("--policy", choices=["strict", "zero_fill"], default="strict")
    p.add_argument("csv")
    p.add_argument("out")
    p.set_defaults(func=_cmd_fromcsv)

    p = sub.add_parser("fft", help="discrete Fourier transform")
    p.add_argument("file")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--backend", default=None)
    p.add_argument("out")
    p.set_defaults(func=_cmd_fft)

    p = sub.add_parser("svd", help="singular value decomposition")
    p.add_argument("file")
    p.add_argument("--u", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--vt", required=True)
    p.add_argument("--mode", choices=["thin", "full"], default="thin")
    p.add_argument("--backend", default=None)
    p.set_defaults(func=_cmd_svd)

    p = sub.add_parser("text", help="print the text form, or parse one")
    p.add_argument("file", nargs="?")
    p.add_argument("--parse", help="array text to parse instead of printing")
    p.add_argument("--elem", help="element type for --parse")
    p.add_argument("--out", help="output file for --parse")
    p.set_defaults(func=_cmd_text)

    p = sub.add_parser("bench", help="run the scan-query benchmark")
    p.add_argument("--rows", type=int, default=1_000_000)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--elem", default="f64")
    p.add_argument("--csv", help="write the report CSV here")
    p.add_argument("--workdir", help="keep database files here")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BlobError, OSError, ValueError, RuntimeError) as e:
        print(f"ndblob {args.command}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
