#!/usr/bin/env python3
"""Regenerate the golden .ablob fixture files and their manifest.

The fixtures freeze the byte layout: any header codec change that
breaks compatibility shows up as a byte diff against these files.
Run with --check to verify the committed files instead of rewriting.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from ndblob import (
    ArrayBlob,
    ElementType,
    StorageClass,
    convert_storage,
    from_numpy,
    make_matrix,
    make_vector,
)

E = ElementType


def build() -> dict[str, ArrayBlob]:
    fixtures = {
        "short_f64_vector5.ablob":
            make_vector(E.FLOAT64, [1.0, 2.0, 3.0, 4.0, 5.0]),
        "short_i8_empty.ablob": make_vector(E.INT8, []),
        "short_i16_matrix2x3.ablob":
            from_numpy(np.arange(1, 7, dtype=np.int16).reshape(2, 3, order="F")),
        "short_i32_matrix2x2.ablob": make_matrix(E.INT32, 2, 2, [1, 2, 3, 4]),
        "short_i64_vector3.ablob":
            make_vector(E.INT64, [-(2**62), 0, 2**62 + 12345]),
        "short_f32_cube2.ablob":
            from_numpy(np.arange(8, dtype=np.float32).reshape(2, 2, 2, order="F") / 4),
        "short_c64_vector3.ablob":
            make_vector(E.COMPLEX64, [1 + 2j, -0.5j, 3.25]),
        "short_c128_vector2.ablob":
            make_vector(E.COMPLEX128, [complex(float("inf"), -1.0),
                                       complex(float("nan"), 0.25)]),
        "max_f32_rank7.ablob":
            from_numpy(np.arange(128, dtype=np.float32).reshape((2,) * 7, order="F")),
        "max_f64_vector1000.ablob":
            from_numpy(np.arange(1000, dtype=np.float64)),
        "max_i32_vector3.ablob":
            convert_storage(make_vector(E.INT32, [7, -8, 9]), StorageClass.MAX),
        "max_c128_matrix2x2.ablob":
            convert_storage(make_matrix(E.COMPLEX128, 2, 2,
                                        [1j, 2 - 1j, -3.5, 0.125j]),
                            StorageClass.MAX),
    }
    return fixtures


def manifest_entry(name: str, blob: ArrayBlob) -> dict:
    data = blob.to_bytes()
    return {
        "file": name,
        "storage": blob.storage.value,
        "elem": blob.elem.name,
        "elem_code": int(blob.elem),
        "rank": blob.rank,
        "dims": list(blob.dims),
        "total_count": blob.total_count,
        "header_size": blob.header.header_size,
        "blob_size": len(data),
        "sha256": hashlib.sha256(data).hexdigest(),
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true",
                        help="verify committed fixtures instead of writing")
    parser.add_argument("--dir", default=Path(__file__).resolve().parents[1] / "fixtures")
    args = parser.parse_args()
    outdir = Path(args.dir)
    fixtures = build()
    manifest = [manifest_entry(name, blob) for name, blob in sorted(fixtures.items())]
    if args.check:
        stored = json.loads((outdir / "manifest.json").read_text())
        if stored != manifest:
            print("manifest.json does not match regenerated fixtures")
            return 1
        for name, blob in fixtures.items():
            if (outdir / name).read_bytes() != blob.to_bytes():
                print(f"{name} differs from regenerated bytes")
                return 1
        print(f"{len(fixtures)} fixtures verified")
        return 0
    outdir.mkdir(parents=True, exist_ok=True)
    for name, blob in fixtures.items():
        (outdir / name).write_bytes(blob.to_bytes())
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(fixtures)} fixtures to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
