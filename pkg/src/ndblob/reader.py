"""Counting random-access byte reader.

Backs the partial-read path for max blobs: callers fetch exactly the
byte runs they need, at arbitrary offsets, and the reader keeps a tally
of how much was actually pulled from the source. Tests and the bench
harness use the counters to prove that subsetting a large array does
not touch the whole payload.

A reader is single-owner: it is not safe to share across threads. Open
one reader per concurrent consumer.
"""

from __future__ import annotations

import io
import os

from .errors import FormatError

__all__ = ["BlockReader"]


class BlockReader:
    """Random-access reads over bytes, a binary file object, or a path.

    `bytes_read` grows by the length of every satisfied read and
    `read_calls` counts the reads; neither is affected by seeking.
    """

    def __init__(self, source):
        self._close = False
        if isinstance(source, (bytes, bytearray, memoryview)):
            self._view = memoryview(source)
            self._file = None
            self._size = len(self._view)
        elif isinstance(source, (str, os.PathLike)):
            self._file = open(source, "rb")
            self._close = True
            self._view = None
            self._size = os.fstat(self._file.fileno()).st_size
        elif isinstance(source, io.IOBase) or hasattr(source, "seek"):
            self._file = source
            self._view = None
            pos = source.tell()
            self._size = source.seek(0, os.SEEK_END)
            source.seek(pos)
        else:
            raise TypeError(f"unsupported reader source: {type(source).__name__}")
        self.bytes_read = 0
        self.read_calls = 0

    @property
    def size(self) -> int:
        return self._size

    def read_at(self, offset: int, n: int) -> bytes:
        """Read exactly `n` bytes starting at `offset`.

        Short sources raise FormatError: a truncated blob must surface
        as a format problem, never as a wrong value.
        """
        if offset < 0 or n < 0:
            raise ValueError("offset and length must be nonnegative")
        if offset + n > self._size:
            raise FormatError(
                f"truncated input: need bytes [{offset}, {offset + n}) "
                f"but source has {self._size}")
        if n == 0:
            return b""
        if self._view is not None:
            data = bytes(self._view[offset:offset + n])
        else:
            self._file.seek(offset)
            data = self._file.read(n)
            while len(data) < n:
                more = self._file.read(n - len(data))
                if not more:
                    raise FormatError(
                        f"truncated input: short read at offset {offset}")
                data += more
        self.read_calls += 1
        self.bytes_read += len(data)
        return data

    def reset_counters(self) -> None:
        self.bytes_read = 0
        self.read_calls = 0

    def close(self) -> None:
        if self._close and self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
