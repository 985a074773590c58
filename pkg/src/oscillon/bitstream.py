"""Infinite bit sources, their complements, and coefficient substreams.

Bits are addressed by position and read most-significant-bit first within
each byte.  A source never changes after construction; internal block
caches only memoise pure functions of the position.
"""

from __future__ import annotations

import hashlib
import os
from abc import ABC, abstractmethod

__all__ = [
    "BitSource",
    "CsprngSource",
    "FileSource",
    "ComplementSource",
    "Substream",
    "IndexBeyondFile",
    "bit",
    "cantor_pair",
    "complement_view",
    "coefficient_substream",
]

_BLOCK_BITS = 512  # one blake2b-512 digest
_CACHE_LIMIT = 1 << 14


class IndexBeyondFile(IndexError):
    """A non-cyclic file source was asked for a bit past its end."""


class BitSource(ABC):
    @abstractmethod
    def bit(self, i: int) -> int:
        ...

    def read(self, positions) -> int:
        """Bits at ``positions`` packed into an integer, first one most significant."""
        acc = 0
        for i in positions:
            acc = (acc << 1) | self.bit(i)
        return acc

    def read_substream(self, c: int, start: int, count: int) -> int:
        """Bits ``<c, start>``, ..., ``<c, start+count-1>`` packed like ``read``."""
        return self.read(cantor_pair(c, k) for k in range(start, start + count))

    def prefix(self, n: int) -> int:
        """First ``n`` bits as an integer, first bit most significant."""
        acc = 0
        for i in range(n):
            acc = (acc << 1) | self.bit(i)
        return acc

    def complement(self) -> "BitSource":
        return ComplementSource(self)


class CsprngSource(BitSource):
    """Keyed blake2b in counter mode; bit i lives in block ``i // 512``."""

    def __init__(self, seed: bytes):
        if not isinstance(seed, (bytes, bytearray)) or len(seed) != 32:
            raise ValueError("csprng seed must be exactly 32 bytes")
        self.seed = bytes(seed)
        self._blocks: dict[int, bytes] = {}

    @classmethod
    def from_hex(cls, text: str) -> "CsprngSource":
        text = text.strip()
        if len(text) != 64:
            raise ValueError("hex seed must be exactly 64 hex characters")
        return cls(bytes.fromhex(text))

    @classmethod
    def from_int(cls, n: int) -> "CsprngSource":
        return cls(n.to_bytes(32, "big"))

    def _block(self, b: int) -> bytes:
        blk = self._blocks.get(b)
        if blk is None:
            blk = hashlib.blake2b(b.to_bytes(32, "little"), key=self.seed).digest()
            if len(self._blocks) >= _CACHE_LIMIT:
                self._blocks.clear()
            self._blocks[b] = blk
        return blk

    def bit(self, i: int) -> int:
        if i < 0:
            raise IndexError("bit index must be non-negative")
        r = i & (_BLOCK_BITS - 1)
        return (self._block(i >> 9)[r >> 3] >> (7 - (r & 7))) & 1

    def read(self, positions) -> int:
        blocks = self._blocks
        acc = 0
        for i in positions:
            b = i >> 9
            blk = blocks.get(b)
            if blk is None:
                blk = self._block(b)
            r = i & 511
            acc = (acc << 1) | ((blk[r >> 3] >> (7 - (r & 7))) & 1)
        return acc

    def read_substream(self, c: int, start: int, count: int) -> int:
        blocks = self._blocks
        s = c + start
        pos = s * (s + 1) // 2 + start
        acc = 0
        for _ in range(count):
            b = pos >> 9
            blk = blocks.get(b)
            if blk is None:
                blk = self._block(b)
            r = pos & 511
            acc = (acc << 1) | ((blk[r >> 3] >> (7 - (r & 7))) & 1)
            # <c, k+1> - <c, k> = c + k + 2
            s += 1
            pos += s + 1
        return acc

    def __getstate__(self):
        return {"seed": self.seed}

    def __setstate__(self, state):
        self.seed = state["seed"]
        self._blocks = {}

    def __eq__(self, other):
        return isinstance(other, CsprngSource) and other.seed == self.seed

    def __hash__(self):
        return hash(("csprng", self.seed))

    def __repr__(self):
        return f"CsprngSource({self.seed.hex()})"


class FileSource(BitSource):
    """Raw bytes of a file; hard error on exhaustion unless ``cyclic``."""

    def __init__(self, data: bytes, cyclic: bool = False, path: str | None = None):
        if not data:
            raise ValueError("file source needs at least one byte")
        self.data = bytes(data)
        self.cyclic = cyclic
        self.path = path

    @classmethod
    def open(cls, path: str | os.PathLike, cyclic: bool = False) -> "FileSource":
        with open(path, "rb") as fh:
            return cls(fh.read(), cyclic=cyclic, path=os.fspath(path))

    def bit(self, i: int) -> int:
        if i < 0:
            raise IndexError("bit index must be non-negative")
        n = len(self.data) * 8
        if i >= n:
            if not self.cyclic:
                raise IndexBeyondFile(
                    f"bit {i} requested from a {n}-bit file source; "
                    "lower the precision demand or supply more bits")
            i %= n
        return (self.data[i >> 3] >> (7 - (i & 7))) & 1

    def __eq__(self, other):
        return (isinstance(other, FileSource) and other.data == self.data
                and other.cyclic == self.cyclic)

    def __hash__(self):
        return hash(("file", self.data, self.cyclic))


class ComplementSource(BitSource):
    """Bitwise complement of another source."""

    def __init__(self, base: BitSource):
        self.base = base

    def bit(self, i: int) -> int:
        return 1 - self.base.bit(i)

    def complement(self) -> BitSource:
        return self.base

    def __eq__(self, other):
        return isinstance(other, ComplementSource) and other.base == self.base

    def __hash__(self):
        return hash(("complement", self.base))


def cantor_pair(c: int, k: int) -> int:
    s = c + k
    return s * (s + 1) // 2 + k


class Substream(BitSource):
    """Bits ``src.bit(<c, k>)`` for k = 0, 1, ... under Cantor pairing."""

    def __init__(self, source: BitSource, c: int):
        if c < 0:
            raise ValueError("coefficient index must be non-negative")
        self.source = source
        self.c = c

    def position(self, k: int) -> int:
        return cantor_pair(self.c, k)

    def bit(self, k: int) -> int:
        return self.source.bit(cantor_pair(self.c, k))

    def complement(self) -> BitSource:
        return Substream(self.source.complement(), self.c)


def bit(src: BitSource, i: int) -> int:
    return src.bit(i)


def complement_view(src: BitSource) -> BitSource:
    return src.complement()


def coefficient_substream(src: BitSource, c: int) -> Substream:
    return Substream(src, c)
