"""Bit-level building blocks: rank/select bitmaps and unary-coded sums.

Everything here is immutable once built and uses 1-based positions in its
public API.  Bits live in little-endian uint64 words, least significant bit
first, so word w holds positions 64*w+1 .. 64*w+64.  Serialized forms are
length-prefixed frames (u32 payload length, then a u8 format version) so
containers can skip over components they do not care about.
"""

from __future__ import annotations

import struct

import numpy as np

_WORD_FULL = (1 << 64) - 1
_SUPER = 8  # words per superblock, i.e. 512-bit superblocks
_POP8 = bytes(bin(i).count("1") for i in range(256))


def write_frame(payload: bytes) -> bytes:
    return struct.pack("<I", len(payload)) + payload


def read_frame(buf, offset: int) -> tuple[memoryview, int]:
    """Return (payload view, offset past the frame)."""
    if offset + 4 > len(buf):
        raise ValueError("truncated frame header")
    (length,) = struct.unpack_from("<I", buf, offset)
    end = offset + 4 + length
    if end > len(buf):
        raise ValueError("truncated frame payload")
    return memoryview(buf)[offset + 4 : end], end


def _select_in_word(word: int, k: int) -> int:
    # position (1..64) of the k-th set bit; caller guarantees it exists
    for byte_i in range(8):
        b = (word >> (8 * byte_i)) & 0xFF
        c = _POP8[b]
        if k <= c:
            bit = 0
            while True:
                if (b >> bit) & 1:
                    k -= 1
                    if k == 0:
                        return 8 * byte_i + bit + 1
                bit += 1
        k -= c
    raise AssertionError("bit not found")


class BitVector:
    """Plain bitmap with constant-time rank and near-constant select.

    Rank uses a two-level directory: cumulative counts per 512-bit
    superblock plus a 16-bit in-superblock count per word, finished with a
    popcount of the masked word.  Select binary-searches the superblock
    counts, then scans at most eight words.  Both ones and zeros are
    indexed so select works on either bit value.
    """

    def __init__(self, words: np.ndarray, n: int):
        if n < 0 or len(words) != (n + 63) // 64:
            raise ValueError("word count does not match bit length")
        self._words = words
        self._n = n
        nw = len(words)
        self._last_mask = _WORD_FULL
        if nw and n % 64:
            self._last_mask = (1 << (n % 64)) - 1
        pc = np.bitwise_count(words).astype(np.int64)
        csum = np.zeros(nw + 1, dtype=np.int64)
        np.cumsum(pc, out=csum[1:])
        self._total = int(csum[-1])
        nsuper = (nw + _SUPER - 1) // _SUPER
        ends = np.minimum(np.arange(1, nsuper + 1) * _SUPER, nw)
        self._super1_start = csum[: nw : _SUPER].copy() if nw else csum[:0]
        self._super1_end = csum[ends] if nw else csum[:0]
        self._block1 = (csum[:nw] - np.repeat(self._super1_start, _SUPER)[:nw]).astype(np.uint16)
        # zero-side directory; padding bits in the last word are not counted
        zpc = 64 - pc
        if nw:
            zpc[-1] = (n - 64 * (nw - 1)) - pc[-1]
        zcsum = np.zeros(nw + 1, dtype=np.int64)
        np.cumsum(zpc, out=zcsum[1:])
        self._super0_start = zcsum[: nw : _SUPER].copy() if nw else zcsum[:0]
        self._super0_end = zcsum[ends] if nw else zcsum[:0]
        self._block0 = (zcsum[:nw] - np.repeat(self._super0_start, _SUPER)[:nw]).astype(np.uint16)

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        arr = np.asarray(bits, dtype=np.uint8)
        n = len(arr)
        packed = np.packbits(arr, bitorder="little")
        pad = (-len(packed)) % 8
        if pad:
            packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
        return cls(packed.view("<u8"), n)

    @classmethod
    def from_set_positions(cls, n: int, positions) -> "BitVector":
        """Build from 1-based positions of the set bits."""
        pos = np.asarray(positions, dtype=np.int64)
        if len(pos) and (pos.min() < 1 or pos.max() > n):
            raise ValueError("position out of range")
        bits = np.zeros(n, dtype=np.uint8)
        bits[pos - 1] = 1
        return cls.from_bits(bits)

    def __len__(self) -> int:
        return self._n

    @property
    def count_ones(self) -> int:
        return self._total

    @property
    def count_zeros(self) -> int:
        return self._n - self._total

    def access(self, i: int) -> int:
        if not 1 <= i <= self._n:
            raise IndexError(f"bit index {i} out of range 1..{self._n}")
        return (int(self._words[(i - 1) >> 6]) >> ((i - 1) & 63)) & 1

    def rank1(self, i: int) -> int:
        """Number of set bits among positions 1..i (i may be 0)."""
        if not 0 <= i <= self._n:
            raise IndexError(f"rank index {i} out of range 0..{self._n}")
        if i == 0:
            return 0
        w, r = divmod(i, 64)
        if w == len(self._words):
            return self._total
        base = int(self._super1_start[w >> 3]) + int(self._block1[w])
        if r:
            base += (int(self._words[w]) & ((1 << r) - 1)).bit_count()
        return base

    def rank0(self, i: int) -> int:
        if not 0 <= i <= self._n:
            raise IndexError(f"rank index {i} out of range 0..{self._n}")
        return i - self.rank1(i)

    def select1(self, j: int) -> int:
        """Position of the j-th set bit, 1-based."""
        if not 1 <= j <= self._total:
            raise ValueError(f"select1({j}) out of range, only {self._total} ones")
        sb = int(np.searchsorted(self._super1_end, j, side="left"))
        rem = j - int(self._super1_start[sb])
        base = sb * _SUPER
        end = min(base + _SUPER, len(self._words))
        w = base
        while w + 1 < end and int(self._block1[w + 1]) < rem:
            w += 1
        rem -= int(self._block1[w])
        return 64 * w + _select_in_word(int(self._words[w]), rem)

    def select0(self, j: int) -> int:
        """Position of the j-th unset bit, 1-based."""
        total0 = self._n - self._total
        if not 1 <= j <= total0:
            raise ValueError(f"select0({j}) out of range, only {total0} zeros")
        sb = int(np.searchsorted(self._super0_end, j, side="left"))
        rem = j - int(self._super0_start[sb])
        base = sb * _SUPER
        end = min(base + _SUPER, len(self._words))
        w = base
        while w + 1 < end and int(self._block0[w + 1]) < rem:
            w += 1
        rem -= int(self._block0[w])
        mask = self._last_mask if w == len(self._words) - 1 else _WORD_FULL
        return 64 * w + _select_in_word(~int(self._words[w]) & mask, rem)

    def ones(self, start: int = 1):
        """Yield positions of set bits, beginning with the start-th one."""
        if start < 1:
            raise ValueError("start must be >= 1")
        if start > self._total:
            return
        p = self.select1(start)
        w = (p - 1) >> 6
        cur = int(self._words[w]) >> ((p - 1) & 63) >> 1
        yield p
        base = p
        nw = len(self._words)
        while True:
            while cur:
                low = cur & -cur
                yield base + low.bit_length()
                cur ^= low
            # bits past the first are offsets from base; move to next word
            w += 1
            if w >= nw:
                return
            cur = int(self._words[w])
            base = 64 * w

    def zeros(self, start: int = 1):
        """Yield positions of unset bits, beginning with the start-th zero."""
        if start < 1:
            raise ValueError("start must be >= 1")
        if start > self._n - self._total:
            return
        p = self.select0(start)
        w = (p - 1) >> 6
        nw = len(self._words)
        mask = self._last_mask if w == nw - 1 else _WORD_FULL
        cur = (~int(self._words[w]) & mask) >> ((p - 1) & 63) >> 1
        yield p
        base = p
        while True:
            while cur:
                low = cur & -cur
                yield base + low.bit_length()
                cur ^= low
            w += 1
            if w >= nw:
                return
            mask = self._last_mask if w == nw - 1 else _WORD_FULL
            cur = ~int(self._words[w]) & mask
            base = 64 * w

    def code_bits(self) -> int:
        """Bits of the payload itself, directories excluded."""
        return self._n

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BQ", 1, self._n) + self._words.astype("<u8").tobytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int = 0) -> tuple["BitVector", int]:
        payload, end = read_frame(buf, offset)
        version, n = struct.unpack_from("<BQ", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported bitmap version {version}")
        words = np.frombuffer(payload, dtype="<u8", offset=9).copy()
        return cls(words, n), end


class PackedIntArray:
    """Fixed-width unsigned integers packed back to back into uint64 words."""

    def __init__(self, words: np.ndarray, count: int, width: int):
        if not 0 <= width <= 64:
            raise ValueError("width must be in 0..64")
        need = (count * width + 63) // 64
        if len(words) != need:
            raise ValueError("word count does not match")
        self._words = words
        self._count = count
        self._width = width

    @classmethod
    def from_values(cls, values, width: int) -> "PackedIntArray":
        vals = np.asarray(values, dtype=np.uint64)
        count = len(vals)
        if width == 0 or count == 0:
            if count and vals.max() > 0:
                raise ValueError("nonzero value with zero width")
            return cls(np.zeros(0, dtype="<u8"), count, width)
        if width < 64 and vals.max() >> width:
            raise ValueError(f"value does not fit in {width} bits")
        bits = (vals[:, None] >> np.arange(width, dtype=np.uint64)) & np.uint64(1)
        packed = np.packbits(bits.astype(np.uint8).ravel(), bitorder="little")
        pad = (-len(packed)) % 8
        if pad:
            packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
        return cls(packed.view("<u8"), count, width)

    def __len__(self) -> int:
        return self._count

    @property
    def width(self) -> int:
        return self._width

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._count:
            raise IndexError(f"index {i} out of range 0..{self._count - 1}")
        if self._width == 0:
            return 0
        s = i * self._width
        w, off = s >> 6, s & 63
        v = int(self._words[w]) >> off
        if off + self._width > 64:
            v |= int(self._words[w + 1]) << (64 - off)
        return v & ((1 << self._width) - 1)

    def __iter__(self):
        for i in range(self._count):
            yield self[i]

    def code_bits(self) -> int:
        return self._count * self._width

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BQB", 1, self._count, self._width)
        payload += self._words.astype("<u8").tobytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int = 0) -> tuple["PackedIntArray", int]:
        payload, end = read_frame(buf, offset)
        version, count, width = struct.unpack_from("<BQB", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported packed array version {version}")
        words = np.frombuffer(payload, dtype="<u8", offset=10).copy()
        return cls(words, count, width), end


class SparseBitVector:
    """Monotone set of m positions over [1, n], split into high and low halves.

    The low floor(log2(n/m)) bits of each (position - 1) go into a packed
    array; the high halves become a unary-coded bitmap where the j-th one
    sits at position high_j + j.  select1 is a single select on the high
    bitmap, rank1 is a select0 plus a short binary search inside one high
    bucket, so it costs O(log(n/m)).
    """

    def __init__(self, n: int, low_width: int, lows: PackedIntArray, high: BitVector):
        self._n = n
        self._m = len(lows)
        self._low_width = low_width
        self._lows = lows
        self._high = high

    @classmethod
    def from_positions(cls, n: int, positions) -> "SparseBitVector":
        pos = np.asarray(positions, dtype=np.int64)
        m = len(pos)
        if m:
            if pos[0] < 1 or pos[-1] > n:
                raise ValueError("positions out of range")
            if np.any(np.diff(pos) <= 0):
                raise ValueError("positions must be strictly increasing")
        if m == 0:
            return cls(n, 0, PackedIntArray.from_values([], 0), BitVector.from_bits([]))
        low_width = max(0, (n // m).bit_length() - 1)
        v = pos - 1
        highs = v >> low_width
        lows = PackedIntArray.from_values(v & ((1 << low_width) - 1), low_width)
        # one zero per high bucket 0..max_bucket so every bucket boundary
        # is addressable with select0
        max_bucket = (n - 1) >> low_width
        length = m + max_bucket + 1
        high = BitVector.from_set_positions(length, highs + np.arange(1, m + 1))
        return cls(n, low_width, lows, high)

    def __len__(self) -> int:
        return self._n

    @property
    def count_ones(self) -> int:
        return self._m

    def select1(self, j: int) -> int:
        if not 1 <= j <= self._m:
            raise ValueError(f"select1({j}) out of range, only {self._m} ones")
        h = self._high.select1(j) - j
        return ((h << self._low_width) | self._lows[j - 1]) + 1

    def _bucket_bounds(self, h: int) -> tuple[int, int]:
        # members with high half < h, and <= h
        lo = self._high.select0(h) - h if h else 0
        hi = self._high.select0(h + 1) - (h + 1)
        return lo, hi

    def rank1(self, i: int) -> int:
        if not 0 <= i <= self._n:
            raise IndexError(f"rank index {i} out of range 0..{self._n}")
        if i == 0 or self._m == 0:
            return 0
        v = i - 1
        h = v >> self._low_width
        lowv = v & ((1 << self._low_width) - 1)
        lo, hi = self._bucket_bounds(h)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._lows[mid] <= lowv:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def access(self, i: int) -> int:
        if not 1 <= i <= self._n:
            raise IndexError(f"bit index {i} out of range 1..{self._n}")
        return self.rank1(i) - self.rank1(i - 1)

    def select0(self, j: int) -> int:
        """Position of the j-th absent value, 1-based."""
        total0 = self._n - self._m
        if not 1 <= j <= total0:
            raise ValueError(f"select0({j}) out of range, only {total0} zeros")
        # largest c with select1(c) - c < j, then j zeros fit before one c+1
        lo, hi = 0, self._m
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.select1(mid) - mid < j:
                lo = mid
            else:
                hi = mid - 1
        return j + lo

    def ones(self, start: int = 1):
        """Yield member positions in order, beginning with the start-th."""
        if start < 1:
            raise ValueError("start must be >= 1")
        j = start
        w = self._low_width
        for p in self._high.ones(start):
            yield (((p - j) << w) | self._lows[j - 1]) + 1
            j += 1

    def zeros(self, start: int = 1):
        """Yield non-member positions in order, beginning with the start-th."""
        if start < 1:
            raise ValueError("start must be >= 1")
        if start > self._n - self._m:
            return
        pos = self.select0(start)
        seen = pos - start
        it = self.ones(seen + 1) if seen < self._m else iter(())
        nxt = next(it, 0)
        yield pos
        pos += 1
        while pos <= self._n:
            while nxt and nxt == pos:
                nxt = next(it, 0)
                pos += 1
            if pos > self._n:
                return
            yield pos
            pos += 1

    def code_bits(self) -> int:
        return len(self._high) + self._lows.code_bits()

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BQB", 1, self._n, self._low_width)
        payload += self._lows.to_bytes()
        payload += self._high.to_bytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int = 0) -> tuple["SparseBitVector", int]:
        payload, end = read_frame(buf, offset)
        version, n, low_width = struct.unpack_from("<BQB", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported sparse bitmap version {version}")
        lows, off = PackedIntArray.from_buffer(payload, 10)
        high, _ = BitVector.from_buffer(payload, off)
        return cls(n, low_width, lows, high), end


class UnaryDeltaStream:
    """Sequence of non-negative integers coded as runs of zeros ended by ones.

    The i-th one lands at position (d_1 + .. + d_i) + i, so the prefix sum
    of the first i values is select1(i) - i.  Zero values are legal and cost
    a single one bit.
    """

    def __init__(self, members: SparseBitVector, count: int):
        self._members = members
        self._count = count

    @classmethod
    def from_values(cls, values) -> "UnaryDeltaStream":
        vals = np.asarray(values, dtype=np.int64)
        count = len(vals)
        if count and vals.min() < 0:
            raise ValueError("values must be non-negative")
        prefix = np.cumsum(vals, dtype=np.int64)
        positions = prefix + np.arange(1, count + 1)
        universe = int(positions[-1]) if count else 0
        return cls(SparseBitVector.from_positions(universe, positions), count)

    def __len__(self) -> int:
        return self._count

    @property
    def total(self) -> int:
        return self.prefix_sum(self._count)

    def prefix_sum(self, i: int) -> int:
        """Sum of the first i values; i ranges over 0..count."""
        if not 0 <= i <= self._count:
            raise IndexError(f"prefix index {i} out of range 0..{self._count}")
        if i == 0:
            return 0
        return self._members.select1(i) - i

    def value_at(self, i: int) -> int:
        return self.prefix_sum(i) - self.prefix_sum(i - 1)

    def prefix_iter(self, start: int = 0):
        """Yield prefix_sum(start+1), prefix_sum(start+2), ... cheaply."""
        if not 0 <= start <= self._count:
            raise IndexError(f"prefix index {start} out of range 0..{self._count}")
        j = start
        for p in self._members.ones(start + 1):
            j += 1
            yield p - j

    def code_bits(self) -> int:
        return self._members.code_bits()

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BQ", 1, self._count) + self._members.to_bytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int = 0) -> tuple["UnaryDeltaStream", int]:
        payload, end = read_frame(buf, offset)
        version, count = struct.unpack_from("<BQ", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported delta stream version {version}")
        members, _ = SparseBitVector.from_buffer(payload, 9)
        return cls(members, count), end
