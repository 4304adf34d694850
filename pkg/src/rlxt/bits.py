"""Bit-level primitives: rank/select bitvectors and a small-alphabet wavelet sequence.

All public positions are 1-based. ``rank1(i)`` counts set bits in positions
``1..i``; ``select1(j)`` returns the position of the j-th set bit. Internally
everything is 0-based numpy.
"""

from __future__ import annotations

import numpy as np


class BitVec:
    """Dense bitvector with O(1) rank and O(log n) select.

    The rank directory is a prefix-sum array over the raw bits; select is a
    binary search over the stored positions of set bits.
    """

    __slots__ = ("bits", "_cum", "_ones", "_zeros")

    def __init__(self, bits):
        self.bits = np.asarray(bits, dtype=np.uint8)
        if self.bits.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        self._cum = np.zeros(len(self.bits) + 1, dtype=np.int64)
        np.cumsum(self.bits, out=self._cum[1:])
        self._ones = np.flatnonzero(self.bits).astype(np.int64) + 1
        self._zeros = None  # built lazily; only the wavelet select path needs it

    def __len__(self):
        return len(self.bits)

    @property
    def num_ones(self):
        return len(self._ones)

    def get(self, i):
        if not 1 <= i <= len(self.bits):
            raise IndexError(f"bit position {i} out of range 1..{len(self.bits)}")
        return int(self.bits[i - 1])

    def rank1(self, i):
        if not 0 <= i <= len(self.bits):
            raise IndexError(f"rank prefix {i} out of range 0..{len(self.bits)}")
        return int(self._cum[i])

    def rank0(self, i):
        return i - self.rank1(i)

    def select1(self, j):
        if not 1 <= j <= len(self._ones):
            raise IndexError(f"select1({j}): vector has {len(self._ones)} set bits")
        return int(self._ones[j - 1])

    def select0(self, j):
        if self._zeros is None:
            self._zeros = np.flatnonzero(self.bits == 0).astype(np.int64) + 1
        if not 1 <= j <= len(self._zeros):
            raise IndexError(f"select0({j}): vector has {len(self._zeros)} zero bits")
        return int(self._zeros[j - 1])

    def succ1(self, i):
        """First position >= i holding a 1, or None."""
        if not 1 <= i <= len(self.bits) + 1:
            raise IndexError(f"succ1 position {i} out of range")
        k = np.searchsorted(self._ones, i, side="left")
        if k == len(self._ones):
            return None
        return int(self._ones[k])

    def pred1(self, i):
        """Last position <= i holding a 1, or None."""
        k = np.searchsorted(self._ones, i, side="right")
        if k == 0:
            return None
        return int(self._ones[k - 1])

    def to_bytes(self):
        payload = np.packbits(self.bits).tobytes()
        return len(self.bits).to_bytes(8, "little") + payload

    @classmethod
    def from_bytes(cls, data, offset=0):
        n = int.from_bytes(data[offset : offset + 8], "little")
        nbytes = (n + 7) // 8
        raw = np.frombuffer(data[offset + 8 : offset + 8 + nbytes], dtype=np.uint8)
        bits = np.unpackbits(raw)[:n]
        return cls(bits), offset + 8 + nbytes


class SparseBitVec:
    """Bitvector stored as the sorted positions of its set bits.

    Same rank/select algebra as :class:`BitVec`; space is proportional to the
    number of set bits, which is what the O(r log n) components rely on.
    """

    __slots__ = ("universe", "positions")

    def __init__(self, universe, positions):
        self.universe = int(universe)
        pos = np.asarray(sorted(set(int(p) for p in positions)), dtype=np.int64)
        if len(pos) and (pos[0] < 1 or pos[-1] > self.universe):
            raise ValueError("positions out of universe range")
        self.positions = pos

    def __len__(self):
        return self.universe

    @property
    def num_ones(self):
        return len(self.positions)

    def get(self, i):
        if not 1 <= i <= self.universe:
            raise IndexError(f"bit position {i} out of range 1..{self.universe}")
        k = np.searchsorted(self.positions, i)
        return int(k < len(self.positions) and self.positions[k] == i)

    def contains(self, i):
        k = np.searchsorted(self.positions, i)
        return bool(k < len(self.positions) and self.positions[k] == i)

    def rank1(self, i):
        if not 0 <= i <= self.universe:
            raise IndexError(f"rank prefix {i} out of range 0..{self.universe}")
        return int(np.searchsorted(self.positions, i, side="right"))

    def rank0(self, i):
        return i - self.rank1(i)

    def select1(self, j):
        if not 1 <= j <= len(self.positions):
            raise IndexError(f"select1({j}): vector has {len(self.positions)} set bits")
        return int(self.positions[j - 1])

    def succ1(self, i):
        if not 1 <= i <= self.universe + 1:
            raise IndexError(f"succ1 position {i} out of range")
        k = np.searchsorted(self.positions, i, side="left")
        if k == len(self.positions):
            return None
        return int(self.positions[k])

    def pred1(self, i):
        k = np.searchsorted(self.positions, i, side="right")
        if k == 0:
            return None
        return int(self.positions[k - 1])

    def to_bytes(self):
        out = [self.universe.to_bytes(8, "little"), len(self.positions).to_bytes(8, "little")]
        out.append(np.diff(self.positions, prepend=0).astype(np.int64).tobytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data, offset=0):
        universe = int.from_bytes(data[offset : offset + 8], "little")
        count = int.from_bytes(data[offset + 8 : offset + 16], "little")
        deltas = np.frombuffer(data[offset + 16 : offset + 16 + 8 * count], dtype=np.int64)
        sv = cls.__new__(cls)
        sv.universe = universe
        sv.positions = np.cumsum(deltas).astype(np.int64) if count else np.zeros(0, dtype=np.int64)
        return sv, offset + 16 + 8 * count


class WaveletSeq:
    """Wavelet sequence over a small static alphabet 0..sigma-1.

    Supports access, per-symbol rank/select, and counting all symbols of a
    lexicographic range inside a prefix (three-sided range counting). Built as
    a pointerless wavelet tree: one BitVec per level, nodes partitioned
    stably left-to-right.
    """

    __slots__ = ("sigma", "length", "levels", "level_bits")

    def __init__(self, seq, sigma):
        seq = np.asarray(seq, dtype=np.int64)
        if len(seq) and (seq.min() < 0 or seq.max() >= sigma):
            raise ValueError("symbol out of alphabet range")
        self.sigma = int(sigma)
        self.length = len(seq)
        self.levels = max(1, int(np.ceil(np.log2(self.sigma))) if self.sigma > 1 else 1)
        self.level_bits = []
        nodes = [seq]  # per-node element sequences, left to right
        for lev in range(self.levels):
            shift = self.levels - 1 - lev
            parts = [(part >> shift) & 1 for part in nodes]
            bits = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
            self.level_bits.append(BitVec(bits))
            nxt = []
            for part, b in zip(nodes, parts):
                nxt.append(part[b == 0])
                nxt.append(part[b == 1])
            nodes = nxt

    def __len__(self):
        return self.length

    def access(self, i):
        if not 1 <= i <= self.length:
            raise IndexError(f"access position {i} out of range 1..{self.length}")
        s, e = 0, self.length
        p = i - 1  # offset of the element inside the current node
        sym = 0
        for lev in range(self.levels):
            bv = self.level_bits[lev]
            r0s = bv.rank0(s)
            zeros = bv.rank0(e) - r0s
            b = bv.get(s + p + 1)
            sym = (sym << 1) | b
            if b == 0:
                p = bv.rank0(s + p) - r0s
                s, e = s, s + zeros
            else:
                p = bv.rank1(s + p) - bv.rank1(s)
                s, e = s + zeros, e
        return sym

    def rank(self, c, i):
        """Occurrences of symbol c in the prefix of length i."""
        if not 0 <= c < self.sigma:
            raise IndexError(f"symbol {c} out of alphabet 0..{self.sigma - 1}")
        if not 0 <= i <= self.length:
            raise IndexError(f"rank prefix {i} out of range 0..{self.length}")
        if i == 0:
            return 0
        s, e = 0, self.length
        p = i
        for lev in range(self.levels):
            bv = self.level_bits[lev]
            shift = self.levels - 1 - lev
            b = (c >> shift) & 1
            r0s = bv.rank0(s)
            zeros = bv.rank0(e) - r0s
            zeros_p = bv.rank0(s + p) - r0s
            if b == 0:
                p = zeros_p
                s, e = s, s + zeros
            else:
                p = p - zeros_p
                s, e = s + zeros, e
            if p == 0:
                return 0
        return p

    def select(self, c, j):
        """Position of the j-th occurrence of symbol c (inverse of rank)."""
        if not 0 <= c < self.sigma:
            raise IndexError(f"symbol {c} out of alphabet 0..{self.sigma - 1}")
        if j < 1:
            raise IndexError("select occurrence index must be >= 1")
        path = []
        s, e = 0, self.length
        for lev in range(self.levels):
            bv = self.level_bits[lev]
            shift = self.levels - 1 - lev
            b = (c >> shift) & 1
            zeros = bv.rank0(e) - bv.rank0(s)
            path.append((s, b))
            if b == 0:
                s, e = s, s + zeros
            else:
                s, e = s + zeros, e
        if j > e - s:
            raise IndexError(f"select({c},{j}): only {e - s} occurrences")
        # ascend from the leaf, translating the offset through each level
        o = j - 1
        for lev in range(self.levels - 1, -1, -1):
            s, b = path[lev]
            bv = self.level_bits[lev]
            if b == 0:
                o = bv.select0(bv.rank0(s) + o + 1) - s - 1
            else:
                o = bv.select1(bv.rank1(s) + o + 1) - s - 1
        return o + 1

    def range_rank(self, a, b, i):
        """Count of symbols in the lexicographic range [a, b] within prefix i."""
        if a > b:
            return 0
        if not (0 <= a < self.sigma and 0 <= b < self.sigma):
            raise IndexError("symbol range out of alphabet")
        if not 0 <= i <= self.length:
            raise IndexError(f"rank prefix {i} out of range 0..{self.length}")
        if i == 0:
            return 0
        total = 0
        # stack of (level, node_start, node_end, sym_lo, sym_hi, prefix_count)
        width = 1 << self.levels
        stack = [(0, 0, self.length, 0, width - 1, i)]
        while stack:
            lev, s, e, lo, hi, p = stack.pop()
            if p == 0 or lo > b or hi < a:
                continue
            if a <= lo and hi <= b:
                total += p
                continue
            bv = self.level_bits[lev]
            r0s = bv.rank0(s)
            zeros = bv.rank0(e) - r0s
            zeros_p = bv.rank0(s + p) - r0s
            mid = (lo + hi) // 2
            stack.append((lev + 1, s, s + zeros, lo, mid, zeros_p))
            stack.append((lev + 1, s + zeros, e, mid + 1, hi, p - zeros_p))
        return total

    def to_bytes(self):
        out = [self.sigma.to_bytes(4, "little"), self.length.to_bytes(8, "little")]
        for bv in self.level_bits:
            out.append(bv.to_bytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data, offset=0):
        sigma = int.from_bytes(data[offset : offset + 4], "little")
        length = int.from_bytes(data[offset + 4 : offset + 12], "little")
        ws = cls.__new__(cls)
        ws.sigma = sigma
        ws.length = length
        ws.levels = max(1, int(np.ceil(np.log2(sigma))) if sigma > 1 else 1)
        ws.level_bits = []
        offset += 12
        for _ in range(ws.levels):
            bv, offset = BitVec.from_bytes(data, offset)
            ws.level_bits.append(bv)
        return ws, offset
