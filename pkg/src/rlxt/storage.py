"""Index file format.

Layout: magic ``RLXT1``, version byte, engine byte (0 = run-length index,
1 = sampled baseline), reserved byte, little-endian section table
(count, then 8-byte tag / u64 offset / u64 length per section), payloads.
Files round-trip bit-exactly: serializing a loaded index reproduces the
original bytes.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .baseline import SampledLocate, XbwtNav
from .bits import BitVec, SparseBitVec, WaveletSeq
from .errors import IndexFileError
from .rindex import ColorMarks, IscTables, PhiSamples, RIndex
from .rlxbwt import RlXbwt, SPrimeIndex, reconstruct_trie
from .topology import BpsTopology
from .trie import Alphabet, colex_sort

MAGIC = b"RLXT1"
VERSION = 1
ENGINE_RINDEX = 0
ENGINE_SAMPLED = 1

RINDEX_SECTIONS = ("meta", "topology", "labels", "rlxbwt", "sprime",
                   "colors", "samples", "isc", "runheads")
SAMPLED_SECTIONS = ("meta", "labels", "xbwtflat", "cover")

# the O(r log n)-sized locate machinery, for space accounting
MACHINERY = ("rlxbwt", "sprime", "colors", "samples", "isc", "runheads")


def _w_varint(out, v):
    v = int(v)
    if v < 0:
        raise ValueError("varints are unsigned here")
    while True:
        b = v & 0x7F
        v >>= 7
        if v:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _r_varint(data, off):
    shift = 0
    val = 0
    while True:
        b = data[off]
        off += 1
        val |= (b & 0x7F) << shift
        if not b & 0x80:
            return val, off
        shift += 7


def _w_deltas(out, values):
    prev = 0
    for v in values:
        _w_varint(out, int(v) - prev)
        prev = int(v)


def _r_deltas(data, off, count):
    vals = np.zeros(count, dtype=np.int64)
    prev = 0
    for k in range(count):
        d, off = _r_varint(data, off)
        prev += d
        vals[k] = prev
    return vals, off


# -- per-section encoders ----------------------------------------------------


def _enc_labels(alphabet, n, c_array):
    out = bytearray()
    sigma = alphabet.sigma
    out += struct.pack("<IQ", sigma, n)
    out += bytes(int(b) for b in alphabet.byte_of_code[1:])
    for v in c_array:
        _w_varint(out, v)
    return bytes(out)


def _dec_labels(data):
    sigma, n = struct.unpack_from("<IQ", data, 0)
    off = 12
    byte_of = [0] + list(data[off : off + sigma - 1])
    off += sigma - 1
    c_array = np.zeros(sigma + 1, dtype=np.int64)
    for k in range(sigma + 1):
        c_array[k], off = _r_varint(data, off)
    alphabet = Alphabet.__new__(Alphabet)
    alphabet.byte_of_code = np.asarray(byte_of, dtype=np.int64)
    alphabet.code_of_byte = {int(b): k for k, b in enumerate(byte_of) if k > 0}
    return alphabet, n, c_array


def _enc_rlxbwt(rlx):
    out = bytearray()
    out += struct.pack("<I", rlx.r_prime)
    for add, dele, ln in rlx.triples:
        out += struct.pack("<H", len(add)) + bytes(add)
        out += struct.pack("<H", len(dele)) + bytes(dele)
        _w_varint(out, ln)
    return bytes(out)


def _dec_rlxbwt_triples(data):
    (rp,) = struct.unpack_from("<I", data, 0)
    off = 4
    triples = []
    for _ in range(rp):
        (na,) = struct.unpack_from("<H", data, off)
        off += 2
        add = tuple(data[off : off + na])
        off += na
        (nd,) = struct.unpack_from("<H", data, off)
        off += 2
        dele = tuple(data[off : off + nd])
        off += nd
        ln, off = _r_varint(data, off)
        triples.append((add, dele, ln))
    return triples


def _enc_sprime(spi):
    out = bytearray()
    out += struct.pack("<I", len(spi.partials))
    for v in spi.partials:
        _w_varint(out, v)
    return bytes(out)


def _enc_colors(colors):
    out = bytearray()
    out += struct.pack("<I", colors.red.num_ones)
    _w_deltas(out, colors.red.positions)
    out += struct.pack("<I", colors.blue.num_ones)
    _w_deltas(out, colors.blue.positions)
    return bytes(out)


def _enc_samples(samples):
    out = bytearray()
    out += struct.pack("<I", len(samples.keys))
    _w_deltas(out, samples.keys)
    for v, f in zip(samples.values, samples.flags):
        _w_varint(out, v)
        out.append(int(f))
    return bytes(out)


def _enc_isc(isc):
    out = bytearray()
    out += struct.pack("<Q", len(isc.s))
    zeros = np.flatnonzero(isc.s.bits == 0) + 1
    out += struct.pack("<I", len(zeros))
    _w_deltas(out, zeros)
    out += struct.pack("<I", isc.b1.num_ones)
    _w_deltas(out, isc.b1.positions)
    out += struct.pack("<I", len(isc.starts))
    _w_deltas(out, isc.starts)
    return bytes(out)


def _enc_runheads(rlx):
    out = bytearray()
    out += struct.pack("<H", rlx.sigma - 1)
    for c in range(1, rlx.sigma):
        heads = rlx.run_heads.get(c, [])
        out += struct.pack("<I", len(heads))
        _w_deltas(out, [i for i, _ in heads])
        for _, pre in heads:
            _w_varint(out, pre)
    return bytes(out)


def _build_sprime_wavelet(triples, sigma):
    """S' is fully determined by the triples; rebuild it deterministically."""
    m = sigma - 1
    symbols = []
    for add, dele, _ln in triples:
        symbols.extend(m + c - 1 for c in add)
        symbols.extend(c - 1 for c in dele)
        symbols.append(2 * m)
    return WaveletSeq(symbols, 2 * m + 1 if m else 1)


def machinery_sections(index):
    """Serialized payloads of the locate-machinery components."""
    return {
        "rlxbwt": _enc_rlxbwt(index.rlx),
        "sprime": _enc_sprime(index.spi),
        "colors": _enc_colors(index.colors),
        "samples": _enc_samples(index.samples),
        "isc": _enc_isc(index.isc_tables),
        "runheads": _enc_runheads(index.rlx),
    }


def machinery_bits(index):
    return 8 * sum(len(b) for b in machinery_sections(index).values())


def _pack(engine, sections):
    names = list(sections)
    head = MAGIC + bytes([VERSION, engine, 0])
    table_len = 4 + len(names) * 24
    off = len(head) + table_len
    table = struct.pack("<I", len(names))
    body = b""
    for name in names:
        payload = sections[name]
        tag = name.encode().ljust(8, b"\0")
        table += tag + struct.pack("<QQ", off, len(payload))
        body += payload
        off += len(payload)
    return head + table + body


def _unpack(data):
    if data[:5] != MAGIC:
        raise IndexFileError("bad magic; not an index file")
    if data[5] != VERSION:
        raise IndexFileError(f"unsupported version {data[5]}")
    engine = data[6]
    (count,) = struct.unpack_from("<I", data, 8)
    sections = {}
    off = 12
    for _ in range(count):
        tag = data[off : off + 8].rstrip(b"\0").decode()
        start, length = struct.unpack_from("<QQ", data, off + 8)
        sections[tag] = data[start : start + length]
        off += 24
    return engine, sections


def save_rindex(index, meta=None):
    sections = {
        "meta": json.dumps(meta or {}, sort_keys=True).encode(),
        "topology": index.topo.to_bytes(),
        "labels": _enc_labels(index.alphabet, index.n, index.rlx.c_array),
    }
    sections.update(machinery_sections(index))
    return _pack(ENGINE_RINDEX, {k: sections[k] for k in RINDEX_SECTIONS})


def load_rindex(sections):
    meta = json.loads(sections["meta"].decode() or "{}")
    topo, _ = BpsTopology.from_bytes(sections["topology"])
    alphabet, n, c_array = _dec_labels(sections["labels"])
    triples = _dec_rlxbwt_triples(sections["rlxbwt"])

    starts = []
    s = 1
    for _, _, ln in triples:
        starts.append(s)
        s += ln
    block_starts = SparseBitVec(n, starts)

    data = sections["runheads"]
    (m,) = struct.unpack_from("<H", data, 0)
    off = 2
    run_heads = {}
    for c in range(1, m + 1):
        (cnt,) = struct.unpack_from("<I", data, off)
        off += 4
        cols, off = _r_deltas(data, off, cnt)
        pres = []
        for _ in range(cnt):
            v, off = _r_varint(data, off)
            pres.append(v)
        run_heads[c] = list(zip((int(x) for x in cols), pres))
    rlx = RlXbwt(int(n), alphabet.sigma, triples, block_starts, c_array, run_heads)

    # the permutation is not stored: rebuild the trie from the transform and
    # re-derive pre_to_colex (colex_to_pre is dropped again right away)
    trie = reconstruct_trie(rlx, alphabet.byte_of_code)
    pre_to_colex = colex_sort(trie).pre_to_colex.copy()

    data = sections["sprime"]
    (cnt,) = struct.unpack_from("<I", data, 0)
    off = 4
    partials = np.zeros(cnt, dtype=np.int64)
    for k in range(cnt):
        partials[k], off = _r_varint(data, off)
    spi = SPrimeIndex(alphabet.sigma - 1, _build_sprime_wavelet(triples, alphabet.sigma), partials)

    data = sections["colors"]
    (nred,) = struct.unpack_from("<I", data, 0)
    reds, off = _r_deltas(data, 4, nred)
    (nblue,) = struct.unpack_from("<I", data, off)
    blues, off = _r_deltas(data, off + 4, nblue)
    colors = ColorMarks(topo, [int(x) for x in reds], [int(x) for x in blues])

    data = sections["samples"]
    (cnt,) = struct.unpack_from("<I", data, 0)
    keys, off = _r_deltas(data, 4, cnt)
    mapping = {}
    for k in range(cnt):
        v, off = _r_varint(data, off)
        f = data[off]
        off += 1
        mapping[int(keys[k])] = (v, f)
    samples = PhiSamples(mapping)

    data = sections["isc"]
    (slen,) = struct.unpack_from("<Q", data, 0)
    (nz,) = struct.unpack_from("<I", data, 8)
    zeros, off = _r_deltas(data, 12, nz)
    (nb1,) = struct.unpack_from("<I", data, off)
    b1pos, off = _r_deltas(data, off + 4, nb1)
    (nst,) = struct.unpack_from("<I", data, off)
    sts, off = _r_deltas(data, off + 4, nst)
    s_bits = np.ones(slen, dtype=np.uint8)
    if len(zeros):
        s_bits[zeros - 1] = 0
    isc = IscTables(s_bits, SparseBitVec(int(n), [int(x) for x in b1pos]), sts)

    idx = RIndex(int(n), alphabet, pre_to_colex, topo, rlx, spi, colors, samples, isc)
    return idx, meta


def save_sampled(sl, meta=None):
    nav = sl.nav
    out = bytearray()
    out += struct.pack("<Q", nav.n)
    degs = np.diff(nav.node_end)
    out += bytes(int(d) for d in degs)
    out += bytes(int(c) for c in nav.flat)
    cover = bytearray()
    cover += struct.pack("<I", sl.marked.num_ones)
    _w_deltas(cover, sl.marked.positions)
    for v in sl.samples:
        _w_varint(cover, v)
    for v in np.diff(sl.psums):
        _w_varint(cover, v)
    _w_varint(cover, sl.t)
    sections = {
        "meta": json.dumps(meta or {}, sort_keys=True).encode(),
        "labels": _enc_labels(sl.alphabet, nav.n, nav.c_array),
        "xbwtflat": bytes(out),
        "cover": bytes(cover),
    }
    return _pack(ENGINE_SAMPLED, {k: sections[k] for k in SAMPLED_SECTIONS})


def load_sampled(sections):
    meta = json.loads(sections["meta"].decode() or "{}")
    alphabet, n, c_array = _dec_labels(sections["labels"])
    data = sections["xbwtflat"]
    (n2,) = struct.unpack_from("<Q", data, 0)
    degs = np.frombuffer(data[8 : 8 + n2], dtype=np.uint8).astype(np.int64)
    node_end = np.zeros(n2 + 1, dtype=np.int64)
    np.cumsum(degs, out=node_end[1:])
    total = int(node_end[-1])
    flat = np.frombuffer(data[8 + n2 : 8 + n2 + total], dtype=np.uint8).astype(np.int64)
    nav = XbwtNav(int(n2), alphabet.sigma, WaveletSeq(flat, alphabet.sigma), flat, node_end, c_array)
    data = sections["cover"]
    (cnt,) = struct.unpack_from("<I", data, 0)
    marked_pos, off = _r_deltas(data, 4, cnt)
    samples = np.zeros(cnt, dtype=np.int64)
    for k in range(cnt):
        samples[k], off = _r_varint(data, off)
    sizes = np.zeros(cnt, dtype=np.int64)
    for k in range(cnt):
        sizes[k], off = _r_varint(data, off)
    t, off = _r_varint(data, off)
    psums = np.zeros(cnt + 1, dtype=np.int64)
    np.cumsum(sizes, out=psums[1:])
    marked = SparseBitVec(int(n2), [int(x) for x in marked_pos])
    sl = SampledLocate(nav, marked, samples, psums, alphabet, int(t))
    return sl, meta


def save(obj, path, meta=None):
    if isinstance(obj, RIndex):
        blob = save_rindex(obj, meta)
    elif isinstance(obj, SampledLocate):
        blob = save_sampled(obj, meta)
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")
    with open(path, "wb") as fh:
        fh.write(blob)
    return len(blob)


def load_bytes(data):
    engine, sections = _unpack(data)
    if engine == ENGINE_RINDEX:
        obj, meta = load_rindex(sections)
    elif engine == ENGINE_SAMPLED:
        obj, meta = load_sampled(sections)
    else:
        raise IndexFileError(f"unknown engine {engine}")
    return engine, obj, meta, sections


def load(path):
    with open(path, "rb") as fh:
        return load_bytes(fh.read())
