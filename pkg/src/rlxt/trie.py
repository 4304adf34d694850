"""In-memory trie model, construction, co-lexicographic sorting, and oracles.

Nodes are identified by their pre-order number 1..n (node 1 is the root).
Edge labels are dense integer codes: code 0 is the reserved root sentinel
(never labels an edge), codes 1..sigma-1 map to the distinct input bytes in
increasing byte order. The mapping is kept in :class:`Alphabet`.

The brute-force helpers here (``oracle_locate``, reversed-path sorting) are
the ground truth everything else is tested against.
"""

from __future__ import annotations

import numpy as np

from .errors import DeterminismError, FormatError, PreorderError

SENTINEL = 0  # incoming label of the root; smaller than every edge label


class Alphabet:
    """Dense byte <-> label-code mapping. Code 0 is the root sentinel."""

    __slots__ = ("byte_of_code", "code_of_byte")

    def __init__(self, used_bytes):
        used = sorted(set(int(b) for b in used_bytes))
        if any(b == 0 for b in used):
            raise FormatError("NUL byte is reserved and may not appear in input")
        if any(not 0 < b < 256 for b in used):
            raise FormatError("labels must be byte values 1..255")
        self.byte_of_code = np.array([0] + used, dtype=np.int64)
        self.code_of_byte = {b: i + 1 for i, b in enumerate(used)}

    @property
    def sigma(self):
        """Alphabet size including the sentinel code 0."""
        return len(self.byte_of_code)

    def encode(self, data):
        """Map a byte string to label codes, or None if some byte is unmapped."""
        codes = []
        for b in bytes(data):
            c = self.code_of_byte.get(b)
            if c is None:
                return None
            codes.append(c)
        return codes

    def decode(self, codes):
        return bytes(int(self.byte_of_code[c]) for c in codes)


class LabeledTrie:
    """Edge-labeled trie in pre-order form.

    Arrays are 1-based (index 0 unused). ``parent[1] == 0`` and
    ``label[1] == SENTINEL``. Children of each node are stored contiguously
    in ``child_ids`` sorted by label, which by the pre-order invariant is
    also ascending id order.
    """

    __slots__ = (
        "n", "parent", "label", "child_start", "child_ids", "alphabet",
        "depth", "_iso_sig", "_path_bytes",
    )

    def __init__(self, parent, label, alphabet):
        self.parent = np.asarray(parent, dtype=np.int64)
        self.label = np.asarray(label, dtype=np.int64)
        self.n = len(self.parent) - 1
        self.alphabet = alphabet
        if self.n < 1:
            raise FormatError("trie must contain at least the root")
        self._build_children()
        self._validate()
        d = np.zeros(self.n + 1, dtype=np.int64)
        for u in range(2, self.n + 1):
            d[u] = d[self.parent[u]] + 1
        self.depth = d
        self._iso_sig = None
        self._path_bytes = None

    def _build_children(self):
        counts = np.zeros(self.n + 2, dtype=np.int64)
        for u in range(2, self.n + 1):
            counts[self.parent[u] + 1] += 1
        self.child_start = np.cumsum(counts)
        fill = self.child_start[:-1].copy()
        self.child_ids = np.zeros(self.n - 1, dtype=np.int64)
        for u in range(2, self.n + 1):
            p = self.parent[u]
            self.child_ids[fill[p]] = u
            fill[p] += 1

    def _validate(self):
        if self.label[1] != SENTINEL:
            raise FormatError("root must carry the sentinel label")
        stack = [1]
        for u in range(2, self.n + 1):
            p = self.parent[u]
            if not 1 <= p < u:
                raise PreorderError(f"node {u} has parent {p} >= itself")
            while stack and stack[-1] != p:
                stack.pop()
            if not stack:
                raise PreorderError(f"node {u}: parent {p} not on the current DFS path")
            stack.append(u)
            if self.label[u] == SENTINEL:
                raise FormatError(f"node {u}: sentinel label on an edge")
        for u in range(1, self.n + 1):
            labs = self.out_labels(u)
            if len(labs) > 1:
                diffs = np.diff(labs)
                if (diffs == 0).any():
                    raise DeterminismError(f"node {u} has duplicate outgoing labels")
                if (diffs < 0).any():
                    raise PreorderError(f"node {u}: children not in label order")

    def children(self, u):
        return self.child_ids[self.child_start[u] : self.child_start[u + 1]]

    def out_labels(self, u):
        """Labels of u's outgoing edges, sorted ascending."""
        return self.label[self.children(u)]

    def degree(self, u):
        return int(self.child_start[u + 1] - self.child_start[u])

    def child_by_label(self, u, c):
        """Child of u along label c, or 0 if absent."""
        kids = self.children(u)
        labs = self.label[kids]
        k = np.searchsorted(labs, c)
        if k < len(kids) and labs[k] == c:
            return int(kids[k])
        return 0

    def path_codes(self, u):
        """Label codes on the root-to-u path (excluding the sentinel)."""
        out = []
        while u != 1:
            out.append(int(self.label[u]))
            u = int(self.parent[u])
        out.reverse()
        return out

    def path_byte_strings(self):
        """Root-to-node path as a byte string for every node (index 0 unused)."""
        if self._path_bytes is None:
            byte_of = self.alphabet.byte_of_code
            paths = [None, b""]
            for u in range(2, self.n + 1):
                paths.append(paths[self.parent[u]] + bytes([int(byte_of[self.label[u]])]))
            self._path_bytes = paths
        return self._path_bytes

    def subtree_sizes(self):
        size = np.ones(self.n + 1, dtype=np.int64)
        size[0] = 0
        for u in range(self.n, 1, -1):
            size[self.parent[u]] += size[u]
        return size

    def iso_signatures(self):
        """Canonical id per node: equal ids iff complete subtrees are isomorphic.

        Bottom-up interning of (label, child-signature) tuples; exact because
        the intern table is keyed on the tuples themselves.
        """
        if self._iso_sig is None:
            sig = np.zeros(self.n + 1, dtype=np.int64)
            intern = {}
            for u in range(self.n, 0, -1):
                kids = self.children(u)
                key = tuple((int(self.label[k]), int(sig[k])) for k in kids)
                code = intern.get(key)
                if code is None:
                    code = len(intern)
                    intern[key] = code
                sig[u] = code
            self._iso_sig = sig
        return self._iso_sig

    def to_edge_lines(self):
        """Format B serialization: first line n, then parent<TAB>label_byte."""
        byte_of = self.alphabet.byte_of_code
        lines = [str(self.n)]
        for u in range(2, self.n + 1):
            lines.append(f"{int(self.parent[u])}\t{int(byte_of[self.label[u]])}")
        return "\n".join(lines) + "\n"


def build_from_strings(lines):
    """Trie of all prefixes of the given byte strings (deduplicated).

    Empty input yields the single-node trie. A NUL byte anywhere is a
    format error (byte 0 is the reserved sentinel).
    """
    used = set()
    for line in lines:
        if 0 in line:
            raise FormatError("input contains NUL byte")
        used.update(line)
    alphabet = Alphabet(used)
    root = {}
    for line in lines:
        cur = root
        for b in line:
            cur = cur.setdefault(alphabet.code_of_byte[b], {})
    parent = [0, 0]
    label = [0, SENTINEL]
    stack = [(1, c, root[c]) for c in sorted(root, reverse=True)]
    while stack:
        pid, c, node = stack.pop()
        uid = len(parent)
        parent.append(pid)
        label.append(c)
        for cc in sorted(node, reverse=True):
            stack.append((uid, cc, node[cc]))
    return LabeledTrie(parent, label, alphabet)


def build_from_edges(n, edges):
    """Trie from an explicit pre-order edge list.

    ``edges[k] = (parent_id, label_byte)`` defines node ``k + 2``. Labels are
    raw byte values and get remapped to dense codes.
    """
    if n < 1:
        raise FormatError("node count must be >= 1")
    if len(edges) != n - 1:
        raise FormatError(f"expected {n - 1} edges for {n} nodes, got {len(edges)}")
    raw_labels = [b for _, b in edges]
    alphabet = Alphabet(raw_labels)
    parent = [0, 0]
    label = [0, SENTINEL]
    for p, b in edges:
        parent.append(int(p))
        label.append(alphabet.code_of_byte[int(b)])
    return LabeledTrie(parent, label, alphabet)


def parse_strings_file(data: bytes):
    """Format A: LF-terminated byte lines; the trie is their prefix closure."""
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    return build_from_strings(lines)


def parse_edges_file(data: bytes):
    """Format B: first line n, then n-1 lines ``parent<TAB>label_byte_decimal``."""
    text = data.decode("ascii", errors="strict")
    rows = [ln for ln in text.split("\n") if ln]
    if not rows:
        raise FormatError("empty edge file")
    try:
        n = int(rows[0])
        edges = []
        for ln in rows[1:]:
            p, b = ln.split("\t")
            edges.append((int(p), int(b)))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed edge file: {exc}") from None
    return build_from_edges(n, edges)


class ColexOrder:
    """Bidirectional permutation between pre-order ids and co-lex ranks."""

    __slots__ = ("colex_to_pre", "pre_to_colex")

    def __init__(self, colex_to_pre):
        self.colex_to_pre = np.asarray(colex_to_pre, dtype=np.int64)
        n = len(self.colex_to_pre) - 1
        inv = np.zeros(n + 1, dtype=np.int64)
        inv[self.colex_to_pre[1:]] = np.arange(1, n + 1)
        self.pre_to_colex = inv

    @property
    def n(self):
        return len(self.colex_to_pre) - 1


def colex_sort(trie):
    """Co-lexicographic node order via iterative bucket refinement.

    Buckets start as incoming labels and are refined by the parent's bucket
    until stable; this mirrors the two sorting axioms directly. At most
    depth+1 rounds are needed.
    """
    n = trie.n
    par = trie.parent.copy()
    par[1] = 1  # root chains to itself so its key stays minimal
    rank = trie.label.astype(np.int64).copy()
    for _ in range(int(trie.depth.max()) + 2):
        m = np.int64(int(rank.max()) + 1)
        key = rank[1:] * m + rank[par[1:]]
        uniq, inv = np.unique(key, return_inverse=True)
        new_rank = np.zeros(n + 1, dtype=np.int64)
        new_rank[1:] = inv
        if len(uniq) == n:
            rank = new_rank
            break
        if np.array_equal(new_rank, rank):
            break
        rank = new_rank
    if len(np.unique(rank[1:])) != n:
        raise AssertionError("colex refinement failed to converge to a permutation")
    colex_to_pre = np.zeros(n + 1, dtype=np.int64)
    colex_to_pre[rank[1:] + 1] = np.arange(1, n + 1)
    return ColexOrder(colex_to_pre)


def naive_colex_order(trie):
    """Reference: sort nodes by reversed root-path label strings."""
    keys = [None] * (trie.n + 1)
    for u in range(1, trie.n + 1):
        codes = trie.path_codes(u)
        keys[u] = tuple(reversed([SENTINEL] + codes))
    order = sorted(range(1, trie.n + 1), key=lambda u: keys[u])
    return ColexOrder(np.array([0] + order, dtype=np.int64))


def oracle_locate(trie, pattern, colex=None):
    """Exact locate by scanning every root-to-node path string.

    Returns the pre-order ids of all nodes whose path is suffixed by
    ``pattern`` (bytes), sorted by co-lex rank. The empty pattern matches
    every node.
    """
    if colex is None:
        colex = colex_sort(trie)
    pattern = bytes(pattern)
    paths = trie.path_byte_strings()
    hits = [u for u in range(1, trie.n + 1) if paths[u].endswith(pattern)]
    hits.sort(key=lambda u: colex.pre_to_colex[u])
    return hits


def is_isomorphic(trie, u, v):
    """True iff the complete subtrees rooted at u and v are isomorphic."""
    if not (1 <= u <= trie.n and 1 <= v <= trie.n):
        raise IndexError("node id out of range")
    sig = trie.iso_signatures()
    return bool(sig[u] == sig[v])
