import random

import pytest

from rlxt.trie import LabeledTrie, build_from_strings, colex_sort

# 26-node running example used by most golden tests.
EX26_WORDS = [
    "a", "aa", "aaa", "aaab", "aab", "aac", "aacb", "aacc", "aacca",
    "aaccaa", "aaccaab", "aaccac", "ab", "aba", "abab", "abc", "ac",
    "acb", "acc", "acca", "b", "ba", "bab", "bc", "c",
]

EX26_COLEX_TO_PRE = [
    1, 2, 3, 4, 11, 23, 15, 21, 10, 22, 14, 6, 5, 12, 24, 16, 19, 8, 26,
    18, 7, 13, 25, 17, 20, 9,
]

EX26_RED = {3, 7, 14, 15, 17, 21, 26}
EX26_BLUE = {1, 8, 10}


def ex26_lines():
    return [w.encode() for w in EX26_WORDS]


@pytest.fixture(scope="session")
def ex26():
    return build_from_strings(ex26_lines())


@pytest.fixture(scope="session")
def ex26_colex(ex26):
    return colex_sort(ex26)


def make_random_trie(rng: random.Random, max_n: int, sigma: int) -> LabeledTrie:
    """Random trie grown by attaching nodes to random parents.

    ``sigma`` is the edge-label pool size; the effective alphabet may be
    smaller. Children are inserted keeping pre-order validity by rebuilding
    the id assignment at the end.
    """
    n = rng.randint(1, max_n)
    labels_pool = list(range(1, sigma + 1))
    # adjacency in insertion space first, re-number in DFS order afterwards
    children = {0: {}}
    nodes = [0]
    for _ in range(n - 1):
        for _attempt in range(64):
            p = rng.choice(nodes)
            c = rng.choice(labels_pool)
            if c not in children[p]:
                break
        else:
            continue
        nid = len(nodes)
        children[p][c] = nid
        children[nid] = {}
        nodes.append(nid)
    parent = [0, 0]
    label = [0, 0]
    stack = [(1, c, children[0][c]) for c in sorted(children[0], reverse=True)]
    while stack:
        pid, c, old = stack.pop()
        uid = len(parent)
        parent.append(pid)
        label.append(c)
        for cc in sorted(children[old], reverse=True):
            stack.append((uid, cc, children[old][cc]))
    from rlxt.trie import Alphabet

    used = [b for b in label[2:]]
    alphabet = Alphabet(used if used else [])
    dense = [0, 0] + [alphabet.code_of_byte[b] for b in label[2:]]
    return LabeledTrie(parent, dense, alphabet)


def path_trie(data: bytes) -> LabeledTrie:
    return build_from_strings([data] if data else [])


def make_dictionary(rng: random.Random, nwords: int, alpha: bytes, minlen=3, maxlen=12):
    words = set()
    while len(words) < nwords:
        ln = rng.randint(minlen, maxlen)
        words.add(bytes(rng.choice(alpha) for _ in range(ln)))
    return sorted(words)


def mutate_word(rng: random.Random, word: bytes, alpha: bytes) -> bytes:
    if not word:
        return word
    i = rng.randrange(len(word))
    return word[:i] + bytes([rng.choice(alpha)]) + word[i + 1 :]


def repetitive_lines(rng: random.Random, words, alpha: bytes, copies: int, edit_rate=0.02):
    """Concatenated copies of a dictionary, each copy lightly mutated."""
    lines = []
    for _ in range(copies):
        for w in words:
            lines.append(mutate_word(rng, w, alpha) if rng.random() < edit_rate else w)
    return lines


def versioned_lines(rng: random.Random, words, alpha: bytes, versions: int, edit_rate=0.01):
    """Near-duplicate dictionaries, each under a distinct short version prefix.

    Unlike plain duplication (which a trie dedupes away), this repeats whole
    subtrees and is the shape where the run count stays far below n.
    """
    lines = []
    for v in range(versions):
        tag = bytes([97 + v // 26, 97 + v % 26, ord("/")])
        for w in words:
            if rng.random() < edit_rate and w:
                w = mutate_word(rng, w, alpha)
            lines.append(tag + w)
    return lines


def make_text_dictionary(rng: random.Random, nwords: int, alpha: bytes, text_len=300):
    """Words sampled as substrings of one base text (low continuation entropy)."""
    text = bytes(rng.choice(alpha) for _ in range(text_len))
    words = set()
    while len(words) < nwords:
        ln = rng.randint(4, min(16, text_len - 1))
        i = rng.randrange(len(text) - ln)
        words.add(text[i : i + ln])
    return sorted(words)


def present_patterns(trie, rng: random.Random, count: int, max_len=6):
    """Byte patterns that occur as path-label substrings of the trie."""
    paths = trie.path_byte_strings()
    pats = set()
    for _ in range(count * 3):
        u = rng.randint(1, trie.n)
        s = paths[u]
        if not s:
            continue
        ln = rng.randint(1, min(max_len, len(s)))
        start = rng.randint(0, len(s) - ln)
        pats.add(s[start : start + ln])
        if len(pats) >= count:
            break
    return sorted(pats)


def random_patterns(rng: random.Random, alpha: bytes, count: int, max_len=6):
    pats = []
    for _ in range(count):
        ln = rng.randint(1, max_len)
        pats.append(bytes(rng.choice(alpha) for _ in range(ln)))
    return pats


def trie_alpha_bytes(trie) -> bytes:
    return bytes(int(b) for b in trie.alphabet.byte_of_code[1:])
