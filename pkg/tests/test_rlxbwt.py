import random

import numpy as np
import pytest

from rlxt.errors import DomainError
from rlxt.rlxbwt import (
    backward_extend,
    build_rl_xbwt,
    cr,
    reconstruct_out_sets,
    reconstruct_trie,
    run_head_preorder,
    xbwt_rank,
    xbwt_successor,
)
from rlxt.trie import build_from_strings, colex_sort

from conftest import make_random_trie, path_trie

A, B, C = 1, 2, 3  # label codes in EX26


@pytest.fixture(scope="module")
def rlx26(ex26, ex26_colex):
    return build_rl_xbwt(ex26, ex26_colex)


def test_ex26_triples(rlx26):
    rlx, _ = rlx26
    expected = [
        ((A, B, C), (), 3),
        ((), (A, C), 4),
        ((), (B,), 1),
        ((A, C), (), 3),
        ((), (A, C), 8),
        ((B, C), (), 2),
        ((), (B, C), 3),
        ((A,), (), 2),
    ]
    assert rlx.triples == expected


def test_ex26_sprime_string(rlx26):
    _, spi = rlx26
    want = [
        ("+", A), ("+", B), ("+", C), ("/", None),
        ("-", A), ("-", C), ("/", None),
        ("-", B), ("/", None),
        ("+", A), ("+", C), ("/", None),
        ("-", A), ("-", C), ("/", None),
        ("+", B), ("+", C), ("/", None),
        ("-", B), ("-", C), ("/", None),
        ("+", A), ("/", None),
    ]
    assert spi.symbols() == want


def test_ex26_run_stats(rlx26):
    rlx, _ = rlx26
    r, r_c, r_prime = rlx.run_stats()
    assert (r, r_prime) == (8, 8)
    assert r_c == {A: 3, B: 2, C: 3}


def test_single_node_trie_degenerate():
    t = build_from_strings([])
    rlx, spi = build_rl_xbwt(t, colex_sort(t))
    assert rlx.triples == [((), (), 1)]
    r, r_c, r_prime = rlx.run_stats()
    assert (r, r_prime) == (0, 1)
    assert r_c == {}


def test_xbwt_rank_examples(rlx26):
    rlx, spi = rlx26
    assert xbwt_rank(spi, rlx, B, 7) == 7
    assert xbwt_rank(spi, rlx, A, 26) == 8
    assert xbwt_rank(spi, rlx, C, 0) == 0


def test_xbwt_successor_examples(rlx26):
    rlx, spi = rlx26
    assert xbwt_successor(spi, rlx, B, 8) == 20
    assert xbwt_successor(spi, rlx, A, 1) == 1
    assert xbwt_successor(spi, rlx, C, 22) is None


def test_cr_examples(rlx26):
    rlx, spi = rlx26
    assert cr(spi, rlx, 3, C) == 3
    assert cr(spi, rlx, 20, C) == 2
    with pytest.raises(DomainError):
        cr(spi, rlx, 4, A)


def test_backward_extend_examples(rlx26):
    rlx, spi = rlx26
    assert backward_extend(rlx, spi, (1, 26), A) == (2, 9)
    assert backward_extend(rlx, spi, (2, 9), C) == (20, 22)
    assert backward_extend(rlx, spi, (4, 7), A) is None


def test_c_array_ex26(rlx26):
    rlx, _ = rlx26
    assert list(rlx.c_array[:4]) == [0, 1, 9, 18]


def test_run_heads_ex26(rlx26):
    rlx, _ = rlx26
    assert rlx.run_heads[A] == [(1, 1), (9, 10), (25, 20)]
    assert rlx.run_heads[B] == [(1, 1), (20, 18)]
    assert run_head_preorder(rlx, A, 9) == 10
    with pytest.raises(DomainError):
        run_head_preorder(rlx, A, 2)


def _naive_out_sets(trie, colex):
    return [tuple(int(c) for c in trie.out_labels(int(colex.colex_to_pre[i])))
            for i in range(1, trie.n + 1)]


def test_reconstruction_and_bounds_random():
    rng = random.Random(31)
    for _ in range(40):
        t = make_random_trie(rng, 250, rng.choice([2, 4, 8]))
        order = colex_sort(t)
        rlx, spi = build_rl_xbwt(t, order)
        outs = _naive_out_sets(t, order)
        assert reconstruct_out_sets(rlx) == outs
        r, r_c, r_prime = rlx.run_stats()
        sum_del = sum(len(d) for _, d, _ in rlx.triples)
        sum_add = sum(len(a) for a, _, _ in rlx.triples)
        assert sum_del <= r
        assert sum_add <= 2 * r
        assert r_prime <= max(3 * r, 1)
        if t.n > 1:
            assert all(a or d for a, d, _ in rlx.triples)
        # blocks are maximal: consecutive blocks differ
        sets = rlx.block_out_sets()
        assert all(sets[q] != sets[q + 1] for q in range(len(sets) - 1))
        # naive run-break count agrees
        want_r = 0
        for c in range(1, t.alphabet.sigma):
            for i in range(1, t.n + 1):
                if c in outs[i - 1] and (i == t.n or c not in outs[i]):
                    want_r += 1
        assert r == want_r


def test_queries_match_naive_scans():
    rng = random.Random(32)
    for _ in range(25):
        t = make_random_trie(rng, 150, 3)
        order = colex_sort(t)
        rlx, spi = build_rl_xbwt(t, order)
        outs = _naive_out_sets(t, order)
        for _ in range(60):
            c = rng.randint(1, t.alphabet.sigma - 1)
            i = rng.randint(1, t.n)
            want_rank = sum(1 for j in range(1, i + 1) if c in outs[j - 1])
            assert xbwt_rank(spi, rlx, c, i) == want_rank
            want_succ = next((j for j in range(i, t.n + 1) if c in outs[j - 1]), None)
            assert xbwt_successor(spi, rlx, c, i) == want_succ
            if c in outs[i - 1]:
                assert cr(spi, rlx, i, c) == outs[i - 1].index(c) + 1
            else:
                with pytest.raises(DomainError):
                    cr(spi, rlx, i, c)


def test_sprime_interleaving_invariant():
    rng = random.Random(33)
    for _ in range(25):
        t = make_random_trie(rng, 200, 4)
        rlx, spi = build_rl_xbwt(t, colex_sort(t))
        syms = spi.symbols()
        for c in range(1, t.alphabet.sigma):
            kinds = [k for k, lab in syms if lab == c]
            # between consecutive c+ there is exactly one c-
            for a, b in zip(kinds, kinds[1:]):
                assert (a, b) in {("+", "-"), ("-", "+")}
            if kinds:
                assert kinds[0] == "+"


def test_path_trie_runs_match_string_rle():
    rng = random.Random(34)
    for _ in range(30):
        s = bytes(rng.choice(b"abc") for _ in range(rng.randint(1, 300)))
        t = path_trie(s)
        order = colex_sort(t)
        rlx, _ = build_rl_xbwt(t, order)
        outs = _naive_out_sets(t, order)
        naive_runs = 0
        for c in range(1, t.alphabet.sigma):
            prev = False
            for i in range(1, t.n + 1):
                now = c in outs[i - 1]
                if prev and not now:
                    naive_runs += 1
                prev = now
            if prev:
                naive_runs += 1
        assert rlx.run_stats()[0] == naive_runs


def test_reconstruct_trie_round_trip(ex26, ex26_colex):
    rlx, _ = build_rl_xbwt(ex26, ex26_colex)
    t2 = reconstruct_trie(rlx, ex26.alphabet.byte_of_code)
    assert np.array_equal(t2.parent, ex26.parent)
    assert np.array_equal(t2.label, ex26.label)
