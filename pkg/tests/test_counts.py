import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bct.counts import build_counts, node_counts
from bct.errors import SequenceError, TreeError
from bct.symbols import Sequence, parse_alphabet
from bct.trees import ROOT, TreeSpace, code_context
from oracles import scan_counts

BIN = parse_alphabet("01")


def test_small_example():
    table = build_counts(Sequence([0, 1, 0, 1, 1], BIN), TreeSpace(2, 1))
    assert node_counts(table, ROOT).tolist() == [1, 3]
    assert node_counts(table, (0,)).tolist() == [0, 2]
    assert node_counts(table, (1,)).tolist() == [1, 1]
    assert table.n_effective == 4


def test_constant_sequence():
    table = build_counts(Sequence([0, 0, 0, 0], BIN), TreeSpace(2, 1))
    assert node_counts(table, (0,)).tolist() == [3, 0]
    assert node_counts(table, (1,)).tolist() == [0, 0]


def test_too_short():
    with pytest.raises(SequenceError):
        build_counts(Sequence([0, 1, 0], BIN), TreeSpace(2, 3))


def test_depth_overflow():
    table = build_counts(Sequence([0, 1, 0, 1, 1], BIN), TreeSpace(2, 1))
    with pytest.raises(TreeError):
        node_counts(table, (0, 0))


def test_unseen_node_is_zero():
    table = build_counts(Sequence([0, 0, 0, 0, 0], BIN), TreeSpace(2, 2))
    assert node_counts(table, (1, 1)).tolist() == [0, 0]


def _check_against_scan(codes, m, L):
    alphabet = parse_alphabet("abcd"[:m])
    table = build_counts(Sequence(codes, alphabet), TreeSpace(m, L))
    oracle = scan_counts(codes, L, m)
    for d in range(L + 1):
        for r in range(m**d):
            s = code_context(r, d, m)
            assert table.levels[d][r].tolist() == oracle.get(s, [0] * m), s
    return table


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(
    lambda m: st.tuples(st.just(m), st.integers(0, 4), st.lists(st.integers(0, m - 1), min_size=5, max_size=80))
))
def test_matches_direct_scan(args):
    m, L, codes = args
    if len(codes) <= L:
        return
    table = _check_against_scan(codes, m, L)
    # parent counts are the sums of the children
    for d in range(L):
        children = table.levels[d + 1].reshape(m**d, m, m).sum(axis=1)
        assert np.array_equal(children, table.levels[d])
    assert table.levels[L].sum() == len(codes) - L


def test_chunking_is_irrelevant():
    rng = np.random.default_rng(3)
    z = Sequence(rng.integers(0, 3, 5000), parse_alphabet("abc"))
    space = TreeSpace(3, 4)
    one = build_counts(z, space)
    for chunks in (2, 7, 64):
        other = build_counts(z, space, chunks=chunks)
        assert all(np.array_equal(a, b) for a, b in zip(one.levels, other.levels))


def test_merge_by_addition():
    rng = np.random.default_rng(4)
    codes = rng.integers(0, 2, 300)
    space = TreeSpace(2, 3)
    whole = build_counts(Sequence(codes, BIN), space)
    first = build_counts(Sequence(codes[:150], BIN), space)
    # second half keeps L symbols of overlap as context
    second = build_counts(Sequence(codes[150 - 3:], BIN), space)
    merged = first + second
    assert merged.n_effective == whole.n_effective
    assert all(np.array_equal(a, b) for a, b in zip(whole.levels, merged.levels))


def test_counts_are_int64():
    table = build_counts(Sequence([0, 1, 1, 0], BIN), TreeSpace(2, 1))
    assert all(lv.dtype == np.int64 for lv in table.levels)
