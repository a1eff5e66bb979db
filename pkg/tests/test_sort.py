"""Sorting network schedule and the oblivious sort built on it."""

import numpy as np
import pytest

from oblivjoin._schedule import comparator_count, gp2, np2, route_hops, sort_levels
from oblivjoin.entries import ASC, DESC, KEY_J_TID, KEY_NONNULL_F
from oblivjoin.primitives import bitonic_sort
from oblivjoin.trace import HashSink, LogSink, NullSink, alloc


def net_sort(values):
    """Run the raw comparator schedule over a plain array."""
    v = np.array(values)
    for lo, hi, asc in sort_levels(len(v)):
        a, b = v[lo], v[hi]
        swap = np.where(asc, a > b, a < b)
        v[lo] = np.where(swap, b, a)
        v[hi] = np.where(swap, a, b)
    return v


def test_np2_gp2():
    assert [np2(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [1, 2, 4, 4, 8, 8, 16]
    assert [gp2(n) for n in (2, 3, 4, 5, 8, 9)] == [1, 2, 2, 4, 4, 8]


def test_network_sorts_every_length_up_to_65(rng):
    for n in range(66):
        for _ in range(20):
            v = rng.integers(0, max(4, 2 * n), size=n)
            assert np.array_equal(net_sort(v), np.sort(v)), f"n={n}"


def test_network_sorts_adversarial_patterns():
    for n in (3, 5, 7, 12, 33, 63):
        patterns = [
            np.arange(n)[::-1],            # reversed
            np.zeros(n, int),              # constant
            np.r_[np.arange(n // 2), np.arange(n - n // 2)[::-1]],  # organ pipe
        ]
        for v in patterns:
            assert np.array_equal(net_sort(v), np.sort(v)), (n, v)


def test_power_of_two_comparator_count_formula():
    # k(k+1)/4 * 2^k comparators for n = 2^k: the classical network
    for k in range(1, 9):
        n = 1 << k
        assert comparator_count(n) == (k * (k + 1) * n) // 4


def test_levels_are_disjoint_and_canonical():
    for n in (7, 24, 31, 64):
        for lo, hi, asc in sort_levels(n):
            idx = np.concatenate([lo, hi])
            assert len(np.unique(idx)) == len(idx)
            assert (lo < hi).all()
            assert (np.diff(lo) > 0).all()  # ascending in lo
            assert len(asc) == len(lo)


def test_schedule_is_deterministic():
    a = [(lo.tolist(), hi.tolist(), asc.tolist()) for lo, hi, asc in sort_levels(37)]
    b = [(lo.tolist(), hi.tolist(), asc.tolist()) for lo, hi, asc in sort_levels(37)]
    assert a == b


def test_route_hops_values():
    assert route_hops(8) == [4, 2, 1]
    assert route_hops(5) == [4, 2, 1]
    assert route_hops(2) == [1]
    assert route_hops(1) == []
    assert route_hops(0) == []


def _fill(a, j_vals, tid_vals=None):
    n = len(j_vals)
    a.col("j")[:, :n] = np.asarray(j_vals, np.uint64)
    if tid_vals is not None:
        a.col("tid")[:, :n] = np.asarray(tid_vals, np.uint64)
    a.col("d")[:, :n] = np.arange(n, dtype=np.uint64)
    a.col("is_null")[:, :n] = 0


@pytest.mark.parametrize("engine", ["scalar", "vector"])
def test_sort_orders_by_lexicographic_key(engine, rng):
    for n in (1, 2, 5, 16, 23):
        a = alloc(n, NullSink())
        j = rng.integers(0, 4, n)
        tid = rng.integers(1, 3, n)
        _fill(a, j, tid)
        bitonic_sort(a, KEY_J_TID, engine)
        got = [(e.j, e.tid) for e in a.debug_entries()]
        assert got == sorted(got)


@pytest.mark.parametrize("engine", ["scalar", "vector"])
def test_sort_nonnull_key_front_loads_real_entries(engine):
    a = alloc(5, NullSink())
    # slots 1 and 3 stay null
    a.col("is_null")[:, [0, 2, 4]] = 0
    a.col("f")[:, [0, 2, 4]] = [3, 1, 2]
    bitonic_sort(a, KEY_NONNULL_F, engine)
    ents = a.debug_entries()
    assert [e.is_null for e in ents] == [0, 0, 0, 1, 1]
    assert [e.f for e in ents[:3]] == [1, 2, 3]


def test_sort_descending_direction(rng):
    key = (("j", DESC), ("d", ASC))
    a = alloc(9, NullSink())
    _fill(a, rng.integers(0, 5, 9))
    bitonic_sort(a, key)
    js = [e.j for e in a.debug_entries()]
    assert js == sorted(js, reverse=True)


def test_trace_depends_only_on_length(rng):
    digests = set()
    for _ in range(20):
        s = HashSink()
        a = alloc(13, s)
        _fill(a, rng.permutation(13))
        h0 = s.digest
        bitonic_sort(a, KEY_J_TID)
        assert s.digest != h0
        digests.add(s.digest)
    assert len(digests) == 1


@pytest.mark.parametrize("n", [1, 3, 8, 21])
def test_scalar_and_vector_engines_agree(n, rng):
    j = rng.integers(0, 6, n)
    outs, digs = [], []
    for engine in ("scalar", "vector"):
        s = HashSink()
        a = alloc(n, s)
        _fill(a, j)
        bitonic_sort(a, KEY_J_TID, engine)
        outs.append([(e.j, e.d) for e in a.debug_entries()])
        digs.append(s.digest)
    assert outs[0] == outs[1]
    assert digs[0] == digs[1]


def test_compare_exchange_event_pattern():
    s = LogSink()
    a = alloc(2, s)
    _fill(a, [5, 3])
    bitonic_sort(a, KEY_J_TID)
    evs = list(s.events())
    assert [(e.op, e.index) for e in evs] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_sort_of_view_touches_only_the_view():
    s = LogSink()
    a = alloc(10, s)
    _fill(a, [9, 8, 7, 6, 5, 4, 3, 2, 1, 0])
    v = a.view(2, 5)
    bitonic_sort(v, KEY_J_TID)
    idxs = {ev.index for ev in s.events()}
    assert idxs <= set(range(2, 7))
    assert [e.j for e in a.debug_entries()][2:7] == [3, 4, 5, 6, 7]
    # outside the view untouched
    assert [e.j for e in a.debug_entries()][:2] == [9, 8]
    assert [e.j for e in a.debug_entries()][7:] == [2, 1, 0]


def test_sort_batched_rows_sort_independently(rng):
    s = HashSink()
    a = alloc(12, s, batch=4)
    j = rng.integers(0, 9, size=(4, 12)).astype(np.uint64)
    a.col("j")[:] = j
    a.col("is_null")[:] = 0
    bitonic_sort(a, KEY_J_TID)
    out = a.debug_col("j")
    assert np.array_equal(out, np.sort(j, axis=1))
