"""Oblivious building blocks: compare-exchange, sorting network,
distribution, expansion.

Every routine here touches public memory in a pattern that is a pure
function of its public sizes — never of entry contents.  Two engines share
each schedule: "scalar" is the literal one-entry-at-a-time reference
(every write goes through ct_select, every comparator performs its two
reads and two writes unconditionally), "vector" applies whole schedule
levels with numpy across the batch axis.  Both emit identical traces; the
tests hold them to that.
"""

from __future__ import annotations

import numpy as np

from .entries import (U64_FIELDS, KEY_F, KEY_NONNULL_F, ct_eq, ct_select,
                      ct_select_entry, key_column, lex_compare, null_entry)
from .trace import READ, WRITE, PublicArray, alloc
from ._schedule import route_hops, sort_levels

__all__ = [
    "compare_exchange", "bitonic_sort",
    "oblivious_distribute", "ext_oblivious_distribute", "oblivious_expand",
    "DistributeCollisionError",
]

_ALL_COLS = U64_FIELDS + ("is_null",)


class DistributeCollisionError(RuntimeError):
    """A routing swap hit a non-null partner.

    With a valid destination map (injective f into 1..m) this never
    happens; the check exists to instrument that guarantee in tests.
    """


def _check_engine(engine: str) -> None:
    if engine not in ("scalar", "vector"):
        raise ValueError(f"unknown engine {engine!r}")


# --------------------------------------------------------------------------
# Compare-exchange and sorting
# --------------------------------------------------------------------------

def compare_exchange(a: PublicArray, i: int, k: int, key,
                     ascending: bool = True) -> int:
    """Order slots i and k of a by key, ascending or descending.

    Unconditionally two reads then two writes — an already-ordered or
    equal pair gets dummy writes — so the event pattern never reveals the
    outcome.  Returns the swap bit for instrumentation.
    """
    e1 = a.read(i)
    e2 = a.read(k)
    c = lex_compare(e1, e2, key)
    swap = int(c > 0) if ascending else int(c < 0)
    a.write(i, ct_select_entry(swap, e2, e1))
    a.write(k, ct_select_entry(swap, e1, e2))
    return swap


def _emit_ce_level(a: PublicArray, lo: np.ndarray, hi: np.ndarray) -> None:
    p = len(lo)
    idx = np.empty(4 * p, np.int64)
    idx[0::4] = lo
    idx[1::4] = hi
    idx[2::4] = lo
    idx[3::4] = hi
    ops = np.empty(4 * p, np.uint8)
    ops[0::4] = READ
    ops[1::4] = READ
    ops[2::4] = WRITE
    ops[3::4] = WRITE
    a.emit_ops(ops, idx)


def _ce_level_vector(a: PublicArray, key, lo, hi, asc) -> None:
    # Lexicographic strict greater/less masks for the pairs (lo, hi).
    shape = (a.batch, len(lo))
    gt = np.zeros(shape, bool)
    lt = np.zeros(shape, bool)
    eq = np.ones(shape, bool)
    for attr, ascending in key:
        col = a.col(key_column(attr))
        av = col[:, lo]
        bv = col[:, hi]
        if ascending:
            g = av > bv
            l = av < bv
        else:
            g = av < bv
            l = av > bv
        gt |= eq & g
        lt |= eq & l
        eq &= ~(g | l)
    swap = np.where(asc, gt, lt)
    for name in _ALL_COLS:
        col = a.col(name)
        vl = col[:, lo]
        vh = col[:, hi]
        col[:, lo] = np.where(swap, vh, vl)
        col[:, hi] = np.where(swap, vl, vh)
    _emit_ce_level(a, lo, hi)


def bitonic_sort(a: PublicArray, key, engine: str = "vector") -> None:
    """In-place oblivious sort of a under a KeySpec.

    The comparator sequence (and hence the trace) is a pure function of
    len(a); works for any length, in place.
    """
    _check_engine(engine)
    if engine == "scalar":
        for lo, hi, asc in sort_levels(a.length):
            for t in range(len(lo)):
                compare_exchange(a, int(lo[t]), int(hi[t]), key, bool(asc[t]))
    else:
        for lo, hi, asc in sort_levels(a.length):
            _ce_level_vector(a, key, lo, hi, asc)


# --------------------------------------------------------------------------
# Linear passes and copies (shared event patterns)
# --------------------------------------------------------------------------

def _emit_linear_rw(a: PublicArray, idx: np.ndarray) -> None:
    """Read-then-write event pair at each index of idx, in idx order."""
    n = len(idx)
    ii = np.empty(2 * n, np.int64)
    ii[0::2] = idx
    ii[1::2] = idx
    ops = np.empty(2 * n, np.uint8)
    ops[0::2] = READ
    ops[1::2] = WRITE
    a.emit_ops(ops, ii)


def _copy_into(x: PublicArray, a: PublicArray, n: int, engine: str) -> None:
    """Copy x[0..n) into a[0..n) (read source, write destination)."""
    if engine == "scalar":
        for i in range(n):
            a.write(i, x.read(i))
        return
    for name in _ALL_COLS:
        a.col(name)[:, :n] = x.col(name)[:, :n]
    aids = np.empty(2 * n, np.uint64)
    aids[0::2] = x.array_id
    aids[1::2] = a.array_id
    ops = np.empty(2 * n, np.uint8)
    ops[0::2] = READ
    ops[1::2] = WRITE
    idx = np.empty(2 * n, np.uint64)
    base = np.arange(n, dtype=np.uint64)
    idx[0::2] = base + np.uint64(x.offset)
    idx[1::2] = base + np.uint64(a.offset)
    x.sink.emit_block(aids, ops, idx)


# --------------------------------------------------------------------------
# Oblivious distribution (routing network)
# --------------------------------------------------------------------------

def _route_hop_scalar(a: PublicArray, m: int, j: int, swap_check: bool) -> None:
    for i in range(m - j - 1, -1, -1):
        y = a.read(i)
        y2 = a.read(i + j)
        # y's 0-based destination is f-1; it still needs to advance past
        # this hop iff f-1 >= i+j.  Null entries have f = 0.
        cond = int(y.f > i + j)
        if swap_check and cond and not y2.is_null:
            raise DistributeCollisionError(
                f"swap at ({i}, {i + j}) hit a non-null partner")
        a.write(i, ct_select_entry(cond, y2, y))
        a.write(i + j, ct_select_entry(cond, y, y2))


def _route_hop_vector(a: PublicArray, m: int, j: int, swap_check: bool) -> None:
    cnt = m - j
    fcol = a.col("f")
    ncol = a.col("is_null")
    # Entries at p < m-j whose destination lies at or beyond p+j all move
    # forward by j; their slots become null.  Sequential execution of the
    # descending loop does exactly this, because every swap partner is
    # null (the collision check guards that reasoning).
    thresh = np.arange(cnt, dtype=np.uint64) + np.uint64(j)
    mover = (ncol[:, :cnt] == 0) & (fcol[:, :cnt] > thresh)
    if swap_check:
        mover_at = np.zeros((a.batch, m), bool)
        mover_at[:, :cnt] = mover
        bad = mover & (ncol[:, j:m] == 0) & ~mover_at[:, j:m]
        if bad.any():
            b, p = np.argwhere(bad)[0]
            raise DistributeCollisionError(
                f"swap at ({p}, {p + j}) hit a non-null partner")
    for name in _ALL_COLS:
        col = a.col(name)
        src = col[:, :cnt].copy()
        nullval = 1 if name == "is_null" else 0
        col[:, :cnt] = np.where(mover, nullval, col[:, :cnt])
        col[:, j:m] = np.where(mover, src, col[:, j:m])
    i_desc = np.arange(cnt - 1, -1, -1, dtype=np.int64)
    idx = np.empty(4 * cnt, np.int64)
    idx[0::4] = i_desc
    idx[1::4] = i_desc + j
    idx[2::4] = i_desc
    idx[3::4] = i_desc + j
    ops = np.empty(4 * cnt, np.uint8)
    ops[0::4] = READ
    ops[1::4] = READ
    ops[2::4] = WRITE
    ops[3::4] = WRITE
    a.emit_ops(ops, idx)


def _route_region(a: PublicArray, engine: str, swap_check: bool) -> None:
    m = a.length
    for j in route_hops(m):
        if engine == "scalar":
            _route_hop_scalar(a, m, j, swap_check)
        else:
            _route_hop_vector(a, m, j, swap_check)


def oblivious_distribute(x: PublicArray, m: int, engine: str = "vector",
                         swap_check: bool = False) -> PublicArray:
    """Scatter the n entries of x to slots f-1 of a fresh length-m array.

    Requires n <= m, every entry non-null, and f injective into 1..m.
    Unfilled slots are null.  The access sequence depends only on (n, m).
    """
    _check_engine(engine)
    n = x.length
    if n > m:
        raise ValueError(f"distribute requires n <= m, got n={n} m={m}")
    sink = x.sink
    a = alloc(m, sink, x.batch)
    with sink.phase_scope("distribute_copy"):
        _copy_into(x, a, n, engine)
    with sink.phase_scope("distribute_sort"):
        bitonic_sort(a.view(0, n), KEY_F, engine)
    with sink.phase_scope("distribute_route"):
        _route_region(a, engine, swap_check)
    return a


def ext_oblivious_distribute(x: PublicArray, m: int, engine: str = "vector",
                             swap_check: bool = False) -> PublicArray:
    """Distribute allowing null inputs (f = 0 on null entries).

    Non-null entries land at slots f-1 exactly as in
    oblivious_distribute; n may exceed m as long as at most m entries are
    non-null.  Returns an array of length m (a view when n > m: the sort
    parks nulls behind the first m slots and routing never consults
    them).
    """
    _check_engine(engine)
    n = x.length
    sink = x.sink
    a = alloc(max(n, m), sink, x.batch)
    with sink.phase_scope("distribute_copy"):
        _copy_into(x, a, n, engine)
    with sink.phase_scope("distribute_sort"):
        bitonic_sort(a.view(0, n), KEY_NONNULL_F, engine)
    with sink.phase_scope("distribute_route"):
        _route_region(a.view(0, m), engine, swap_check)
    return a if a.length == m else a.view(0, m)


# --------------------------------------------------------------------------
# Oblivious expansion
# --------------------------------------------------------------------------

def _expand_prefix(x: PublicArray, g_attr: str, engine: str) -> int:
    """First expansion pass: f <- 1 + exclusive prefix sum of g, zero-g
    entries become null with f = 0.  Returns m = sum of g."""
    n = x.length
    if engine == "scalar":
        s = 1
        for i in range(n):
            e = x.read(i)
            g = getattr(e, g_attr)
            z = ct_eq(g, 0)
            e.f = ct_select(z, 0, s)
            e.is_null = ct_select(z, 1, e.is_null)
            x.write(i, e)
            s += g
        return s - 1
    g = x.col(g_attr)
    z = g == 0
    before = np.cumsum(g, axis=1, dtype=np.uint64) - g
    fcol = x.col("f")
    ncol = x.col("is_null")
    fcol[:] = np.where(z, 0, np.uint64(1) + before)
    ncol[:] = np.where(z, 1, ncol)
    _emit_linear_rw(x, np.arange(n, dtype=np.int64))
    totals = g.sum(axis=1, dtype=np.uint64)
    m = int(totals[0]) if n else 0
    if n and not (totals == totals[0]).all():
        raise ValueError("batched expand requires a uniform output size")
    return m


def _forward_fill(a: PublicArray, engine: str) -> None:
    """Second expansion pass: each null slot takes the last value written."""
    m = a.length
    if engine == "scalar":
        px = null_entry()
        for i in range(m):
            e = a.read(i)
            e = ct_select_entry(e.is_null, px, e)
            px = e
            a.write(i, e)
        return
    nul = a.col("is_null")
    ar = np.arange(m, dtype=np.int64)
    src = np.maximum.accumulate(np.where(nul == 0, ar, -1), axis=1)
    valid = src >= 0
    gather = np.where(valid, src, 0)
    for name in _ALL_COLS:
        col = a.col(name)
        vals = np.take_along_axis(col, gather, axis=1)
        nullval = 1 if name == "is_null" else 0
        col[:] = np.where(valid, vals, nullval)
    _emit_linear_rw(a, ar)


def oblivious_expand(x: PublicArray, g_attr: str, engine: str = "vector",
                     swap_check: bool = False) -> PublicArray:
    """Replace each entry of x by g copies of itself (g = its g_attr
    value), preserving order; entries with g = 0 vanish.

    Returns a fresh array of length m = sum of g.  x itself is consumed
    (its f and null flags are overwritten by the prefix pass).  The trace
    depends only on (n, m).
    """
    _check_engine(engine)
    sink = x.sink
    with sink.phase_scope("expand_prefix"):
        m = _expand_prefix(x, g_attr, engine)
    a = ext_oblivious_distribute(x, m, engine, swap_check)
    with sink.phase_scope("expand_fill"):
        _forward_fill(a, engine)
    return a
