"""Data-independent schedules for the sorting and routing networks.

A schedule is a pure function of the public length n: both engines replay
the same comparator sequence, so traces agree by construction.  Sort
schedules come out level by level — the comparators inside one level touch
pairwise-disjoint slots, so emitting a level in one canonical order (by low
index) preserves the sequential semantics while letting the vector engine
apply a whole level at once.

The network is a bottom-up bitonic sorter that works in place for any n.
Stage k merges adjacent blocks of size k, ascending for even block index.
Complete blocks use the classic power-of-two merge (hop sequence
k/2, ..., 1; pairs (i, i^j); that merge handles either orientation of a
bitonic input).  The ragged tail block, when present, is merged by the
arbitrary-length bitonic merge, which splits a length-s range at the
greatest power of two j < s, compares (i, i+j), and recurses.  That merge
is orientation-sensitive: ascending it sorts rising-then-falling input
and must recurse on (s-j, j)-sized halves; descending it sorts the same
shape with (j, s-j) halves (the two are mirror images).  Tail contents
are always rising-then-falling — a complete ascending run followed by a
shorter run — provided each stage's tail is sorted descending whenever the
next stage's tail still extends past a complete block; the R() recursion
below picks those directions.  At powers of two no tails exist and the
network is exactly the classical one with n * log2(n) * (log2(n)+1) / 4
comparators.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

__all__ = ["np2", "gp2", "sort_levels", "comparator_count", "route_hops"]


def np2(n: int) -> int:
    """Smallest power of two >= n (n >= 1)."""
    return 1 << (n - 1).bit_length()


def gp2(n: int) -> int:
    """Greatest power of two < n (n >= 2)."""
    return 1 << ((n - 1).bit_length() - 1)


def _tail_directions(n: int, kmax: int) -> dict[int, bool]:
    """Required output direction of each stage's ragged-tail merge.

    The final stage sorts ascending.  A stage-k tail that shares its
    parent's region (parent tail <= k) inherits the parent's direction;
    one that forms the falling half of the parent's rising-then-falling
    input (parent tail > k) must sort descending.
    """
    dirs: dict[int, bool] = {}
    if n == kmax:
        return dirs
    dirs[kmax] = True
    k = kmax // 2
    while k >= 2:
        if n % k >= 2:
            parent_tail = n % (2 * k)
            dirs[k] = False if parent_tail > k else dirs[2 * k]
        k //= 2
    return dirs


def sort_levels(n: int) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield the sorting network for length n as levels (lo, hi, asc).

    lo/hi are int64 index arrays (pairwise disjoint within a level,
    ascending in lo); asc is the per-comparator direction: True orders the
    pair ascending, False descending.
    """
    if n < 2:
        return
    kmax = np2(n)
    tail_dir = _tail_directions(n, kmax)
    k = 2
    while k <= kmax:
        nfull = (n // k) * k          # slots covered by complete blocks
        tail = n - nfull              # 0 <= tail < k
        # Pending tail sub-merges, keyed by the hop they fire at.
        scopes: dict[int, list[tuple[int, int, bool]]] = {}
        if tail >= 2:
            scopes.setdefault(gp2(tail), []).append((nfull, tail, tail_dir[k]))
        j = k >> 1
        while j >= 1:
            parts_lo: list[np.ndarray] = []
            parts_hi: list[np.ndarray] = []
            parts_asc: list[np.ndarray] = []
            if nfull:
                # All pairs (i, i+j) with bit j of i clear, i < nfull.
                jb = j.bit_length() - 1
                t = np.arange(nfull >> 1, dtype=np.int64)
                lo = ((t >> jb) << (jb + 1)) | (t & (j - 1))
                parts_lo.append(lo)
                parts_hi.append(lo | j)
                parts_asc.append((lo & k) == 0)
            for lo0, size, up in sorted(scopes.pop(j, ())):
                cnt = size - j
                lo = np.arange(lo0, lo0 + cnt, dtype=np.int64)
                parts_lo.append(lo)
                parts_hi.append(lo + j)
                parts_asc.append(np.full(cnt, up))
                if up:  # ascending merge recurses on (size-j, j)
                    children = ((lo0, size - j), (lo0 + size - j, j))
                else:   # descending on (j, size-j)
                    children = ((lo0, j), (lo0 + j, size - j))
                for clo, csz in children:
                    if csz >= 2:
                        scopes.setdefault(gp2(csz), []).append((clo, csz, up))
            if parts_lo:
                if len(parts_lo) == 1:
                    yield parts_lo[0], parts_hi[0], parts_asc[0]
                else:
                    yield (np.concatenate(parts_lo),
                           np.concatenate(parts_hi),
                           np.concatenate(parts_asc))
            j >>= 1
        assert not scopes
        k <<= 1


def comparator_count(n: int) -> int:
    """Total compare-exchanges the length-n sort performs."""
    return sum(len(lo) for lo, _, _ in sort_levels(n))


def route_hops(m: int) -> list[int]:
    """Hop distances of the length-m routing network, largest first.

    2^(ceil(log2 m) - 1) halving down to 1; empty for m < 2.
    """
    if m < 2:
        return []
    top = (m - 1).bit_length() - 1
    return [1 << t for t in range(top, -1, -1)]
