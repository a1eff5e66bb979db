"""Traced public memory.

PublicArray is the only storage the oblivious algorithms touch, and every
read or write of an entry emits a TraceEvent (array id, read/write, index)
to the run's sink.  Allocation assigns ids in order and emits nothing, so
two runs agree on ids whenever they allocate in the same order.

Sinks consume the event stream four ways: NullSink discards it (timing
runs), LogSink keeps it (inspection, file dumps), HashSink folds it into a
chained SHA-256 digest (trace-equality verification), CountSink tallies
per-phase totals (cost accounting).  The chain is defined link-by-link by
hash_step; HashSink computes the same digest in bulk.
"""

from __future__ import annotations

import hashlib
import struct
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .entries import AugEntry, U64_FIELDS
from ._sha256 import HAVE_NUMBA, chain_compress

__all__ = [
    "READ", "WRITE", "TraceEvent", "ZERO_DIGEST", "encode_event",
    "hash_step", "chain_digest", "REC_DTYPE",
    "TraceSink", "NullSink", "LogSink", "HashSink", "CountSink",
    "PublicArray", "alloc", "OutOfBoundsError",
]

READ = 0
WRITE = 1

ZERO_DIGEST = b"\x00" * 32

_EVENT_STRUCT = struct.Struct(">QBQ")

# Wire layout of one event record: u64 array id, u8 op, u64 index, all
# big-endian, 17 bytes total.
REC_DTYPE = np.dtype([("aid", ">u8"), ("op", "u1"), ("idx", ">u8")])
assert REC_DTYPE.itemsize == 17


@dataclass(frozen=True, slots=True)
class TraceEvent:
    array_id: int
    op: int  # READ or WRITE
    index: int

    def __str__(self) -> str:
        return f"{'RW'[self.op]} {self.array_id} {self.index}"


def encode_event(array_id: int, op: int, index: int) -> bytes:
    """17-byte record: u64 array id, u8 op, u64 index (big-endian)."""
    return _EVENT_STRUCT.pack(array_id, op, index)


def hash_step(h: bytes, ev: TraceEvent) -> bytes:
    """One link of the trace hash chain.

    The chain starts from 32 zero bytes; each event extends it with
    SHA-256(previous digest || record).
    """
    return hashlib.sha256(h + encode_event(ev.array_id, ev.op, ev.index)).digest()


def _chain_bytes(h: bytes, recs: np.ndarray, n: int) -> bytes:
    """Fold n packed records (uint8 buffer, 17 bytes each) into the chain."""
    if n == 0:
        return h
    if HAVE_NUMBA:
        h_in = np.frombuffer(h, dtype=np.uint8)
        h_out = np.empty(32, np.uint8)
        chain_compress(recs, n, h_in, h_out)
        return h_out.tobytes()
    buf = recs.tobytes()
    for i in range(n):
        h = hashlib.sha256(h + buf[17 * i:17 * i + 17]).digest()
    return h


def chain_digest(h: bytes, aids, ops, idxs) -> bytes:
    """Digest of a whole event sequence, starting from chain state h.

    aids may be a scalar (one array) or a per-event vector.  Equals
    folding hash_step over the events one by one.
    """
    ops = np.asarray(ops, dtype=np.uint8)
    n = len(ops)
    rec = np.empty(n, REC_DTYPE)
    rec["aid"] = aids
    rec["op"] = ops
    rec["idx"] = idxs
    return _chain_bytes(h, rec.view(np.uint8), n)


# --------------------------------------------------------------------------
# Sinks
# --------------------------------------------------------------------------

class TraceSink:
    """Receives every public-memory event of a run.

    The sink also owns array-id assignment and live-entry accounting, so
    ids and peak-space measurements are well defined per run.  `phase` is
    a label attached to subsequent events (CountSink and LogSink use it;
    the digest does not include it).
    """

    def __init__(self) -> None:
        self.phase = "setup"
        self._next_id = 0
        self.live_entries = 0
        self.peak_entries = 0

    def register_array(self, length: int) -> int:
        aid = self._next_id
        self._next_id += 1
        self.live_entries += length
        if self.live_entries > self.peak_entries:
            self.peak_entries = self.live_entries
        return aid

    def unregister_array(self, length: int) -> None:
        self.live_entries -= length

    @contextmanager
    def phase_scope(self, label: str):
        prev = self.phase
        self.phase = label
        try:
            yield
        finally:
            self.phase = prev

    # scalar event
    def emit(self, aid: int, op: int, idx: int) -> None:
        raise NotImplementedError

    # bulk events; aid may be an int or a per-event array
    def emit_block(self, aid, ops: np.ndarray, idxs: np.ndarray) -> None:
        raise NotImplementedError


class NullSink(TraceSink):
    """Discards events (for timing runs)."""

    def emit(self, aid, op, idx):
        pass

    def emit_block(self, aid, ops, idxs):
        pass


class LogSink(TraceSink):
    """Keeps the full event stream, tagged with the phase it came from."""

    def __init__(self) -> None:
        super().__init__()
        self._blocks: list[tuple[str, object, np.ndarray, np.ndarray]] = []

    def emit(self, aid, op, idx):
        self._blocks.append((self.phase, aid,
                             np.array([op], np.uint8),
                             np.array([idx], np.uint64)))

    def emit_block(self, aid, ops, idxs):
        if isinstance(aid, np.ndarray):
            aid = np.array(aid, np.uint64)
        self._blocks.append((self.phase,
                             aid,
                             np.array(ops, np.uint8),
                             np.array(idxs, np.uint64)))

    def __len__(self) -> int:
        return sum(len(ops) for _, _, ops, _ in self._blocks)

    def event_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(aids, ops, idxs) of the entire stream, in order."""
        aids, ops_all, idx_all = [], [], []
        for _, aid, ops, idxs in self._blocks:
            if isinstance(aid, np.ndarray):
                aids.append(aid)
            else:
                aids.append(np.full(len(ops), aid, np.uint64))
            ops_all.append(ops)
            idx_all.append(idxs)
        if not self._blocks:
            z = np.zeros(0, np.uint64)
            return z, np.zeros(0, np.uint8), z.copy()
        return (np.concatenate(aids), np.concatenate(ops_all),
                np.concatenate(idx_all))

    def events(self) -> Iterator[TraceEvent]:
        aids, ops, idxs = self.event_arrays()
        for a, o, i in zip(aids.tolist(), ops.tolist(), idxs.tolist()):
            yield TraceEvent(a, o, i)

    def events_tagged(self) -> Iterator[tuple[str, TraceEvent]]:
        """Events paired with the phase label they were emitted under."""
        for phase, aid, ops, idxs in self._blocks:
            if isinstance(aid, np.ndarray):
                for a, o, i in zip(aid.tolist(), ops.tolist(), idxs.tolist()):
                    yield phase, TraceEvent(a, o, i)
            else:
                a = int(aid)
                for o, i in zip(ops.tolist(), idxs.tolist()):
                    yield phase, TraceEvent(a, o, i)

    def phase_labels(self) -> list[str]:
        """Per-event phase labels, aligned with events()."""
        out: list[str] = []
        for phase, _, ops, _ in self._blocks:
            out.extend([phase] * len(ops))
        return out

    def phase_arrays(self, phase: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(aids, ops, idxs) of just the events emitted under one phase."""
        aids, ops_all, idx_all = [], [], []
        for ph, aid, ops, idxs in self._blocks:
            if ph != phase:
                continue
            if isinstance(aid, np.ndarray):
                aids.append(aid)
            else:
                aids.append(np.full(len(ops), aid, np.uint64))
            ops_all.append(ops)
            idx_all.append(idxs)
        if not aids:
            z = np.zeros(0, np.uint64)
            return z, np.zeros(0, np.uint8), z.copy()
        return (np.concatenate(aids), np.concatenate(ops_all),
                np.concatenate(idx_all))

    def lines(self) -> Iterator[str]:
        """Text form, one event per line: 'R <array_id> <index>'."""
        for ev in self.events():
            yield str(ev)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.lines():
                fh.write(line + "\n")

    def digest(self) -> bytes:
        aids, ops, idxs = self.event_arrays()
        return chain_digest(ZERO_DIGEST, aids, ops, idxs)


class HashSink(TraceSink):
    """Folds the event stream into the running SHA-256 chain.

    Local state is exactly the 32-byte chain value, independent of trace
    length.
    """

    def __init__(self) -> None:
        super().__init__()
        self._h = ZERO_DIGEST

    def emit(self, aid, op, idx):
        self._h = hashlib.sha256(self._h + _EVENT_STRUCT.pack(aid, op, idx)).digest()

    def emit_block(self, aid, ops, idxs):
        n = len(ops)
        if n == 0:
            return
        rec = np.empty(n, REC_DTYPE)
        rec["aid"] = aid
        rec["op"] = ops
        rec["idx"] = idxs
        self._h = _chain_bytes(self._h, rec.view(np.uint8), n)

    @property
    def digest(self) -> bytes:
        return self._h

    def hexdigest(self) -> str:
        return self._h.hex()


class CountSink(TraceSink):
    """Tallies events per phase label."""

    def __init__(self) -> None:
        super().__init__()
        self.counts: Counter[str] = Counter()

    def emit(self, aid, op, idx):
        self.counts[self.phase] += 1

    def emit_block(self, aid, ops, idxs):
        self.counts[self.phase] += len(ops)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


# --------------------------------------------------------------------------
# Public memory
# --------------------------------------------------------------------------

class OutOfBoundsError(IndexError):
    """Access outside an array's bounds: the engine aborts, never clamps."""


class PublicArray:
    """Fixed-length array of entry slots in traced public memory.

    Storage is struct-of-arrays (one uint64 column per entry attribute,
    uint8 null flags) with a leading batch axis: a batch of b arrays that
    experience the same access sequence share one trace.  Scalar read and
    write require batch size 1; the vectorized engine operates across the
    whole batch.

    A PublicArray is either a root allocation or a view produced by
    view(): views share storage and array id and translate indices by
    their offset, which is how subrange sorts and region handles are
    expressed without copying.
    """

    __slots__ = ("sink", "array_id", "batch", "offset", "length",
                 "_cols", "_root", "_released")

    def __init__(self, sink, array_id, cols, offset, length, batch, root):
        self.sink = sink
        self.array_id = array_id
        self._cols = cols
        self.offset = offset
        self.length = length
        self.batch = batch
        self._root = root if root is not None else self
        self._released = False

    # -- traced scalar access ------------------------------------------

    def _check(self, i: int) -> None:
        if not 0 <= i < self.length:
            raise OutOfBoundsError(
                f"index {i} out of bounds for array {self.array_id} "
                f"of length {self.length}")

    def read(self, i: int) -> AugEntry:
        """Read one entry (emits a read event)."""
        self._check(i)
        if self.batch != 1:
            raise ValueError("scalar read requires batch size 1")
        self.sink.emit(self.array_id, READ, self.offset + i)
        p = self.offset + i
        c = self._cols
        return AugEntry(int(c["j"][0, p]), int(c["d"][0, p]),
                        int(c["tid"][0, p]), int(c["alpha1"][0, p]),
                        int(c["alpha2"][0, p]), int(c["f"][0, p]),
                        int(c["ii"][0, p]), int(c["is_null"][0, p]))

    def write(self, i: int, e: AugEntry) -> None:
        """Write one entry (emits a write event)."""
        self._check(i)
        if self.batch != 1:
            raise ValueError("scalar write requires batch size 1")
        self.sink.emit(self.array_id, WRITE, self.offset + i)
        p = self.offset + i
        c = self._cols
        c["j"][0, p] = e.j
        c["d"][0, p] = e.d
        c["tid"][0, p] = e.tid
        c["alpha1"][0, p] = e.alpha1
        c["alpha2"][0, p] = e.alpha2
        c["f"][0, p] = e.f
        c["ii"][0, p] = e.ii
        c["is_null"][0, p] = e.is_null & 1

    # -- structure -------------------------------------------------------

    def view(self, offset: int, length: int) -> "PublicArray":
        """Subrange handle sharing storage, id and trace with this array."""
        if offset < 0 or length < 0 or offset + length > self.length:
            raise OutOfBoundsError(
                f"view [{offset}, {offset + length}) out of bounds for "
                f"length {self.length}")
        return PublicArray(self.sink, self.array_id, self._cols,
                           self.offset + offset, length, self.batch,
                           self._root)

    def release(self) -> None:
        """Return this allocation's slots to the sink's live counter.

        Accounting only — releasing a view releases its root allocation.
        """
        root = self._root
        if not root._released:
            root._released = True
            root.sink.unregister_array(root.length)

    def __len__(self) -> int:
        return self.length

    # -- engine internals (traced bulk access) ---------------------------

    def col(self, name: str) -> np.ndarray:
        """Storage column restricted to this view: shape (batch, length).

        Engines pair every column access with an explicit emit; this
        accessor does not emit by itself.
        """
        return self._cols[name][:, self.offset:self.offset + self.length]

    def emit_ops(self, ops: np.ndarray, idxs: np.ndarray) -> None:
        """Emit a block of events at view-local indices."""
        self.sink.emit_block(self.array_id, ops,
                             np.asarray(idxs, np.uint64) + np.uint64(self.offset))

    # -- diagnostics (untraced, never used by the algorithms) ------------

    def debug_entries(self, row: int = 0) -> list[AugEntry]:
        """Snapshot of the entries for inspection in tests and demos.

        Bypasses the trace deliberately; the algorithms never call it.
        """
        lo, hi = self.offset, self.offset + self.length
        c = self._cols
        return [AugEntry(*(int(c[name][row, p]) for name in U64_FIELDS),
                         int(c["is_null"][row, p]))
                for p in range(lo, hi)]

    def debug_col(self, name: str, row: int | None = None) -> np.ndarray:
        """Untraced copy of one column (diagnostics only)."""
        block = self._cols[name][:, self.offset:self.offset + self.length]
        return block[row].copy() if row is not None else block.copy()


def alloc(length: int, sink: TraceSink, batch: int = 1) -> PublicArray:
    """Allocate a public array of null entries.

    Assigns the sink's next array id and accounts length slots against its
    live/peak counters.  Allocation emits no events; only accesses do.
    """
    if length < 0:
        raise ValueError("negative length")
    aid = sink.register_array(length)
    cols: dict[str, np.ndarray] = {
        name: np.zeros((batch, length), np.uint64) for name in U64_FIELDS}
    cols["is_null"] = np.ones((batch, length), np.uint8)
    return PublicArray(sink, aid, cols, 0, length, batch, None)
