"""Multiplication across N simulated nodes over a message-passing transport.

Protocol (node 0 starts with both operands and ends with the result):

  1. node 0 builds the interval split and broadcasts operands and bounds;
  2. every node computes the operation count of a disjoint slice of the
     intervals; nodes 1..N-1 send their slices to node 0;
  3. node 0 cuts the interval list into N consecutive ranges with nearly
     equal operation totals (cumulative-sum partitioning) and sends each
     node its range;
  4. each node merges its range with its local worker pool and nodes 1..N-1
     send their per-interval results back; node 0 concatenates everything in
     ascending interval order.

Wire format (all integers little-endian): each message is one tagged frame,
tag byte 1=OPERANDS, 2=OPCOUNTS, 3=RANGE, 4=RESULT.  Polynomials travel as
variable table + layout + u64 packed exponents + coefficients (f64, or
sign byte + u32 length-prefixed magnitude for exact integers), so a real
network transport can replace the in-process reference implementation.
"""

from __future__ import annotations

import queue
import struct
import threading
from dataclasses import dataclass, field

from .core import Layout, Polynomial, VarTable, check_product_fits
from .merge import concat
from .parmul import MulConfig, compute_intervals, interval_op_counts
from .split import GridParams, select_grid

TAG_OPERANDS = 1
TAG_OPCOUNTS = 2
TAG_RANGE = 3
TAG_RESULT = 4


class TransportError(RuntimeError):
    """The transport failed to deliver or receive a message."""


class ClusterError(RuntimeError):
    """The cluster protocol failed (usually a transport failure underneath)."""


@dataclass
class TransportStats:
    messages: int = 0  # logical messages to other nodes (a broadcast counts once)
    bytes: int = 0     # payload bytes actually transferred (broadcast: size x (N-1))


class LocalTransport:
    """Reference in-process transport: one FIFO queue per (sender, receiver)
    pair, lossless, with per-message byte accounting.  Safe for concurrent
    senders; deliveries to self bypass the queues and the counters."""

    def __init__(self, n_nodes: int, timeout: float = 120.0):
        self.n_nodes = n_nodes
        self.timeout = timeout
        self.stats = TransportStats()
        self._queues = {(s, d): queue.Queue()
                        for s in range(n_nodes) for d in range(n_nodes) if s != d}
        self._lock = threading.Lock()

    def send(self, src: int, dst: int, payload: bytes) -> None:
        if src == dst:
            raise TransportError("self-delivery does not go through the transport")
        with self._lock:
            self.stats.messages += 1
            self.stats.bytes += len(payload)
        self._queues[src, dst].put(payload)

    def broadcast(self, src: int, payload: bytes) -> None:
        """Deliver to every other node; counted as one logical message."""
        others = [d for d in range(self.n_nodes) if d != src]
        if not others:
            return
        with self._lock:
            self.stats.messages += 1
            self.stats.bytes += len(payload) * len(others)
        for d in others:
            self._queues[src, d].put(payload)

    def recv(self, dst: int, src: int) -> bytes:
        try:
            return self._queues[src, dst].get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(
                f"node {dst} timed out waiting for a message from node {src}") from None


# ---------------------------------------------------------------------------
# Frame encoding
# ---------------------------------------------------------------------------

def _encode_coeffs(ctype, coeffs) -> bytes:
    if ctype is float:
        return struct.pack(f"<{len(coeffs)}d", *coeffs)
    parts = []
    for c in coeffs:
        mag = abs(c)
        raw = mag.to_bytes((mag.bit_length() + 7) // 8, "little") if mag else b""
        parts.append(struct.pack("<BI", 1 if c < 0 else 0, len(raw)))
        parts.append(raw)
    return b"".join(parts)


def _decode_coeffs(ctype, n, view, off):
    if ctype is float:
        coeffs = list(struct.unpack_from(f"<{n}d", view, off))
        return coeffs, off + 8 * n
    coeffs = []
    for _ in range(n):
        negative, size = struct.unpack_from("<BI", view, off)
        off += 5
        mag = int.from_bytes(view[off:off + size], "little")
        off += size
        coeffs.append(-mag if negative else mag)
    return coeffs, off


def _encode_poly(p: Polynomial) -> bytes:
    lay = p.layout
    parts = [struct.pack("<B", lay.vars.m)]
    for name in lay.vars.names:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<B", len(raw)))
        parts.append(raw)
    parts.append(struct.pack("<B", 1 if lay.order == "grlex" else 0))
    parts.append(struct.pack(f"<{lay.vars.m}B", *lay.var_bits))
    parts.append(struct.pack("<BB", lay.deg_bits, 1 if p.ctype is float else 0))
    parts.append(struct.pack("<Q", p.n))
    parts.append(struct.pack(f"<{p.n}Q", *p.exps))
    parts.append(_encode_coeffs(p.ctype, p.coeffs))
    return b"".join(parts)


def _decode_poly(view, off):
    (m,) = struct.unpack_from("<B", view, off)
    off += 1
    names = []
    for _ in range(m):
        (size,) = struct.unpack_from("<B", view, off)
        off += 1
        names.append(bytes(view[off:off + size]).decode("utf-8"))
        off += size
    grlex, = struct.unpack_from("<B", view, off)
    off += 1
    var_bits = struct.unpack_from(f"<{m}B", view, off)
    off += m
    deg_bits, is_float = struct.unpack_from("<BB", view, off)
    off += 2
    (n,) = struct.unpack_from("<Q", view, off)
    off += 8
    exps = list(struct.unpack_from(f"<{n}Q", view, off))
    off += 8 * n
    ctype = float if is_float else int
    coeffs, off = _decode_coeffs(ctype, n, view, off)
    layout = Layout(VarTable(tuple(names)), "grlex" if grlex else "lex",
                    var_bits, deg_bits if grlex else None)
    return Polynomial._from_sorted(layout, exps, coeffs, ctype), off


def _frame(tag: int, body: bytes) -> bytes:
    return struct.pack("<B", tag) + body


def _check_tag(view, expected):
    tag = view[0]
    if tag != expected:
        raise TransportError(f"expected frame tag {expected}, got {tag}")
    return 1


def encode_operands(a: Polynomial, b: Polynomial, bounds) -> bytes:
    body = [_encode_poly(a), _encode_poly(b),
            struct.pack("<I", len(bounds)),
            struct.pack(f"<{len(bounds)}Q", *bounds)]
    return _frame(TAG_OPERANDS, b"".join(body))


def decode_operands(payload: bytes):
    view = memoryview(payload)
    off = _check_tag(view, TAG_OPERANDS)
    a, off = _decode_poly(view, off)
    b, off = _decode_poly(view, off)
    (n_s,) = struct.unpack_from("<I", view, off)
    off += 4
    bounds = list(struct.unpack_from(f"<{n_s}Q", view, off))
    return a, b, bounds


def encode_opcounts(start: int, counts) -> bytes:
    body = struct.pack("<II", start, len(counts)) + struct.pack(f"<{len(counts)}Q", *counts)
    return _frame(TAG_OPCOUNTS, body)


def decode_opcounts(payload: bytes):
    view = memoryview(payload)
    off = _check_tag(view, TAG_OPCOUNTS)
    start, n = struct.unpack_from("<II", view, off)
    counts = list(struct.unpack_from(f"<{n}Q", view, off + 8))
    return start, counts


def encode_range(lo: int, hi: int) -> bytes:
    return _frame(TAG_RANGE, struct.pack("<II", lo, hi))


def decode_range(payload: bytes):
    view = memoryview(payload)
    off = _check_tag(view, TAG_RANGE)
    lo, hi = struct.unpack_from("<II", view, off)
    return lo, hi


def encode_results(ctype, start: int, results) -> bytes:
    parts = [struct.pack("<BII", 1 if ctype is float else 0, start, len(results))]
    for exps, coeffs in results:
        parts.append(struct.pack("<Q", len(exps)))
        parts.append(struct.pack(f"<{len(exps)}Q", *exps))
        parts.append(_encode_coeffs(ctype, coeffs))
    return _frame(TAG_RESULT, b"".join(parts))


def decode_results(payload: bytes):
    view = memoryview(payload)
    off = _check_tag(view, TAG_RESULT)
    is_float, start, count = struct.unpack_from("<BII", view, off)
    off += 9
    ctype = float if is_float else int
    results = []
    for _ in range(count):
        (n,) = struct.unpack_from("<Q", view, off)
        off += 8
        exps = list(struct.unpack_from(f"<{n}Q", view, off))
        off += 8 * n
        coeffs, off = _decode_coeffs(ctype, n, view, off)
        results.append((exps, coeffs))
    return start, results


# ---------------------------------------------------------------------------
# Cumulative-sum partitioning and the node program
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterPlan:
    """Contiguous per-node interval ranges covering [0, n_intervals)."""

    n_nodes: int
    ranges: tuple[tuple[int, int], ...]
    op_counts: tuple[int, ...]

    def loads(self) -> tuple[int, ...]:
        return tuple(sum(self.op_counts[lo:hi]) for lo, hi in self.ranges)


def partition_by_ops(op_counts, n_nodes: int) -> ClusterPlan:
    """Cut intervals into N consecutive ranges of nearly equal operation
    totals: range r ends at the first prefix whose sum reaches (r+1)/N of the
    grand total.  Every interval lands in exactly one range; a range's load
    exceeds the ideal total/N by at most max(op_counts)."""
    if n_nodes < 1:
        raise ValueError(f"need at least one node, got {n_nodes}")
    op_counts = list(op_counts)
    total = sum(op_counts)
    cuts = [0]
    acc = 0
    at = 0
    for r in range(1, n_nodes):
        while acc * n_nodes < r * total:
            acc += op_counts[at]
            at += 1
        cuts.append(at)
    cuts.append(len(op_counts))
    ranges = tuple((cuts[r], cuts[r + 1]) for r in range(n_nodes))
    return ClusterPlan(n_nodes, ranges, tuple(op_counts))


def _block(n_items: int, n_nodes: int, rank: int) -> tuple[int, int]:
    return rank * n_items // n_nodes, (rank + 1) * n_items // n_nodes


def _node_program(rank, n_nodes, transport, cfg, box, a=None, b=None, bounds=None):
    """One node's half of the protocol; rank 0 plays master."""
    if rank != 0:
        a, b, bounds = decode_operands(transport.recv(rank, 0))
    n_int = len(bounds) - 1

    lo, hi = _block(n_int, n_nodes, rank)
    my_counts = interval_op_counts(a, b, bounds, lo, hi)
    if rank == 0:
        op_counts = [0] * n_int
        op_counts[lo:hi] = my_counts
        for r in range(1, n_nodes):
            start, counts = decode_opcounts(transport.recv(0, r))
            op_counts[start:start + len(counts)] = counts
        plan = partition_by_ops(op_counts, n_nodes)
        for r in range(1, n_nodes):
            transport.send(0, r, encode_range(*plan.ranges[r]))
        my_lo, my_hi = plan.ranges[0]
        box["plan"] = plan
    else:
        transport.send(rank, 0, encode_opcounts(lo, my_counts))
        my_lo, my_hi = decode_range(transport.recv(rank, 0))

    mine = compute_intervals(a, b, bounds, my_lo, my_hi, cfg.merger, cfg.c)
    if rank == 0:
        results = [None] * n_int
        results[my_lo:my_hi] = mine
        for r in range(1, n_nodes):
            start, theirs = decode_results(transport.recv(0, r))
            results[start:start + len(theirs)] = theirs
        box["poly"] = concat(a.layout, results, a.ctype)
    else:
        transport.send(rank, 0, encode_results(a.ctype, my_lo, mine))


@dataclass
class ClusterResult:
    poly: Polynomial
    plan: ClusterPlan
    stats: TransportStats
    node_ops: tuple[int, ...] = field(default=())


def cluster_run(a: Polynomial, b: Polynomial, cfg: MulConfig | None = None,
                n_nodes: int = 1, transport=None) -> ClusterResult:
    """Run the full protocol on simulated nodes (one thread per node) and
    return the result with the plan and transport statistics."""
    if cfg is None:
        cfg = MulConfig()
    if n_nodes < 1:
        raise ValueError(f"need at least one node, got {n_nodes}")
    a._check_compatible(b)
    if a.is_zero or b.is_zero:
        plan = partition_by_ops([], n_nodes)
        return ClusterResult(Polynomial.zero(a.layout, a.ctype), plan,
                             TransportStats(), (0,) * n_nodes)
    check_product_fits(a, b)
    if transport is None:
        transport = LocalTransport(n_nodes)

    split = select_grid(a, b, GridParams(cfg.l))
    bounds = split.bounds
    if n_nodes > 1:
        transport.broadcast(0, encode_operands(a, b, bounds))

    boxes = [{} for _ in range(n_nodes)]
    errors: list[tuple[int, BaseException]] = []

    def run(rank):
        try:
            if rank == 0:
                _node_program(0, n_nodes, transport, cfg, boxes[0], a, b, bounds)
            else:
                _node_program(rank, n_nodes, transport, cfg, boxes[rank])
        except BaseException as exc:  # gathered and re-raised by the caller
            errors.append((rank, exc))

    threads = [threading.Thread(target=run, args=(r,), name=f"node-{r}")
               for r in range(1, n_nodes)]
    for t in threads:
        t.start()
    run(0)
    for t in threads:
        t.join()

    if errors:
        errors.sort(key=lambda item: isinstance(item[1], TransportError))
        rank, exc = errors[0]
        if isinstance(exc, TransportError):
            raise ClusterError(f"node {rank}: {exc}") from exc
        raise exc
    plan = boxes[0]["plan"]
    return ClusterResult(boxes[0]["poly"], plan, transport.stats, plan.loads())


def cluster_mul(a: Polynomial, b: Polynomial, cfg: MulConfig | None = None,
                n_nodes: int = 1, transport=None) -> Polynomial:
    """Cluster-protocol product; equal to the schoolbook product for any N."""
    return cluster_run(a, b, cfg, n_nodes, transport).poly
