"""Link streams: parsing, slicing and per-pair queries.

A link stream is a time-ordered multiset of undirected timestamped links
``(t, u, v)`` over a node set ``V`` and a bounding interval. Internally nodes
are mapped to positions in a :class:`NodeIndex` and node pairs are encoded as
``i * n + j`` with ``i < j``, so that all sub-streams cut from the same stream
share one pair coding.
"""
from __future__ import annotations

import math
import os
from collections import namedtuple
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ParseError

__all__ = [
    "Interval",
    "Link",
    "LinkStream",
    "NodeIndex",
    "NodePair",
    "load_stream",
    "read_stream",
    "read_node_universe",
    "node_key",
]


def node_key(node):
    """Total order on opaque node ids: integers (or integer tokens) first, numerically."""
    if isinstance(node, (int, np.integer)) and not isinstance(node, bool):
        return (0, int(node), str(node))
    text = str(node)
    try:
        return (0, int(text), text)
    except ValueError:
        return (1, 0, text)


class NodePair(NamedTuple):
    """Unordered node pair stored with ``a`` before ``b`` under :func:`node_key`."""

    a: object
    b: object

    @classmethod
    def of(cls, u, v) -> "NodePair":
        if u == v:
            raise ValueError(f"a node pair needs two distinct nodes, got {u!r} twice")
        if node_key(v) < node_key(u):
            u, v = v, u
        return cls(u, v)

    def canonical(self) -> "NodePair":
        return NodePair.of(self.a, self.b)


class Link(NamedTuple):
    t: float
    u: object
    v: object

    @property
    def pair(self) -> NodePair:
        return NodePair.of(self.u, self.v)


@dataclass(frozen=True)
class Interval:
    """Closed time interval ``[start, end]`` in seconds."""

    start: float
    end: float

    def __post_init__(self):
        start, end = float(self.start), float(self.end)
        if not (math.isfinite(start) and math.isfinite(end)):
            raise ValueError(f"interval bounds must be finite, got [{start}, {end}]")
        if end < start:
            raise ValueError(f"inverted interval [{start}, {end}]")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, t) -> bool:
        return self.start <= t <= self.end

    def shift(self, offset) -> "Interval":
        return Interval(self.start + offset, self.end + offset)


class NodeIndex:
    """Immutable mapping between node ids and positions ``0..n-1`` in canonical order."""

    __slots__ = ("ids", "_pos")

    def __init__(self, ids: Iterable):
        unique = sorted(set(ids), key=node_key)
        self.ids = tuple(unique)
        self._pos = {node: i for i, node in enumerate(self.ids)}

    def __len__(self):
        return len(self.ids)

    def __contains__(self, node):
        return node in self._pos

    def __iter__(self):
        return iter(self.ids)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, NodeIndex) and self.ids == other.ids

    def __hash__(self):
        return hash(self.ids)

    def __repr__(self):
        return f"NodeIndex(n={len(self.ids)})"

    def position(self, node) -> int:
        return self._pos[node]

    def get(self, node, default=-1) -> int:
        return self._pos.get(node, default)

    def encode(self, u, v) -> int:
        """Pair code of ``{u, v}``; raises ``KeyError`` for unknown nodes."""
        i, j = self._pos[u], self._pos[v]
        if i == j:
            raise ValueError(f"a node pair needs two distinct nodes, got {u!r} twice")
        if i > j:
            i, j = j, i
        return i * len(self.ids) + j

    def encode_pair(self, pair) -> int:
        return self.encode(pair[0], pair[1])

    def decode(self, code) -> NodePair:
        i, j = divmod(int(code), len(self.ids))
        return NodePair(self.ids[i], self.ids[j])

    def decode_many(self, codes) -> list[NodePair]:
        n = len(self.ids)
        ids = self.ids
        return [NodePair(ids[c // n], ids[c % n]) for c in np.asarray(codes, dtype=np.int64).tolist()]

    def encode_many(self, pairs) -> np.ndarray:
        return np.fromiter((self.encode_pair(p) for p in pairs), dtype=np.int64)


Adjacency = namedtuple("Adjacency", "indptr indices weights degree strength log_strength")
Adjacency.__doc__ = """CSR adjacency of the static graph aggregated over a stream.

``weights`` holds pair activities; ``strength`` is the per-node sum of
activities and ``log_strength`` the per-node sum of their natural logs.
"""


class LinkStream:
    """Immutable link stream ``(interval, V, E)``.

    Links are held as three parallel arrays sorted by time: ``times``, and the
    node positions ``src < dst``. Construct with :meth:`from_links` or
    :func:`load_stream`.
    """

    def __init__(self, interval: Interval, nodes: NodeIndex, times, src, dst, *, _checked=False):
        times = np.ascontiguousarray(times, dtype=np.float64)
        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        if not _checked:
            if not (len(times) == len(src) == len(dst)):
                raise ValueError("times, src and dst must have equal length")
            if np.any(src == dst):
                raise ValueError("self-interactions are not allowed")
            lo, hi = np.minimum(src, dst), np.maximum(src, dst)
            src, dst = lo, hi
            if len(times) and (times.min() < interval.start or times.max() > interval.end):
                raise ValueError("link timestamps must lie within the stream interval")
            if len(src) and (src.min() < 0 or dst.max() >= len(nodes)):
                raise ValueError("node positions out of range")
            order = np.argsort(times, kind="stable")
            times, src, dst = times[order], src[order], dst[order]
        for arr in (times, src, dst):
            arr.setflags(write=False)
        self.interval = interval
        self.nodes = nodes
        self.times = times
        self.src = src
        self.dst = dst

    @classmethod
    def from_links(cls, links: Iterable, interval: Interval | None = None, node_universe=None) -> "LinkStream":
        """Build a stream from ``(t, u, v)`` triples.

        The interval defaults to ``[min t, max t]``; the node set is the
        endpoint set, extended by ``node_universe`` when given.
        """
        links = [(float(t), u, v) for t, u, v in links]
        for t, u, v in links:
            if u == v:
                raise ValueError(f"self-interaction on node {u!r} at t={t}")
        ids = set(node_universe) if node_universe is not None else set()
        for _, u, v in links:
            ids.add(u)
            ids.add(v)
        nodes = NodeIndex(ids)
        if interval is None:
            if not links:
                raise ValueError("cannot infer the interval of an empty stream")
            ts = [t for t, _, _ in links]
            interval = Interval(min(ts), max(ts))
        times = np.array([t for t, _, _ in links], dtype=np.float64)
        src = np.array([nodes.position(u) for _, u, _ in links], dtype=np.int64)
        dst = np.array([nodes.position(v) for _, _, v in links], dtype=np.int64)
        return cls(interval, nodes, times, src, dst)

    def __len__(self):
        return len(self.times)

    def __repr__(self):
        return (f"LinkStream([{self.interval.start:g}, {self.interval.end:g}], "
                f"|V|={len(self.nodes)}, |E|={len(self.times)})")

    @property
    def start(self) -> float:
        return self.interval.start

    @property
    def end(self) -> float:
        return self.interval.end

    @property
    def node_set(self) -> frozenset:
        return frozenset(self.nodes.ids)

    @property
    def links(self) -> list[Link]:
        ids = self.nodes.ids
        return [Link(t, ids[i], ids[j])
                for t, i, j in zip(self.times.tolist(), self.src.tolist(), self.dst.tolist())]

    @cached_property
    def codes(self) -> np.ndarray:
        """Pair code of every link, aligned with ``times``."""
        out = self.src * len(self.nodes) + self.dst
        out.setflags(write=False)
        return out

    @cached_property
    def _pair_counts(self):
        codes, counts = np.unique(self.codes, return_counts=True)
        return codes, counts.astype(np.int64)

    @cached_property
    def _pair_times(self):
        order = np.lexsort((self.times, self.codes))
        return self.codes[order], self.times[order]

    def pair_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted codes of active pairs and their link counts."""
        return self._pair_counts

    def pair_times(self) -> tuple[np.ndarray, np.ndarray]:
        """Link pair codes and timestamps sorted by (code, time)."""
        return self._pair_times

    @cached_property
    def min_time_gap(self) -> float:
        """Smallest positive gap between distinct timestamps, or 1.0 when there is none."""
        distinct = np.unique(self.times)
        if len(distinct) < 2:
            return 1.0
        return float(np.diff(distinct).min())

    @cached_property
    def adjacency(self) -> Adjacency:
        n = len(self.nodes)
        codes, counts = self._pair_counts
        i, j = np.divmod(codes, n)
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        w = np.concatenate([counts, counts]).astype(np.float64)
        order = np.lexsort((cols, rows))
        rows, cols, w = rows[order], cols[order], w[order]
        degree = np.bincount(rows, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degree, out=indptr[1:])
        strength = np.bincount(rows, weights=w, minlength=n)
        log_strength = np.bincount(rows, weights=np.log(w), minlength=n)
        return Adjacency(indptr, cols, w, degree, strength, log_strength)

    # -- queries ---------------------------------------------------------

    def slice(self, window: Interval) -> "LinkStream":
        """Sub-stream of links with ``window.start <= t <= window.end``; V is kept."""
        if not isinstance(window, Interval):
            window = Interval(*window)
        lo = np.searchsorted(self.times, window.start, side="left")
        hi = np.searchsorted(self.times, window.end, side="right")
        return LinkStream(window, self.nodes, self.times[lo:hi], self.src[lo:hi],
                          self.dst[lo:hi], _checked=True)

    def neighborhood(self, node) -> set:
        pos = self.nodes.get(node)
        if pos < 0:
            return set()
        adj = self.adjacency
        ids = self.nodes.ids
        return {ids[k] for k in adj.indices[adj.indptr[pos]:adj.indptr[pos + 1]].tolist()}

    def pair_activity(self, pair) -> int:
        u, v = pair
        if u not in self.nodes or v not in self.nodes or u == v:
            return 0
        code = self.nodes.encode(u, v)
        codes, counts = self._pair_counts
        k = np.searchsorted(codes, code)
        if k < len(codes) and codes[k] == code:
            return int(counts[k])
        return 0

    def candidate_codes(self) -> np.ndarray:
        """Sorted codes of active pairs and of pairs sharing at least one neighbor."""
        n = len(self.nodes)
        adj = self.adjacency
        parts = [self._pair_counts[0]]
        for w in range(n):
            nb = adj.indices[adj.indptr[w]:adj.indptr[w + 1]]
            if len(nb) < 2:
                continue
            a, b = np.triu_indices(len(nb), k=1)
            parts.append(nb[a] * n + nb[b])
        return np.unique(np.concatenate(parts)).astype(np.int64)

    def candidate_pairs(self) -> set[NodePair]:
        return set(self.nodes.decode_many(self.candidate_codes()))

    def activity_histogram(self, granularity) -> list[tuple[float, int]]:
        """Link counts per bin ``[start + i*g, start + (i+1)*g)``; the last bin is closed."""
        g = float(granularity)
        if not g > 0:
            raise ValueError(f"granularity must be positive, got {granularity}")
        span = self.interval.length
        nbins = max(1, int(math.ceil(span / g)))
        idx = np.floor((self.times - self.interval.start) / g).astype(np.int64)
        idx = np.clip(idx, 0, nbins - 1)
        counts = np.bincount(idx, minlength=nbins)
        return [(self.interval.start + i * g, int(c)) for i, c in enumerate(counts.tolist())]

    def shifted(self, offset) -> "LinkStream":
        return LinkStream(self.interval.shift(offset), self.nodes, self.times + offset,
                          self.src, self.dst, _checked=True)


def _iter_lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = source.decode()
    if isinstance(source, str):
        return source.splitlines()
    if isinstance(source, os.PathLike):
        with open(source) as fh:
            return fh.read().splitlines()
    return source


def load_stream(source, node_universe=None, interval: Interval | None = None) -> LinkStream:
    """Parse ``t u v`` lines into a :class:`LinkStream`.

    ``source`` is text, an iterable of lines, or a path-like object. Lines
    starting with ``#`` and blank lines are skipped. Node ids stay as string
    tokens. With ``interval`` given, links outside it are dropped.
    """
    links = []
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"expected 't u v', got {len(fields)} field(s): {line!r}", lineno)
        try:
            t = float(fields[0])
        except ValueError:
            raise ParseError(f"unparseable timestamp {fields[0]!r}", lineno) from None
        if not math.isfinite(t):
            raise ParseError(f"non-finite timestamp {fields[0]!r}", lineno)
        u, v = fields[1], fields[2]
        if u == v:
            raise ParseError(f"self-interaction on node {u!r}", lineno)
        links.append((t, u, v))
    if not links:
        raise ParseError("input contains no links")
    if interval is not None:
        links = [link for link in links if interval.contains(link[0])]
    universe = None if node_universe is None else [str(x) for x in node_universe]
    return LinkStream.from_links(links, interval=interval, node_universe=universe)


def read_stream(path, node_universe=None, interval: Interval | None = None) -> LinkStream:
    with open(path) as fh:
        return load_stream(fh.read().splitlines(), node_universe, interval)


def read_node_universe(path) -> list[str]:
    """One node id per line; ``#`` comments and blank lines ignored."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line.split()[0])
    return out
