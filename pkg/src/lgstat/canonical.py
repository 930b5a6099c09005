"""Canonical forms of rooted colored balls, colored stars and colored cherries.

A :class:`BallCode` is the canonical representative of an isomorphism class of
rooted k-colored graphs in which every vertex lies within distance ``radius`` of
the root. Vertex 0 is always the root.

Byte layout of :meth:`BallCode.to_bytes` (all integers big-endian)::

    u8      format version (1)
    u32     k, number of colors of the universe
    u16     radius
    u16     m, vertex count
    u32*m   colors in canonical vertex order
    bits    upper-triangle adjacency bitmap over pairs (i, j), i < j, row-major,
            most significant bit first, zero-padded to a whole byte

The canonical vertex order starts from the BFS layering of the root, refines by
color and neighbour-cell signatures, and then branches over residual cells
(individualization), keeping the lexicographically least adjacency bitmap.
Branches related by an already discovered automorphism are pruned.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Iterator

from .errors import BallSizeCapExceeded, GraphFormatError
from .graph import Coloring, Graph, ball

DEFAULT_BALL_CAP = 64
_FORMAT_VERSION = 1

__all__ = [
    "DEFAULT_BALL_CAP",
    "RootedColoredGraph",
    "BallCode",
    "StarType",
    "CherryType",
    "canonical_form",
    "ball_type",
    "star_of",
    "project_star",
    "truncate_ball",
    "forget_aux_color",
    "has_distinct_colors",
    "theta",
    "enumerate_stars",
    "count_stars",
]


def _bfs_from(adj, source: int, limit: int | None = None) -> dict[int, int]:
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for v in frontier:
            dv = dist[v]
            if limit is not None and dv >= limit:
                continue
            for u in adj[v]:
                if u not in dist:
                    dist[u] = dv + 1
                    nxt.append(u)
        frontier = nxt
    return dist


@dataclass(frozen=True)
class RootedColoredGraph:
    """Labelled rooted colored graph; the root is vertex 0."""

    k: int
    radius: int
    colors: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        m = len(self.colors)
        if m < 1:
            raise GraphFormatError("a rooted graph has at least its root")
        for c in self.colors:
            if not 1 <= c <= self.k:
                raise GraphFormatError(f"color {c} outside 1..{self.k}")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < j < m) or (i, j) in seen:
                raise GraphFormatError(f"bad edge ({i}, {j})")
            seen.add((i, j))
        dist = _bfs_from(self.adjacency, 0)
        if len(dist) != m or max(dist.values()) > self.radius:
            raise GraphFormatError("some vertex is farther than the radius from the root")

    @property
    def m(self) -> int:
        return len(self.colors)

    @property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.colors]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class BallCode:
    """Canonical rooted colored ball. Compare, hash and sort freely."""

    k: int
    radius: int
    colors: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.colors)

    @property
    def root_color(self) -> int:
        return self.colors[0]

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.colors]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        dist = _bfs_from(self.adjacency, 0)
        return tuple(dist[v] for v in range(self.m))

    @cached_property
    def vertex_of_color(self) -> dict[int, int]:
        """Color lookup; only meaningful when all colors are distinct."""
        return {c: v for v, c in enumerate(self.colors)}

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def rooted_at(self, v: int, s: int) -> RootedColoredGraph:
        """The induced radius-s ball around vertex ``v`` of this code, relabelled with ``v`` first."""
        dist = _bfs_from(self.adjacency, v, s)
        verts = list(dist)
        local = {u: i for i, u in enumerate(verts)}
        edges = sorted(
            (local[a], local[b]) if local[a] < local[b] else (local[b], local[a])
            for a, b in self.edges
            if a in local and b in local
        )
        return RootedColoredGraph(self.k, s, tuple(self.colors[u] for u in verts), tuple(edges))

    def sub_ball(self, v: int, s: int) -> BallCode:
        return canonical_form(self.rooted_at(v, s))

    def to_bytes(self) -> bytes:
        m = self.m
        out = bytearray(struct.pack(">BIHH", _FORMAT_VERSION, self.k, self.radius, m))
        out += struct.pack(f">{m}I", *self.colors)
        pairs = m * (m - 1) // 2
        bits = _edge_bitmap(self.edges, m)
        out += bits.to_bytes((pairs + 7) // 8, "big") if pairs else b""
        return bytes(out)

    def hex(self) -> str:
        return self.to_bytes().hex()

    def key(self) -> str:
        return self.hex()

    @classmethod
    def from_bytes(cls, data: bytes) -> BallCode:
        version, k, radius, m = struct.unpack_from(">BIHH", data, 0)
        if version != _FORMAT_VERSION:
            raise GraphFormatError(f"unknown ball code version {version}")
        off = struct.calcsize(">BIHH")
        colors = struct.unpack_from(f">{m}I", data, off)
        off += 4 * m
        pairs = m * (m - 1) // 2
        nbytes = (pairs + 7) // 8
        if len(data) != off + nbytes:
            raise GraphFormatError("ball code has the wrong length")
        bits = int.from_bytes(data[off:], "big") if nbytes else 0
        pad = 8 * nbytes - pairs
        edges = []
        p = 0
        for i in range(m):
            for j in range(i + 1, m):
                if bits >> (8 * nbytes - 1 - p) & 1:
                    edges.append((i, j))
                p += 1
        if pad and bits & ((1 << pad) - 1):
            raise GraphFormatError("non-zero padding in ball code")
        return cls(k, radius, tuple(colors), tuple(edges))

    @classmethod
    def from_hex(cls, text: str) -> BallCode:
        return cls.from_bytes(bytes.fromhex(text))

    def __lt__(self, other: BallCode) -> bool:
        return self.to_bytes() < other.to_bytes()


def _edge_bitmap(edges, m: int) -> int:
    """Adjacency bitmap as an integer whose binary expansion is the row-major pair string,
    left-aligned to whole bytes so integer order matches byte order."""
    pairs = m * (m - 1) // 2
    width = 8 * ((pairs + 7) // 8)
    bits = 0
    for i, j in edges:
        p = i * m - i * (i + 1) // 2 + (j - i - 1)
        bits |= 1 << (width - 1 - p)
    return bits


# ---------------------------------------------------------------- canonical labelling


def _refine(cells: list[list[int]], adj) -> list[list[int]]:
    """Equitable refinement. Cells split in place, ordered by neighbour-cell signature."""
    while True:
        cell_of = {}
        for idx, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = idx
        new: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                new.append(cell)
                continue
            sig = {v: tuple(sorted(cell_of[u] for u in adj[v])) for v in cell}
            for s in sorted(set(sig.values())):
                new.append([v for v in cell if sig[v] == s])
        if len(new) == len(cells):
            return new
        cells = new


class _Orbits:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _canonical_order(m: int, adj, initial: list[list[int]], edges) -> list[int]:
    best_code: int | None = None
    best_order: list[int] = []
    first_code: int | None = None
    first_order: list[int] = []
    autos: list[tuple[int, ...]] = []

    def leaf(order: list[int]) -> None:
        nonlocal best_code, best_order, first_code, first_order
        pos = [0] * m
        for i, v in enumerate(order):
            pos[v] = i
        code = _edge_bitmap(((min(pos[a], pos[b]), max(pos[a], pos[b])) for a, b in edges), m)
        if first_code is None:
            first_code, first_order = code, order
            best_code, best_order = code, order
            return
        for ref_code, ref_order in ((first_code, first_order), (best_code, best_order)):
            if code == ref_code:
                perm = [0] * m
                for a, b in zip(order, ref_order):
                    perm[a] = b
                autos.append(tuple(perm))
                return
        if code < best_code:
            best_code, best_order = code, order

    def orbits_fixing(prefix: list[int]) -> _Orbits:
        orb = _Orbits(m)
        for g in autos:
            if all(g[p] == p for p in prefix):
                for v in range(m):
                    orb.union(v, g[v])
        return orb

    def search(cells: list[list[int]], prefix: list[int]) -> None:
        cells = _refine(cells, adj)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaf([c[0] for c in cells])
            return
        cell = cells[target]
        tried: list[int] = []
        for v in cell:
            if tried:
                orb = orbits_fixing(prefix)
                rv = orb.find(v)
                if any(orb.find(w) == rv for w in tried):
                    continue
            rest = [u for u in cell if u != v]
            search(cells[:target] + [[v], rest] + cells[target + 1 :], prefix + [v])
            tried.append(v)

    search(initial, [])
    return best_order


@lru_cache(maxsize=1 << 17)
def _canonical(g: RootedColoredGraph) -> BallCode:
    adj = g.adjacency
    dist = _bfs_from(adj, 0)
    groups: dict[tuple[int, int], list[int]] = {}
    for v in range(g.m):
        groups.setdefault((dist[v], g.colors[v]), []).append(v)
    initial = [groups[key] for key in sorted(groups)]
    order = _canonical_order(g.m, adj, initial, g.edges)
    pos = {v: i for i, v in enumerate(order)}
    edges = sorted((min(pos[a], pos[b]), max(pos[a], pos[b])) for a, b in g.edges)
    return BallCode(g.k, g.radius, tuple(g.colors[v] for v in order), tuple(edges))


def canonical_form(g: RootedColoredGraph, cap: int = DEFAULT_BALL_CAP) -> BallCode:
    """Canonical code: equal for two graphs iff a root- and color-preserving isomorphism exists."""
    if g.m > cap:
        raise BallSizeCapExceeded(f"ball has {g.m} vertices, cap is {cap}")
    return _canonical(g)


def ball_type(G: Graph, f: Coloring, v: int, r: int, cap: int = DEFAULT_BALL_CAP) -> BallCode:
    """Isomorphism class of the induced colored radius-r ball around ``v``."""
    B = ball(G, v, r)
    if len(B.vertices) > cap:
        raise BallSizeCapExceeded(f"ball around {v} has {len(B.vertices)} vertices, cap is {cap}")
    colors = tuple(f.colors[u] for u in B.vertices)
    return canonical_form(RootedColoredGraph(f.k, r, colors, B.edges), cap)


def has_distinct_colors(b: BallCode) -> bool:
    return len(set(b.colors)) == b.m


def truncate_ball(b: BallCode, R: int) -> BallCode:
    if not 0 <= R <= b.radius:
        raise ValueError(f"cannot truncate a radius-{b.radius} code to radius {R}")
    if R == b.radius:
        return b
    return b.sub_ball(0, R)


def forget_aux_color(b: BallCode, k: int, K: int) -> BallCode:
    """Project product colors ``(c-1)*K + aux`` onto their first coordinate in ``1..k``."""
    if k < 1 or K < 1 or b.k != k * K:
        raise ValueError(f"color count {b.k} does not factor as {k} x {K}")
    if K == 1:
        return b
    colors = tuple((c - 1) // K + 1 for c in b.colors)
    return canonical_form(RootedColoredGraph(k, b.radius, colors, b.edges), cap=max(b.m, 1))


# ---------------------------------------------------------------- stars and cherries


@dataclass(frozen=True, order=True)
class StarType:
    """Root color plus per-color leaf counts ``(n_1, ..., n_k)``."""

    root_color: int
    leaf_counts: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.root_color <= len(self.leaf_counts):
            raise GraphFormatError(f"root color {self.root_color} outside 1..{len(self.leaf_counts)}")
        if any(c < 0 for c in self.leaf_counts):
            raise GraphFormatError("negative leaf count")

    @property
    def k(self) -> int:
        return len(self.leaf_counts)

    @property
    def degree(self) -> int:
        return sum(self.leaf_counts)

    def leaf_colors(self) -> list[int]:
        """Leaf color multiset as a sorted list."""
        return [c for c, n in enumerate(self.leaf_counts, start=1) for _ in range(n)]

    def key(self) -> str:
        return f"{self.root_color}:({','.join(map(str, self.leaf_counts))})"

    @classmethod
    def from_key(cls, text: str) -> StarType:
        root, _, rest = text.partition(":")
        counts = rest.strip().removeprefix("(").removesuffix(")")
        return cls(int(root), tuple(int(x) for x in counts.split(",") if x.strip()))

    @classmethod
    def from_leaves(cls, root_color: int, leaf_colors, k: int) -> StarType:
        counts = [0] * k
        for c in leaf_colors:
            counts[c - 1] += 1
        return cls(root_color, tuple(counts))


@dataclass(frozen=True, order=True)
class CherryType:
    """Point (no leaves), rooted edge (one leaf) or two-star (sorted leaf pair)."""

    root_color: int
    leaves: tuple[int, ...]

    def __post_init__(self):
        if len(self.leaves) > 2:
            raise GraphFormatError("a cherry has at most two leaves")
        if len(self.leaves) == 2 and self.leaves[0] > self.leaves[1]:
            object.__setattr__(self, "leaves", (self.leaves[1], self.leaves[0]))

    @classmethod
    def point(cls, c: int) -> CherryType:
        return cls(c, ())

    @classmethod
    def edge(cls, c: int, leaf: int) -> CherryType:
        return cls(c, (leaf,))

    @classmethod
    def two_star(cls, c: int, a: int, b: int) -> CherryType:
        return cls(c, (min(a, b), max(a, b)))

    @property
    def kind(self) -> str:
        return "PET"[len(self.leaves)]

    def key(self) -> str:
        if not self.leaves:
            return f"P({self.root_color})"
        if len(self.leaves) == 1:
            return f"E({self.root_color}|{self.leaves[0]})"
        return f"T({self.root_color}|{{{self.leaves[0]},{self.leaves[1]}}})"

    @classmethod
    def from_key(cls, text: str) -> CherryType:
        kind, body = text[0], text[2:-1]
        if kind == "P":
            return cls.point(int(body))
        root, _, rest = body.partition("|")
        if kind == "E":
            return cls.edge(int(root), int(rest))
        a, b = rest.strip("{}").split(",")
        return cls.two_star(int(root), int(a), int(b))


def star_of(G: Graph, f: Coloring, v: int) -> StarType:
    counts = [0] * f.k
    for y in G.adj[v]:
        counts[f.colors[y] - 1] += 1
    return StarType(f.colors[v], tuple(counts))


def project_star(b: BallCode) -> StarType:
    """Forget everything in a radius-1 code except root color and neighbour color multiset."""
    if b.radius != 1:
        raise ValueError(f"expected a radius-1 code, got radius {b.radius}")
    return StarType.from_leaves(b.colors[0], (b.colors[u] for u in b.neighbours(0)), b.k)


@lru_cache(maxsize=1 << 14)
def theta_weights(A: StarType) -> tuple[tuple[CherryType, Fraction], ...]:
    """Cherry law sampled from the root of a star, as sorted (cherry, mass) pairs."""
    deg = A.degree
    if deg == 0:
        return ((CherryType.point(A.root_color), Fraction(1)),)
    if deg == 1:
        return ((CherryType.edge(A.root_color, A.leaf_colors()[0]), Fraction(1)),)
    total = comb(deg, 2)
    counts: Counter[CherryType] = Counter()
    n = A.leaf_counts
    for a in range(A.k):
        if n[a] >= 2:
            counts[CherryType.two_star(A.root_color, a + 1, a + 1)] += comb(n[a], 2)
        for b in range(a + 1, A.k):
            if n[a] and n[b]:
                counts[CherryType.two_star(A.root_color, a + 1, b + 1)] += n[a] * n[b]
    return tuple((ch, Fraction(c, total)) for ch, c in sorted(counts.items()))


def theta(A: StarType):
    """Cherry distribution of a single star."""
    from .distribution import Distribution, Universe

    return Distribution(Universe("chi", k=A.k), dict(theta_weights(A)))


def enumerate_stars(d: int, k: int) -> Iterator[StarType]:
    """Every star with root color in 1..k and at most d leaves."""

    def multisets(remaining: int, colors_left: int) -> Iterator[tuple[int, ...]]:
        if colors_left == 1:
            for c in range(remaining + 1):
                yield (c,)
            return
        for c in range(remaining + 1):
            for tail in multisets(remaining - c, colors_left - 1):
                yield (c,) + tail

    for root in range(1, k + 1):
        for counts in multisets(d, k):
            yield StarType(root, counts)


def count_stars(d: int, k: int) -> int:
    return k * comb(k + d, d)
