"""Finite bounded-degree graphs: representation, generators, BFS utilities and text I/O.

Vertices are dense 0-based integers. A :class:`Graph` carries a declared degree
bound ``d`` which fixes the atom universe of every local statistic computed on it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, InfeasibleParameters

__all__ = [
    "Graph",
    "Coloring",
    "Ball",
    "load_graph",
    "dump_graph",
    "load_coloring",
    "dump_coloring",
    "bfs_distances",
    "ball",
    "ball_of_set",
    "ball_volume_bound",
    "power_graph",
    "generate",
    "cycle",
    "path",
    "complete",
    "star",
    "grid_torus",
    "random_regular",
    "random_bounded",
    "disjoint_union",
    "relabel",
    "check_mass_transport",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency tuples and a declared degree bound."""

    n: int
    d: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise GraphFormatError("adjacency length does not match vertex count")
        if self.d < 0:
            raise GraphFormatError("degree bound must be non-negative")
        for v, nbrs in enumerate(self.adj):
            if len(nbrs) > self.d:
                raise GraphFormatError(f"vertex {v} has degree {len(nbrs)} > declared d={self.d}")
            prev = -1
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise GraphFormatError(f"neighbour {u} of {v} out of range")
                if u == v:
                    raise GraphFormatError(f"self-loop at {v}")
                if u <= prev:
                    raise GraphFormatError(f"adjacency of {v} not strictly increasing")
                prev = u
        for v, nbrs in enumerate(self.adj):
            for u in nbrs:
                if v not in self.adj[u]:
                    raise GraphFormatError(f"edge {v}-{u} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], d: int | None = None) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphFormatError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            if v in nbrs[u]:
                raise GraphFormatError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        observed = max((len(s) for s in nbrs), default=0)
        return cls(n, observed if d is None else d, tuple(tuple(sorted(s)) for s in nbrs))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def with_degree_bound(self, d: int) -> Graph:
        return Graph(self.n, d, self.adj)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = list(bfs_distances(self, s))
            for v in comp:
                seen[v] = True
            comps.append(sorted(comp))
        return comps


@dataclass(frozen=True)
class Coloring:
    """Total map from vertices to colors ``1..k``."""

    k: int
    colors: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise GraphFormatError("a coloring needs at least one color")
        for v, c in enumerate(self.colors):
            if not 1 <= c <= self.k:
                raise GraphFormatError(f"color {c} of vertex {v} outside 1..{self.k}")

    @classmethod
    def constant(cls, n: int, k: int = 1, color: int = 1) -> Coloring:
        return cls(k, (color,) * n)

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, v: int) -> int:
        return self.colors[v]


@dataclass(frozen=True)
class Ball:
    """Rooted induced radius-r ball. ``vertices[0]`` is the root; order is BFS order."""

    root: int
    radius: int
    vertices: tuple[int, ...]
    dist: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]  # local indices, i < j


# ---------------------------------------------------------------- text I/O


def _content_lines(text: str) -> list[list[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def _ints(row: list[str], lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in row]
    except ValueError:
        raise GraphFormatError(f"line {lineno}: expected integers, got {' '.join(row)!r}") from None


def load_graph(text: str) -> Graph:
    """Parse the edge-list format: header ``n m [d]`` then ``m`` lines ``u v``."""
    rows = _content_lines(text)
    if not rows:
        raise GraphFormatError("empty graph file")
    header = _ints(rows[0], 1)
    if len(header) not in (2, 3):
        raise GraphFormatError("header must be 'n m' or 'n m d'")
    n, m = header[0], header[1]
    if n < 0 or m < 0:
        raise GraphFormatError("negative n or m in header")
    body = rows[1:]
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}")
    edges = []
    for i, row in enumerate(body, start=2):
        pair = _ints(row, i)
        if len(pair) != 2:
            raise GraphFormatError(f"line {i}: an edge needs exactly two endpoints")
        edges.append((pair[0], pair[1]))
    d = header[2] if len(header) == 3 else None
    return Graph.from_edges(n, edges, d)


def dump_graph(G: Graph) -> str:
    lines = [f"{G.n} {G.num_edges} {G.d}"]
    lines += [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def load_coloring(text: str, n: int) -> Coloring:
    """Parse a coloring file: header ``k`` then ``n`` lines ``v c``."""
    rows = _content_lines(text)
    if not rows:
        raise GraphFormatError("empty coloring file")
    header = _ints(rows[0], 1)
    if len(header) != 1:
        raise GraphFormatError("coloring header must be a single integer k")
    k = header[0]
    colors: list[int | None] = [None] * n
    for i, row in enumerate(rows[1:], start=2):
        pair = _ints(row, i)
        if len(pair) != 2:
            raise GraphFormatError(f"line {i}: expected 'v c'")
        v, c = pair
        if not 0 <= v < n:
            raise GraphFormatError(f"line {i}: vertex {v} out of range")
        if colors[v] is not None:
            raise GraphFormatError(f"line {i}: vertex {v} colored twice")
        colors[v] = c
    missing = [v for v, c in enumerate(colors) if c is None]
    if missing:
        raise GraphFormatError(f"coloring is not total; first uncolored vertex {missing[0]}")
    return Coloring(k, tuple(colors))  # type: ignore[arg-type]


def dump_coloring(f: Coloring) -> str:
    return "\n".join([str(f.k)] + [f"{v} {c}" for v, c in enumerate(f.colors)]) + "\n"


# ---------------------------------------------------------------- BFS primitives


def bfs_distances(G: Graph, source: int | Iterable[int], limit: int | None = None) -> dict[int, int]:
    """Distances from a source vertex (or set) to every vertex within ``limit`` steps.

    The returned dict preserves BFS discovery order.
    """
    sources = [source] if isinstance(source, (int, np.integer)) else sorted(set(source))
    dist = {int(s): 0 for s in sources}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        dv = dist[v]
        if limit is not None and dv >= limit:
            continue
        for u in G.adj[v]:
            if u not in dist:
                dist[u] = dv + 1
                queue.append(u)
    return dist


def ball(G: Graph, v: int, r: int) -> Ball:
    if not 0 <= v < G.n:
        raise ValueError(f"vertex {v} out of range")
    if r < 0:
        raise ValueError("radius must be non-negative")
    dist = bfs_distances(G, v, r)
    verts = tuple(dist)
    local = {u: i for i, u in enumerate(verts)}
    edges = []
    for i, u in enumerate(verts):
        for w in G.adj[u]:
            j = local.get(w)
            if j is not None and i < j:
                edges.append((i, j))
    return Ball(v, r, verts, tuple(dist[u] for u in verts), tuple(sorted(edges)))


def ball_of_set(G: Graph, U: Iterable[int], r: int) -> tuple[int, ...]:
    """Union of the radius-r balls around the vertices of ``U``, sorted."""
    U = list(U)
    if not U:
        return ()
    return tuple(sorted(bfs_distances(G, U, r)))


def ball_volume_bound(d: int, r: int) -> int:
    """``1 + d + ... + d^r``: the most vertices a radius-r ball can hold."""
    return sum(d**i for i in range(r + 1))


def power_graph(G: Graph, t: int) -> Graph:
    """Graph on the same vertices joining pairs at distance 1..t."""
    if t < 1:
        raise ValueError("power must be at least 1")
    adj = []
    for v in range(G.n):
        adj.append(tuple(sorted(u for u in bfs_distances(G, v, t) if u != v)))
    observed = max((len(a) for a in adj), default=0)
    return Graph(G.n, observed, tuple(adj))


def relabel(G: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex ``v`` renamed ``perm[v]``."""
    return Graph.from_edges(G.n, [(perm[u], perm[v]) for u, v in G.edges()], G.d)


def check_mass_transport(G: Graph, A: Iterable[int], B: Iterable[int]) -> tuple[Fraction, Fraction]:
    """Both sides of the mass-transport identity under the uniform vertex measure."""
    A, B = set(A), set(B)
    n = G.n
    if n == 0:
        return Fraction(0), Fraction(0)
    lhs = sum(sum(1 for y in G.adj[x] if y in B) for x in A)
    rhs = sum(sum(1 for y in G.adj[x] if y in A) for x in B)
    return Fraction(lhs, n), Fraction(rhs, n)


# ---------------------------------------------------------------- generators


def cycle(n: int) -> Graph:
    if n < 3:
        raise InfeasibleParameters("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise InfeasibleParameters("a path needs at least 1 vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 1:
        raise InfeasibleParameters("a complete graph needs at least 1 vertex")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    if leaves < 0:
        raise InfeasibleParameters("negative leaf count")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def grid_torus(rows: int, cols: int) -> Graph:
    if rows < 3 or cols < 3:
        raise InfeasibleParameters("torus sides must be at least 3 to stay simple")
    idx = lambda i, j: i * cols + j  # noqa: E731
    edges = []
    for i in range(rows):
        for j in range(cols):
            edges.append((idx(i, j), idx(i, (j + 1) % cols)))
            edges.append((idx(i, j), idx((i + 1) % rows, j)))
    return Graph.from_edges(rows * cols, edges)


def random_regular(n: int, d: int, seed: int = 0, max_tries: int = 100_000) -> Graph:
    """Configuration model; the whole pairing is resampled on any loop or multi-edge."""
    if n < 1 or d < 0 or (n * d) % 2 or (0 < d and d >= n):
        raise InfeasibleParameters(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(lo == hi):
            continue
        keys = lo * n + hi
        if len(np.unique(keys)) != len(keys):
            continue
        return Graph.from_edges(n, zip(lo.tolist(), hi.tolist()), d)
    raise InfeasibleParameters(f"configuration model failed {max_tries} times for n={n}, d={d}")


def random_bounded(n: int, d: int, seed: int = 0, density: float = 0.5) -> Graph:
    """Random graph with maximum degree at most ``d``.

    Proposes ``density * n * d / 2`` uniform vertex pairs and keeps each one that is
    new, not a loop, and fits under the degree bound. The declared bound is ``d``.
    """
    if n < 1 or d < 0 or not 0 <= density <= 1:
        raise InfeasibleParameters(f"bad random_bounded parameters n={n}, d={d}, density={density}")
    rng = np.random.default_rng(seed)
    deg = [0] * n
    seen = set()
    for _ in range(int(density * n * d / 2)):
        u, v = (int(a) for a in rng.integers(0, n, size=2))
        if u == v or deg[u] >= d or deg[v] >= d:
            continue
        e = (min(u, v), max(u, v))
        if e in seen:
            continue
        seen.add(e)
        deg[u] += 1
        deg[v] += 1
    return Graph.from_edges(n, sorted(seen), d)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for H in graphs:
        edges += [(u + offset, v + offset) for u, v in H.edges()]
        offset += H.n
    return Graph.from_edges(offset, edges, max((H.d for H in graphs), default=0))


_FAMILIES = {
    "cycle": cycle,
    "path": path,
    "complete": complete,
    "star": star,
    "grid_torus": grid_torus,
}


def generate(family: str, params: Sequence, seed: int = 0) -> Graph:
    """Dispatch by family name. ``disjoint_union`` takes already built graphs as params."""
    if family == "random_regular":
        n, d = params
        return random_regular(int(n), int(d), seed)
    if family == "random_bounded":
        n, d = params[:2]
        return random_bounded(int(n), int(d), seed, *(float(p) for p in params[2:]))
    if family == "disjoint_union":
        return disjoint_union(*params)
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise InfeasibleParameters(f"unknown family {family!r}") from None
    return builder(*(int(p) for p in params))
