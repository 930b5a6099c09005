"""Exact local statistics of colored graphs: ball types, colored stars, colored cherries,
and closed-walk counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

from .canonical import (
    DEFAULT_BALL_CAP,
    CherryType,
    RootedColoredGraph,
    StarType,
    canonical_form,
    project_star,
    theta,
)
from .distribution import Distribution, Universe
from .errors import BallSizeCapExceeded
from .graph import Coloring, Graph, ball, ball_of_set

__all__ = [
    "KINDS",
    "universe_for",
    "LocalObserver",
    "tau_r",
    "sigma",
    "chi",
    "theta_pushforward",
    "project_pushforward",
    "WalkTable",
    "walk_counts",
    "walks_from",
]

KINDS = ("tau", "sigma", "chi")


def universe_for(kind: str, d: int, k: int, r: int | None = None) -> Universe:
    if kind == "tau":
        if r is None or r < 0:
            raise ValueError("tau needs a radius r >= 0")
        return Universe("tau", d=d, k=k, r=r)
    if kind == "sigma":
        return Universe("sigma", d=d, k=k)
    if kind == "chi":
        # the cherry sample space does not depend on the degree bound
        return Universe("chi", k=k)
    raise ValueError(f"unknown statistic kind {kind!r}")


@lru_cache(maxsize=1 << 12)
def _cherry_weights(deg: int) -> Fraction:
    return Fraction(1, comb(deg, 2))


class LocalObserver:
    """One statistic kind on a fixed graph, evaluated vertex by vertex for any coloring.

    ``reach`` is the radius within which a recoloring can change an observation, so
    local search only re-evaluates ``dependents(v)`` after recoloring ``v``.
    """

    def __init__(self, G: Graph, kind: str, k: int, r: int | None = None, cap: int = DEFAULT_BALL_CAP):
        self.G = G
        self.kind = kind
        self.k = k
        self.r = r
        self.cap = cap
        self.universe = universe_for(kind, G.d, k, r)
        self.reach = r if kind == "tau" else 1
        self._balls = None
        self._dependents: dict[int, tuple[int, ...]] = {}
        if kind == "tau":
            balls = [ball(G, v, r) for v in range(G.n)]
            for B in balls:
                if len(B.vertices) > cap:
                    raise BallSizeCapExceeded(f"ball around {B.root} has {len(B.vertices)} vertices, cap is {cap}")
            self._balls = balls

    def contribution(self, colors: Sequence[int], x: int) -> tuple[tuple[object, Fraction], ...]:
        """Law of the observation at root ``x``; a single atom of mass one except for cherries."""
        if self.kind == "tau":
            B = self._balls[x]
            g = RootedColoredGraph(self.k, self.r, tuple(colors[u] for u in B.vertices), B.edges)
            return ((canonical_form(g, self.cap), Fraction(1)),)
        nbrs = self.G.adj[x]
        if self.kind == "sigma":
            counts = [0] * self.k
            for y in nbrs:
                counts[colors[y] - 1] += 1
            return ((StarType(colors[x], tuple(counts)), Fraction(1)),)
        c = colors[x]
        if not nbrs:
            return ((CherryType.point(c), Fraction(1)),)
        if len(nbrs) == 1:
            return ((CherryType.edge(c, colors[nbrs[0]]), Fraction(1)),)
        w = _cherry_weights(len(nbrs))
        acc: dict[CherryType, Fraction] = {}
        for y, z in combinations(nbrs, 2):
            ch = CherryType.two_star(c, colors[y], colors[z])
            acc[ch] = acc.get(ch, Fraction(0)) + w
        return tuple(acc.items())

    def dependents(self, v: int) -> tuple[int, ...]:
        deps = self._dependents.get(v)
        if deps is None:
            deps = ball_of_set(self.G, [v], self.reach)
            self._dependents[v] = deps
        return deps

    def masses(self, colors: Sequence[int]) -> dict:
        """Unnormalized atom masses (sum equals n)."""
        acc: dict = {}
        for x in range(self.G.n):
            for atom, p in self.contribution(colors, x):
                acc[atom] = acc.get(atom, 0) + p
        return acc

    def distribution(self, colors: Sequence[int]) -> Distribution:
        n = self.G.n
        return Distribution(self.universe, {a: Fraction(p) / n for a, p in self.masses(colors).items()})


def _check(G: Graph, f: Coloring) -> None:
    if len(f.colors) != G.n:
        raise ValueError(f"coloring has {len(f.colors)} entries for {G.n} vertices")
    if G.n == 0:
        raise ValueError("statistics of the empty graph are undefined")


def tau_r(G: Graph, f: Coloring, r: int, cap: int = DEFAULT_BALL_CAP) -> Distribution:
    """Law of the colored radius-r ball type of a uniform random root."""
    _check(G, f)
    return LocalObserver(G, "tau", f.k, r, cap).distribution(f.colors)


def sigma(G: Graph, f: Coloring) -> Distribution:
    """Colored degree distribution."""
    _check(G, f)
    return LocalObserver(G, "sigma", f.k).distribution(f.colors)


def chi(G: Graph, f: Coloring) -> Distribution:
    """Colored cherry distribution, computed straight from the sampling rule."""
    _check(G, f)
    return LocalObserver(G, "chi", f.k).distribution(f.colors)


def theta_pushforward(s: Distribution) -> Distribution:
    """Cherry law induced by a star law."""
    if s.universe.kind != "sigma":
        raise ValueError("theta_pushforward expects a star distribution")
    return s.pushforward(theta, Universe("chi", k=s.universe.k))


def project_pushforward(t: Distribution) -> Distribution:
    """Star law induced by a radius-1 ball-type law."""
    u = t.universe
    if u.kind != "tau" or u.r != 1:
        raise ValueError("project_pushforward expects a radius-1 ball distribution")
    return t.pushforward(project_star, Universe("sigma", d=u.d, k=u.k))


# ---------------------------------------------------------------- walks


def walks_from(adj: Sequence[Sequence[int]], x: int, T: int) -> tuple[list[int], list[int]]:
    """Numbers of length-t walks and closed walks from ``x`` for t = 0..T (sparse DP)."""
    w = {x: 1}
    totals, closed = [1], [1]
    for _ in range(T):
        nxt: dict[int, int] = {}
        for v, c in w.items():
            for u in adj[v]:
                nxt[u] = nxt.get(u, 0) + c
        w = nxt
        totals.append(sum(w.values()))
        closed.append(w.get(x, 0))
    return totals, closed


@dataclass(frozen=True)
class WalkTable:
    """``total[t][x] = |W_t(x)|`` and ``closed[t][x] = |W_t^0(x)|`` for t = 0..T."""

    T: int
    total: tuple[tuple[int, ...], ...]
    closed: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.total[0])

    def c(self, t: int) -> Fraction:
        """Mean number of closed walks of length t at a uniform random root."""
        return Fraction(sum(self.closed[t]), self.n)

    def averages(self) -> dict[int, Fraction]:
        return {t: self.c(t) for t in range(1, self.T + 1)}

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "total": [list(row) for row in self.total],
            "closed": [list(row) for row in self.closed],
            "c": {str(t): f"{q.numerator}/{q.denominator}" for t, q in self.averages().items()},
        }


def walk_counts(G: Graph, T: int) -> WalkTable:
    if T < 0:
        raise ValueError("walk length must be non-negative")
    if G.n == 0:
        raise ValueError("walk counts of the empty graph are undefined")
    per_vertex = [walks_from(G.adj, x, T) for x in range(G.n)]
    total = tuple(tuple(pv[0][t] for pv in per_vertex) for t in range(T + 1))
    closed = tuple(tuple(pv[1][t] for pv in per_vertex) for t in range(T + 1))
    return WalkTable(T, total, closed)
