"""Model assignments and the checks built on them.

A *ball model* assigns to every vertex a rooted colored ball with pairwise distinct
colors, proposed as a picture of the vertex's true neighbourhood. A *star model*
assigns a proposed colored star. This module decides, exactly and vertex by vertex,
whether such proposals agree with each other and with the graph:

* consistency of ball models across edges and the walk lifting it enables,
* closed-walk comparison and reconstruction of the true ball from a model,
* cherry-consistency of star models, the leaf injection, and a degree audit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

from .canonical import (
    BallCode,
    CherryType,
    StarType,
    ball_type,
    star_of,
    truncate_ball,
)
from .distribution import format_fraction, tv_distance
from .errors import InternalContradiction, PreconditionError
from .graph import Coloring, Graph, ball_of_set, bfs_distances
from .search import verify_separation
from .statistics import chi, sigma, walks_from

__all__ = [
    "BallModel",
    "StarModel",
    "Codebook",
    "true_model",
    "true_star_model",
    "consistent_star",
    "is_consistent_at",
    "ConsistencyReport",
    "consistency_report",
    "DefectSet",
    "consistency_defect_set",
    "bad_star_mass",
    "LiftResult",
    "lift_walk",
    "model_walks",
    "graph_walks",
    "closed_walk_comparison",
    "ReconstructionResult",
    "reconstruct_ball",
    "is_cherry_consistent_at",
    "CherryInjection",
    "cherry_injection",
    "admissible_cherries",
    "is_admissible",
    "inadmissible_mass",
    "DegreeAudit",
    "average_degree_audit",
]


# ---------------------------------------------------------------- model containers


@dataclass(frozen=True)
class BallModel:
    """Per-vertex ball codes of a common radius and color count, each with distinct colors."""

    codes: tuple[BallCode, ...]

    def __post_init__(self):
        if self.codes:
            r, k = self.codes[0].radius, self.codes[0].k
            for v, b in enumerate(self.codes):
                if b.radius != r or b.k != k:
                    raise ValueError(f"model at vertex {v} has radius/k {b.radius}/{b.k}, expected {r}/{k}")
                if len(set(b.colors)) != b.m:
                    raise ValueError(f"model at vertex {v} repeats a color")

    @property
    def r(self) -> int:
        return self.codes[0].radius

    @property
    def k(self) -> int:
        return self.codes[0].k

    def __len__(self) -> int:
        return len(self.codes)

    def __getitem__(self, v: int) -> BallCode:
        return self.codes[v]

    def root_coloring(self) -> Coloring:
        """The root-color map ``s``: each vertex gets the root color of its model."""
        return Coloring(self.k, tuple(b.root_color for b in self.codes))


@dataclass(frozen=True)
class StarModel:
    stars: tuple[StarType, ...]

    def __post_init__(self):
        ks = {a.k for a in self.stars}
        if len(ks) > 1:
            raise ValueError("stars of a model must share the color count")

    @property
    def k(self) -> int:
        return self.stars[0].k

    def __len__(self) -> int:
        return len(self.stars)

    def __getitem__(self, v: int) -> StarType:
        return self.stars[v]

    def root_coloring(self) -> Coloring:
        return Coloring(self.k, tuple(a.root_color for a in self.stars))


class Codebook:
    """Bijection between a finite set of model values and the colors ``1..a``."""

    def __init__(self, values: Iterable):
        self.values = tuple(sorted(set(values), key=lambda v: v.key()))
        self._index = {v: i + 1 for i, v in enumerate(self.values)}

    def __len__(self) -> int:
        return len(self.values)

    def color(self, value) -> int:
        return self._index[value]

    def decode(self, color: int):
        return self.values[color - 1]

    def encode(self, values: Sequence) -> Coloring:
        return Coloring(len(self.values), tuple(self._index[v] for v in values))


# ---------------------------------------------------------------- consistency


def true_model(G: Graph, g: Coloring, r: int) -> BallModel:
    """Assign every vertex its own colored radius-r ball."""
    if not verify_separation(G, g, r):
        raise PreconditionError(f"coloring does not separate every radius-{r} ball")
    return BallModel(tuple(ball_type(G, g, x, r, cap=max(64, G.n)) for x in range(G.n)))


def true_star_model(G: Graph, g: Coloring) -> StarModel:
    return StarModel(tuple(star_of(G, g, x) for x in range(G.n)))


def consistent_star(root: BallCode, neighbour_models: Sequence[BallCode]) -> dict[int, int] | None:
    """Check consistency from star data alone.

    ``root`` is the model at a vertex and ``neighbour_models`` the models at its
    actual neighbours, in any order. Returns the bijection from root-neighbours of
    the model to positions in ``neighbour_models``, or None when none exists.
    Colors are distinct, so the only candidate matches colors to root colors.
    """
    r = root.radius
    if r < 1:
        raise PreconditionError("consistency needs radius at least 1")
    nbrs = root.neighbours(0)
    if len(nbrs) != len(neighbour_models):
        return None
    by_color: dict[int, int] = {}
    for i, M in enumerate(neighbour_models):
        if M.root_color in by_color:
            return None
        by_color[M.root_color] = i
    b = {}
    for v in nbrs:
        i = by_color.get(root.colors[v])
        if i is None:
            return None
        if root.sub_ball(v, r - 1) != truncate_ball(neighbour_models[i], r - 1):
            return None
        b[v] = i
    return b


def is_consistent_at(G: Graph, m: BallModel, x: int) -> tuple[bool, dict[int, int] | None]:
    """Consistency at ``x`` with the bijection (model root-neighbour -> graph neighbour)."""
    nbrs = G.adj[x]
    b = consistent_star(m[x], [m[y] for y in nbrs])
    if b is None:
        return False, None
    return True, {v: nbrs[i] for v, i in b.items()}


@dataclass(frozen=True)
class ConsistencyReport:
    flags: tuple[bool, ...]
    bijections: tuple[dict[int, int] | None, ...]
    radius: int

    @property
    def defect(self) -> tuple[int, ...]:
        return tuple(x for x, ok in enumerate(self.flags) if not ok)

    def consistent_on(self, vertices: Iterable[int]) -> bool:
        return all(self.flags[v] for v in vertices)

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "defect": list(self.defect),
            "bijections": [sorted(b.items()) if b is not None else None for b in self.bijections],
        }


def consistency_report(G: Graph, m: BallModel) -> ConsistencyReport:
    if len(m) != G.n:
        raise ValueError("model length does not match the graph")
    results = [is_consistent_at(G, m, x) for x in range(G.n)]
    return ConsistencyReport(tuple(ok for ok, _ in results), tuple(b for _, b in results), m.r)


class DefectSet(NamedTuple):
    defect: tuple[int, ...]
    neighbourhood: tuple[int, ...]


def consistency_defect_set(G: Graph, m: BallModel) -> DefectSet:
    """Vertices where ``m`` is inconsistent, and their radius-r neighbourhood.

    Every vertex outside the neighbourhood sees a fully consistent radius-r ball.
    """
    U = consistency_report(G, m).defect
    return DefectSet(U, ball_of_set(G, U, m.r))


def bad_star_mass(G: Graph, m: BallModel) -> Fraction:
    """Mass of star types (model colors as colors) that fail the consistency check."""
    book = Codebook(m.codes)
    law = sigma(G, book.encode(m.codes))

    def bad(A: StarType) -> bool:
        leaves = [book.decode(c) for c in A.leaf_colors()]
        return consistent_star(book.decode(A.root_color), leaves) is None

    return law.mass(bad)


# ---------------------------------------------------------------- walk lifting


def _color_iso(A: BallCode, a: int, B: BallCode, s: int) -> dict[int, int] | None:
    """Color-matching isomorphism from the radius-s ball around ``a`` in A onto the
    radius-s ball around the root of B, if it is one."""
    da = _code_distances(A, a, s)
    db = _code_distances(B, 0, s)
    if len(da) != len(db):
        return None
    kappa = {}
    where = B.vertex_of_color
    for u in da:
        w = where.get(A.colors[u])
        if w is None or w not in db:
            return None
        kappa[u] = w
    if kappa[a] != 0:
        return None
    for u in da:
        image_nbrs = {kappa[z] for z in A.neighbours(u) if z in da}
        if image_nbrs != {z for z in B.neighbours(kappa[u]) if z in db}:
            return None
    return kappa


def _code_distances(b: BallCode, v: int, limit: int) -> dict[int, int]:
    dist = {v: 0}
    frontier = [v]
    while frontier:
        nxt = []
        for u in frontier:
            if dist[u] >= limit:
                continue
            for w in b.neighbours(u):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


@dataclass(frozen=True)
class LiftResult:
    model_walk: tuple[int, ...]
    graph_walk: tuple[int, ...]
    evidence: tuple[BallCode, ...]  # common code of the radius-(r-i) balls at step i


def _require_consistent_ball(G: Graph, m: BallModel, x: int, report: ConsistencyReport | None) -> ConsistencyReport:
    report = report if report is not None else consistency_report(G, m)
    bad = [v for v in ball_of_set(G, [x], m.r) if not report.flags[v]]
    if bad:
        raise PreconditionError(f"model is not consistent at {bad[0]} within radius {m.r} of {x}")
    return report


def lift_walk(
    G: Graph,
    m: BallModel,
    x: int,
    walk: Sequence[int],
    report: ConsistencyReport | None = None,
) -> LiftResult:
    """Lift a walk in the model ``m(x)`` that starts at its root to a walk in G from ``x``."""
    report = _require_consistent_ball(G, m, x, report)
    M = m[x]
    r = M.radius
    walk = tuple(walk)
    t = len(walk) - 1
    if t < 0 or walk[0] != 0:
        raise PreconditionError("model walks start at the root 0")
    if t > r:
        raise PreconditionError(f"walk length {t} exceeds the model radius {r}")
    for a, b in zip(walk, walk[1:]):
        if b not in M.neighbours(a):
            raise PreconditionError(f"({a}, {b}) is not an edge of the model")
    xs = [x]
    kappa = {u: u for u in range(M.m)}
    evidence = [M]
    for i in range(1, t + 1):
        prev = xs[-1]
        u = kappa[walk[i]]
        b = report.bijections[prev]
        if u not in b:
            raise InternalContradiction(f"step {i}: image {u} is not a root-neighbour of m({prev})")
        xi = b[u]
        kappa = _color_iso(M, walk[i], m[xi], r - i)
        if kappa is None:
            raise InternalContradiction(f"step {i}: radius-{r - i} balls of model vertex {walk[i]} and m({xi}) differ")
        xs.append(xi)
        evidence.append(truncate_ball(m[xi], r - i))
    return LiftResult(walk, tuple(xs), tuple(evidence))


def _walks(adj, start: int, t: int) -> Iterator[tuple[int, ...]]:
    stack = [(start,)]
    while stack:
        w = stack.pop()
        if len(w) == t + 1:
            yield w
            continue
        for u in reversed(adj[w[-1]]):
            stack.append(w + (u,))


def model_walks(M: BallCode, t: int) -> Iterator[tuple[int, ...]]:
    """All length-t walks in a model starting at its root (literal enumeration)."""
    return _walks(M.adjacency, 0, t)


def graph_walks(G: Graph, x: int, t: int) -> Iterator[tuple[int, ...]]:
    return _walks(G.adj, x, t)


class ClosedWalkRow(NamedTuple):
    t: int
    model: int
    graph: int
    equal: bool


def closed_walk_comparison(
    G: Graph, m: BallModel, x: int, T: int, report: ConsistencyReport | None = None
) -> list[ClosedWalkRow]:
    """Closed-walk counts at the model root and at ``x`` for t = 1..T.

    Under consistency the graph count never exceeds the model count.
    """
    _require_consistent_ball(G, m, x, report)
    if not 1 <= T <= m.r:
        raise PreconditionError(f"T must lie in 1..{m.r}")
    _, model_closed = walks_from(m[x].adjacency, 0, T)
    _, graph_closed = walks_from(G.adj, x, T)
    rows = []
    for t in range(1, T + 1):
        if graph_closed[t] > model_closed[t]:
            raise InternalContradiction(f"t={t}: {graph_closed[t]} closed walks in G exceed {model_closed[t]} in the model")
        rows.append(ClosedWalkRow(t, model_closed[t], graph_closed[t], model_closed[t] == graph_closed[t]))
    return rows


# ---------------------------------------------------------------- reconstruction


@dataclass(frozen=True)
class ReconstructionResult:
    success: bool
    phi: dict[int, int] = field(default_factory=dict)
    reason: str | None = None
    violating: tuple | None = None
    model_code: BallCode | None = None
    graph_code: BallCode | None = None

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "phi": sorted(self.phi.items()),
            "reason": self.reason,
            "violating": [list(w) for w in self.violating] if self.violating else None,
            "model_code": self.model_code.hex() if self.model_code else None,
            "graph_code": self.graph_code.hex() if self.graph_code else None,
        }


def reconstruct_ball(
    G: Graph, m: BallModel, x: int, t: int, report: ConsistencyReport | None = None
) -> ReconstructionResult:
    """Rebuild the true colored radius-(t-1) ball of ``x`` from the model ``m(x)``.

    Requires ``1 <= t`` and ``3t < r`` exactly, consistency on the radius-r ball of
    ``x``, and equal closed-walk counts for every length 1..r; each is checked and
    raises PreconditionError. The map is built by lifting *every* model walk of
    length at most t, so endpoint agreement is checked for all walk pairs.
    A returned failure means a verification step broke despite the preconditions.
    """
    r = m.r
    if t < 1 or 3 * t >= r:
        raise PreconditionError(f"need 1 <= t < r/3, got t={t}, r={r}")
    report = _require_consistent_ball(G, m, x, report)
    for row in closed_walk_comparison(G, m, x, r, report):
        if not row.equal:
            raise PreconditionError(f"closed-walk counts differ at length {row.t}: model {row.model}, graph {row.graph}")
    M = m[x]
    s = m.root_coloring()

    phi: dict[int, int] = {}
    witness: dict[int, tuple[int, ...]] = {}
    for length in range(t + 1):
        for w in model_walks(M, length):
            end = lift_walk(G, m, x, w, report).graph_walk[-1]
            v = w[-1]
            if v not in phi:
                phi[v], witness[v] = end, w
            elif phi[v] != end:
                return ReconstructionResult(False, phi, "lift endpoint depends on the walk", (witness[v], w))

    model_depth = M.depth
    graph_dist = bfs_distances(G, x, t)
    for v, y in phi.items():
        if M.colors[v] != s[y]:
            return ReconstructionResult(False, phi, f"color of model vertex {v} differs from s({y})")
        if graph_dist.get(y) != model_depth[v]:
            return ReconstructionResult(False, phi, f"distance of model vertex {v} not preserved")
    if len(set(phi.values())) != len(phi):
        return ReconstructionResult(False, phi, "phi is not injective")
    if set(phi.values()) != set(graph_dist):
        return ReconstructionResult(False, phi, "phi misses part of the radius-t ball")

    inner = {v for v in phi if model_depth[v] <= t - 1}
    model_edges = {frozenset((phi[a], phi[b])) for a in inner for b in M.neighbours(a) if b in inner}
    inner_g = {phi[v] for v in inner}
    graph_edges = {frozenset((a, b)) for a in inner_g for b in G.adj[a] if b in inner_g}
    if model_edges != graph_edges:
        return ReconstructionResult(False, phi, "phi does not preserve edges of the radius-(t-1) balls")

    model_code = truncate_ball(M, t - 1)
    graph_code = ball_type(G, s, x, t - 1, cap=max(64, G.n))
    if model_code != graph_code:
        return ReconstructionResult(False, phi, "canonical codes of the two balls differ")
    return ReconstructionResult(True, phi, None, None, model_code, graph_code)


# ---------------------------------------------------------------- cherries


def _proposed_root_colors(G: Graph, m: StarModel, x: int) -> list[int]:
    return [m[y].root_color for y in G.adj[x]]


def _contained(pair: Sequence[int], A: StarType) -> bool:
    need: dict[int, int] = {}
    for c in pair:
        need[c] = need.get(c, 0) + 1
    return all(1 <= c <= A.k and A.leaf_counts[c - 1] >= q for c, q in need.items())


def is_cherry_consistent_at(G: Graph, m: StarModel, x: int) -> bool:
    """Every cherry that can be sampled at ``x`` fits the proposed star ``m(x)``."""
    A = m[x]
    cols = _proposed_root_colors(G, m, x)
    if not cols:
        return A.degree == 0
    if len(cols) == 1:
        return _contained(cols, A)
    return all(_contained((cols[i], cols[j]), A) for i in range(len(cols)) for j in range(i + 1, len(cols)))


@dataclass(frozen=True)
class CherryInjection:
    """``injection`` sends a graph neighbour to a leaf ``(color, copy)`` of ``m(x)``."""

    injection: dict[int, tuple[int, int]]
    graph_degree: int
    model_degree: int
    star_equal: bool  # degrees agree, hence m(x) is the true star under the root colors


def cherry_injection(G: Graph, m: StarModel, x: int) -> CherryInjection:
    if not is_cherry_consistent_at(G, m, x):
        raise PreconditionError(f"model is not cherry-consistent at {x}")
    cols = _proposed_root_colors(G, m, x)
    if len(set(cols)) != len(cols):
        raise PreconditionError(f"two neighbours of {x} share a proposed root color")
    A = m[x]
    inj = {}
    for y, c in zip(G.adj[x], cols):
        if not 1 <= c <= A.k or A.leaf_counts[c - 1] < 1:
            raise InternalContradiction(f"m({x}) has no leaf of color {c} for neighbour {y}")
        inj[y] = (c, 0)
    if len(cols) > A.degree:
        raise InternalContradiction("injection larger than the model star")
    equal = len(cols) == A.degree
    if equal and star_of(G, m.root_coloring(), x) != A:
        raise InternalContradiction(f"degrees agree at {x} but m({x}) is not the true star")
    return CherryInjection(inj, len(cols), A.degree, equal)


def is_admissible(cherry: CherryType, book: Codebook) -> bool:
    """Admissibility of a cherry whose colors index stars through ``book``."""
    A = book.decode(cherry.root_color)
    if not cherry.leaves:
        return A.degree == 0
    return _contained([book.decode(c).root_color for c in cherry.leaves], A)


def admissible_cherries(book: Codebook) -> frozenset[CherryType]:
    """All admissible cherry outcomes over the alphabet ``book`` (colors 1..len(book))."""
    a = len(book)
    out = set()
    for root in range(1, a + 1):
        candidates = [CherryType.point(root)]
        candidates += [CherryType.edge(root, b) for b in range(1, a + 1)]
        candidates += [CherryType.two_star(root, b, c) for b in range(1, a + 1) for c in range(b, a + 1)]
        out.update(ch for ch in candidates if is_admissible(ch, book))
    return frozenset(out)


def inadmissible_mass(G: Graph, m: StarModel, book: Codebook | None = None) -> Fraction:
    book = book or Codebook(m.stars)
    law = chi(G, book.encode(m.stars))
    return law.mass(lambda ch: not is_admissible(ch, book))


@dataclass(frozen=True)
class DegreeAudit:
    mean_model_degree: Fraction
    mean_graph_degree: Fraction
    ref_mean_model_degree: Fraction
    ref_mean_graph_degree: Fraction
    root_marginal_degree: Fraction
    cherry_tv: Fraction
    good: tuple[int, ...]
    gap: dict[int, int]
    positive_gap: tuple[int, ...]

    def to_json(self) -> dict:
        f = format_fraction
        return {
            "mean_model_degree": f(self.mean_model_degree),
            "mean_graph_degree": f(self.mean_graph_degree),
            "ref_mean_model_degree": f(self.ref_mean_model_degree),
            "ref_mean_graph_degree": f(self.ref_mean_graph_degree),
            "root_marginal_degree": f(self.root_marginal_degree),
            "cherry_tv": f(self.cherry_tv),
            "good": list(self.good),
            "gap": sorted(self.gap.items()),
            "positive_gap": list(self.positive_gap),
        }


def average_degree_audit(G: Graph, G2: Graph, m: StarModel, m2: StarModel) -> DegreeAudit:
    """Compare a proposed star model on G with a true separated star model on G2."""
    rho2 = m2.root_coloring()
    if any(star_of(G2, rho2, y) != m2[y] for y in range(G2.n)):
        raise PreconditionError("reference model is not the true star model of its root colors")
    if not verify_separation(G2, rho2, 1):
        raise PreconditionError("reference root colors do not separate radius-1 balls")
    n, n2 = G.n, G2.n
    good, gap = [], {}
    for x in range(n):
        cols = _proposed_root_colors(G, m, x)
        if len(set(cols)) == len(cols) and is_cherry_consistent_at(G, m, x):
            good.append(x)
            g = m[x].degree - G.degree(x)
            if g < 0:
                raise InternalContradiction(f"degree of m({x}) below the graph degree on the good set")
            gap[x] = g
    book = Codebook(list(m.stars) + list(m2.stars))
    law, law2 = chi(G, book.encode(m.stars)), chi(G2, book.encode(m2.stars))
    root_marginal = sum((p * book.decode(ch.root_color).degree for ch, p in law.items()), Fraction(0))
    return DegreeAudit(
        mean_model_degree=Fraction(sum(a.degree for a in m.stars), n),
        mean_graph_degree=Fraction(2 * G.num_edges, n),
        ref_mean_model_degree=Fraction(sum(a.degree for a in m2.stars), n2),
        ref_mean_graph_degree=Fraction(2 * G2.num_edges, n2),
        root_marginal_degree=root_marginal,
        cherry_tv=tv_distance(law, law2),
        good=tuple(good),
        gap=gap,
        positive_gap=tuple(x for x in good if gap[x] > 0),
    )
