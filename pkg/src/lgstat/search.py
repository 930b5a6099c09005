"""Colorings: separated colorings, product colorings, exact enumeration of statistic
sets, and hill-climbing inner approximations of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .distribution import Distribution, DistributionSet, directed_hausdorff, tv_distance
from .errors import EnumerationCapExceeded, UniverseMismatch
from .graph import Coloring, Graph, ball, power_graph
from .statistics import LocalObserver

__all__ = [
    "SearchConfig",
    "SeparationCertificate",
    "separation_bound",
    "separated_coloring",
    "verify_separation",
    "product_coloring",
    "enumerate_stat_set",
    "approx_realize",
    "approx_stat_set",
    "CompareReport",
    "compare_graphs",
]

DEFAULT_ENUMERATION_CAP = 1 << 24

# sub-stream ids for seed derivation
_STREAM_RESTART = 0
_STREAM_PROBE = 1


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    restarts: int = 8
    budget: int = 20_000
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        if self.seed < 0 or self.restarts < 1 or self.budget < 1 or self.enumeration_cap < 1:
            raise ValueError("search parameters must be positive")

    def rng(self, stream: int, index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(stream, index)))


@dataclass(frozen=True)
class SeparationCertificate:
    radius: int
    colors_used: int
    bound: int
    verified: bool


def separation_bound(d: int, r: int) -> int:
    """Colors always sufficient to separate radius-r balls: ``d^(2r+1) + 1``."""
    return d ** (2 * r + 1) + 1


def verify_separation(G: Graph, f: Coloring, r: int) -> bool:
    """True iff every radius-r ball has pairwise distinct colors (explicit scan)."""
    for v in range(G.n):
        cols = [f.colors[u] for u in ball(G, v, r).vertices]
        if len(set(cols)) != len(cols):
            return False
    return True


def separated_coloring(G: Graph, r: int) -> tuple[Coloring, SeparationCertificate]:
    """Greedy proper coloring of the (2r)-th power graph in ascending vertex order."""
    if r < 1:
        raise ValueError("separation radius must be at least 1")
    P = power_graph(G, 2 * r)
    colors = [0] * G.n
    for v in range(G.n):
        taken = {colors[u] for u in P.adj[v] if u < v}
        c = 1
        while c in taken:
            c += 1
        colors[v] = c
    k = max(colors, default=1)
    f = Coloring(k, tuple(colors))
    cert = SeparationCertificate(r, k, separation_bound(G.d, r), verify_separation(G, f, r))
    return f, cert


def product_coloring(f: Coloring, g: Coloring) -> Coloring:
    """Pair colors as ``(f - 1) * k_g + g``, a bijection of ``[k_f] x [k_g]`` onto ``[k_f * k_g]``."""
    if len(f) != len(g):
        raise ValueError("colorings of different lengths")
    return Coloring(f.k * g.k, tuple((a - 1) * g.k + b for a, b in zip(f.colors, g.colors)))


def enumerate_stat_set(
    G: Graph,
    k: int,
    kind: str,
    r: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> DistributionSet:
    """The full statistic set of a finite graph, by running through all ``k^n`` colorings."""
    if k**G.n > cap:
        raise EnumerationCapExceeded(f"{k}^{G.n} colorings exceed the enumeration cap {cap}")
    obs = LocalObserver(G, kind, k, r)
    pairs = ((obs.distribution(cs), Coloring(k, cs)) for cs in product(range(1, k + 1), repeat=G.n))
    return DistributionSet.build(obs.universe, pairs, mode="exact")


# ---------------------------------------------------------------- local search


class _State:
    """Coloring plus unnormalized atom masses, updated locally on recoloring."""

    def __init__(self, obs: LocalObserver, colors: Sequence[int]):
        self.obs = obs
        self.colors = list(colors)
        self.contrib = [obs.contribution(self.colors, x) for x in range(obs.G.n)]
        self.mass: dict = {}
        for c in self.contrib:
            for a, p in c:
                self.mass[a] = self.mass.get(a, 0) + p

    def propose(self, v: int, c: int):
        old = self.colors[v]
        self.colors[v] = c
        delta: dict = {}
        fresh = {}
        for x in self.obs.dependents(v):
            new = self.obs.contribution(self.colors, x)
            fresh[x] = new
            for a, p in self.contrib[x]:
                delta[a] = delta.get(a, 0) - p
            for a, p in new:
                delta[a] = delta.get(a, 0) + p
        self.colors[v] = old
        return {a: q for a, q in delta.items() if q}, fresh

    def apply(self, v: int, c: int, delta: dict, fresh: dict) -> None:
        self.colors[v] = c
        for x, new in fresh.items():
            self.contrib[x] = new
        for a, q in delta.items():
            m = self.mass.get(a, 0) + q
            if m:
                self.mass[a] = m
            else:
                self.mass.pop(a, None)

    def coloring(self) -> Coloring:
        return Coloring(self.obs.k, tuple(self.colors))

    def distribution(self) -> Distribution:
        n = self.obs.G.n
        return Distribution(self.obs.universe, {a: Fraction(p) / n for a, p in self.mass.items()})


class _TVObjective:
    """Unnormalized L1 gap ``sum |mass - n * target|``; TV is this over 2n."""

    def __init__(self, state: _State, target: Distribution):
        n = state.obs.G.n
        self.goal = {a: p * n for a, p in target.items()}
        self.state = state
        atoms = set(self.goal) | set(state.mass)
        self.value = sum((abs(state.mass.get(a, 0) - self.goal.get(a, 0)) for a in atoms), Fraction(0))

    def gain(self, delta: dict) -> Fraction:
        mass, goal = self.state.mass, self.goal
        g = Fraction(0)
        for a, q in delta.items():
            cur = mass.get(a, 0) - goal.get(a, 0)
            g += abs(cur + q) - abs(cur)
        return g

    def accept(self, gain: Fraction) -> None:
        self.value += gain


class _AtomObjective:
    """Minimize ``sign * mass(atom)``."""

    def __init__(self, state: _State, atom, sign: int):
        self.atom, self.sign = atom, sign
        self.value = Fraction(sign * state.mass.get(atom, 0))

    def gain(self, delta: dict) -> Fraction:
        return Fraction(self.sign * delta.get(self.atom, 0))

    def accept(self, gain: Fraction) -> None:
        self.value += gain


def _hill_climb(state: _State, objective, rng: np.random.Generator, budget: int, floor=None) -> int:
    """First-improvement descent over single-vertex recolorings.

    Vertices are scanned in a fresh random order each pass and new colors in
    ascending order. Stops at a local optimum, at ``floor``, or when the budget of
    objective evaluations is spent. Returns the number of evaluations used.
    """
    n, k = state.obs.G.n, state.obs.k
    evals = 0
    if floor is not None and objective.value <= floor:
        return evals
    improved = True
    while improved:
        improved = False
        for v in rng.permutation(n).tolist():
            for c in range(1, k + 1):
                if c == state.colors[v]:
                    continue
                if evals >= budget:
                    return evals
                delta, fresh = state.propose(v, c)
                evals += 1
                g = objective.gain(delta)
                if g < 0:
                    state.apply(v, c, delta, fresh)
                    objective.accept(g)
                    improved = True
                    break
            if floor is not None and objective.value <= floor:
                return evals
    return evals


def _random_colors(rng: np.random.Generator, n: int, k: int) -> list[int]:
    return (rng.integers(1, k + 1, size=n)).tolist()


def approx_realize(
    G: Graph,
    k: int,
    kind: str,
    r: int | None,
    target: Distribution,
    cfg: SearchConfig = SearchConfig(),
    initial: Coloring | None = None,
) -> tuple[Coloring, Fraction]:
    """Best coloring found by restarted hill climbing towards ``target`` and its exact TV.

    ``initial``, when given, replaces the random start of restart 0.
    """
    obs = LocalObserver(G, kind, k, r)
    if target.universe != obs.universe:
        raise UniverseMismatch(f"target over {target.universe}, search over {obs.universe}")
    if k == 1:
        f = Coloring.constant(G.n)
        return f, tv_distance(obs.distribution(f.colors), target)
    best: tuple[Fraction, Coloring] | None = None
    for idx in range(cfg.restarts):
        rng = cfg.rng(_STREAM_RESTART, idx)
        start = list(initial.colors) if (idx == 0 and initial is not None) else _random_colors(rng, G.n, k)
        state = _State(obs, start)
        objective = _TVObjective(state, target)
        _hill_climb(state, objective, rng, cfg.budget, floor=0)
        tv = objective.value / (2 * G.n)
        if best is None or tv < best[0]:
            best = (tv, state.coloring())
        if tv == 0:
            break
    assert best is not None
    f = best[1]
    return f, tv_distance(obs.distribution(f.colors), target)


def approx_stat_set(
    G: Graph,
    k: int,
    kind: str,
    r: int | None = None,
    cfg: SearchConfig = SearchConfig(),
    max_probe_atoms: int | None = None,
) -> DistributionSet:
    """Inner approximation of a statistic set: every member comes with a witness coloring.

    Members are the laws of ``cfg.restarts`` uniform random colorings plus, for each
    atom seen among those, the end points of hill climbs maximizing and minimizing
    that atom's mass. Nothing is claimed about completeness.
    """
    obs = LocalObserver(G, kind, k, r)
    found: list[tuple[Distribution, Coloring]] = []
    for idx in range(cfg.restarts):
        state = _State(obs, _random_colors(cfg.rng(_STREAM_RESTART, idx), G.n, k))
        found.append((state.distribution(), state.coloring()))
    if k > 1:
        atoms = sorted({a for mu, _ in found for a in mu}, key=lambda a: a.key())
        if max_probe_atoms is not None:
            atoms = atoms[:max_probe_atoms]
        probe = 0
        for atom in atoms:
            for sign in (-1, 1):
                rng = cfg.rng(_STREAM_PROBE, probe)
                probe += 1
                state = _State(obs, _random_colors(rng, G.n, k))
                _hill_climb(state, _AtomObjective(state, atom, sign), rng, cfg.budget)
                found.append((state.distribution(), state.coloring()))
    return DistributionSet.build(obs.universe, found, mode="approx")


# ---------------------------------------------------------------- comparison


@dataclass
class CompareReport:
    mode: str
    universe: dict
    distance: Fraction
    a_to_b: Fraction
    b_to_a: Fraction
    sizes: tuple[int, int]
    witnesses: dict = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        from .distribution import format_fraction

        return {
            "mode": self.mode,
            "universe": self.universe,
            "distance": format_fraction(self.distance),
            "directed": {"a_to_b": format_fraction(self.a_to_b), "b_to_a": format_fraction(self.b_to_a)},
            "sizes": {"a": self.sizes[0], "b": self.sizes[1]},
            "witnesses": self.witnesses,
            "caveats": self.caveats,
        }


def _farthest(A: DistributionSet, B: DistributionSet) -> tuple[Fraction, dict]:
    value, idx = directed_hausdorff(A, B)
    mu = A.members[idx]
    w = A.witnesses[idx] if A.witnesses else None
    return value, {
        "distance": f"{value.numerator}/{value.denominator}",
        "member": mu.to_json()["atoms"],
        "coloring": list(w.colors) if w is not None else None,
    }


def compare_graphs(
    G: Graph,
    H: Graph,
    k: int,
    kind: str,
    r: int | None = None,
    mode: str = "exact",
    cfg: SearchConfig = SearchConfig(),
) -> CompareReport:
    """Hausdorff distance between the statistic sets of two graphs with a witness report."""
    if G.d != H.d:
        raise ValueError(f"graphs declare different degree bounds {G.d} and {H.d}")
    if mode == "exact":
        A = enumerate_stat_set(G, k, kind, r, cfg.enumeration_cap)
        B = enumerate_stat_set(H, k, kind, r, cfg.enumeration_cap)
        caveats: list[str] = []
    elif mode == "approx":
        A = approx_stat_set(G, k, kind, r, cfg)
        B = approx_stat_set(H, k, kind, r, cfg)
        caveats = [
            "both sets are inner approximations (subsets with witness colorings)",
            "the reported value is the Hausdorff distance of the subsets, not a bound on the true distance",
            "a_to_b is an upper bound only if B's approximation were complete; likewise for b_to_a",
        ]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ab, wa = _farthest(A, B)
    ba, wb = _farthest(B, A)
    return CompareReport(
        mode=mode,
        universe=A.universe.to_json(),
        distance=max(ab, ba),
        a_to_b=ab,
        b_to_a=ba,
        sizes=(len(A), len(B)),
        witnesses={"a_farthest_from_b": wa, "b_farthest_from_a": wb},
        caveats=caveats,
    )
