"""Property suites run by ``lgstat verify``.

Each suite generates instances from a seed, runs the invariant checks of one area,
and returns :class:`Check` records. A suite never raises on a failed property; the
failure is recorded with a short detail string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .canonical import StarType
from .consistency import (
    BallModel,
    StarModel,
    average_degree_audit,
    cherry_injection,
    closed_walk_comparison,
    consistency_report,
    graph_walks,
    inadmissible_mass,
    is_cherry_consistent_at,
    lift_walk,
    model_walks,
    reconstruct_ball,
    true_model,
    true_star_model,
)
from .errors import InternalContradiction, PreconditionError
from .graph import (
    Coloring,
    Graph,
    ball_of_set,
    ball_volume_bound,
    check_mass_transport,
    cycle,
    random_bounded,
    random_regular,
)
from .search import product_coloring, separated_coloring, separation_bound, verify_separation
from .statistics import chi, project_pushforward, sigma, tau_r, theta_pushforward, walk_counts

__all__ = ["Check", "SUITES", "run_suites", "random_instance", "wraparound_cycle_model"]


@dataclass
class Check:
    tag: str
    instances: int = 0
    failures: int = 0
    details: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, detail: str = "") -> None:
        self.instances += 1
        if not ok:
            self.failures += 1
            if len(self.details) < 5:
                self.details.append(detail)

    def to_json(self) -> dict:
        out = {"tag": self.tag, "instances": self.instances, "passed": self.passed}
        if self.details:
            out["failures"] = self.details
        if self.data:
            out["data"] = self.data
        return out


def random_instance(rng: np.random.Generator, n_max: int, d_max: int, k_max: int) -> tuple[Graph, Coloring]:
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    G = random_bounded(n, d, seed=int(rng.integers(1 << 31)), density=float(rng.uniform(0.3, 1.0)))
    k = int(rng.integers(1, k_max + 1))
    f = Coloring(k, tuple(int(c) for c in rng.integers(1, k + 1, size=n)))
    return G, f


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def wraparound_cycle_model(n: int, p: int, r: int) -> BallModel:
    """Model on the n-cycle that pretends every vertex lives on a p-cycle.

    Vertex x gets the radius-r ball of ``x mod p`` in the p-cycle colored ``1..p``.
    Requires ``p | n`` and ``r >= p // 2`` so that the ball is the whole p-cycle.
    """
    if n % p or 2 * r < p:
        raise ValueError("need p | n and 2r >= p")
    small = true_model(cycle(p), Coloring(p, tuple(range(1, p + 1))), r)
    return BallModel(tuple(small[x % p] for x in range(n)))


# ---------------------------------------------------------------- suites


def suite_core(seed: int) -> list[Check]:
    rng = _rng(seed, 0)
    cherry, proj, nbhd, mt = Check("star-to-cherry"), Check("projection"), Check("neighbourhood-bound"), Check("mass-transport")
    for _ in range(60):
        G, f = random_instance(rng, 30, 4, 3)
        s = sigma(G, f)
        cherry.record(chi(G, f) == theta_pushforward(s), f"n={G.n} d={G.d}")
        proj.record(project_pushforward(tau_r(G, f, 1)) == s, f"n={G.n} d={G.d}")
        U = [v for v in range(G.n) if rng.random() < 0.2]
        r = int(rng.integers(0, 3))
        nbhd.record(len(ball_of_set(G, U, r)) <= ball_volume_bound(G.d, r) * len(U), f"r={r}")
        A = [v for v in range(G.n) if rng.random() < 0.5]
        B = [v for v in range(G.n) if rng.random() < 0.5]
        lhs, rhs = check_mass_transport(G, A, B)
        mt.record(lhs == rhs)
    return [cherry, proj, nbhd, mt]


def suite_separation(seed: int) -> list[Check]:
    rng = _rng(seed, 1)
    c5 = Check("separation-c5")
    f, cert = separated_coloring(cycle(5), 1)
    c5.record(cert.colors_used == 5 and cert.bound == 9 and cert.verified, f"{cert}")
    c5.data = {"colors": cert.colors_used, "bound": cert.bound}
    gen = Check("separation-bound")
    for _ in range(30):
        G, _ = random_instance(rng, 40, 4, 1)
        for r in (1, 2):
            g, cert = separated_coloring(G, r)
            ok = cert.verified and verify_separation(G, g, r) and cert.colors_used <= separation_bound(G.d, r)
            gen.record(ok, f"n={G.n} d={G.d} r={r} colors={cert.colors_used}")
    return [c5, gen]


def suite_walks(seed: int) -> list[Check]:
    rng = _rng(seed, 2)
    c4 = Check("walks-c4")
    c = walk_counts(cycle(4), 4).c(4)
    brute = sum(1 for x in range(4) for w in graph_walks(cycle(4), x, 4) if w[-1] == x)
    c4.record(c == 8 and brute == 32, f"c_4={c}")
    c4.data = {"c_4": f"{c.numerator}/{c.denominator}"}
    trace, deg = Check("walks-trace-oracle"), Check("walks-c2-degree")
    for _ in range(20):
        G, _ = random_instance(rng, 40, 4, 1)
        table = walk_counts(G, 8)
        A = np.zeros((G.n, G.n), dtype=object)
        for u, v in G.edges():
            A[u, v] = A[v, u] = 1
        P = np.identity(G.n, dtype=object)
        ok = True
        for t in range(1, 9):
            P = P.dot(A)
            ok &= table.c(t) == Fraction(int(np.trace(P)), G.n)
        trace.record(ok, f"n={G.n}")
        deg.record(table.c(2) == Fraction(2 * G.num_edges, G.n))

    lift = Check("walk-lifting")
    for _ in range(4):
        n = 2 * int(rng.integers(3, 8))
        G = random_regular(n, 3, seed=int(rng.integers(1 << 31))) if rng.random() < 0.5 else random_bounded(n, 3, int(rng.integers(1 << 31)))
        g, _ = separated_coloring(G, 4)
        m = true_model(G, g, 4)
        report = consistency_report(G, m)
        x = int(rng.integers(G.n))
        ok, why = _check_lifting(G, m, x, 3, report)
        lift.record(ok, why)

    closed = Check("closed-walk-inequality")
    for _ in range(5):
        G, _ = random_instance(rng, 20, 3, 1)
        g, _ = separated_coloring(G, 2)
        m = true_model(G, g, 2)
        rows = closed_walk_comparison(G, m, int(rng.integers(G.n)), 2)
        closed.record(all(row.equal for row in rows))
    rows = closed_walk_comparison(cycle(12), wraparound_cycle_model(12, 6, 6), 0, 6)
    closed.record(rows[5].model > rows[5].graph and all(row.equal for row in rows[:5]), "wrap-around model")
    return [c4, trace, deg, lift, closed]


def _check_lifting(G, m, x, t_max, report) -> tuple[bool, str]:
    for t in range(t_max + 1):
        lifts = {}
        for w in model_walks(m[x], t):
            h = lift_walk(G, m, x, w, report).graph_walk
            for j in range(t):
                if lift_walk(G, m, x, w[: j + 1], report).graph_walk != h[: j + 1]:
                    return False, f"prefix incoherent at t={t}"
            lifts[w] = h
        images = set(lifts.values())
        if len(images) != len(lifts):
            return False, f"not injective at t={t}"
        if images != set(graph_walks(G, x, t)):
            return False, f"not surjective at t={t}"
    return True, ""


def suite_consistency(seed: int) -> list[Check]:
    rng = _rng(seed, 3)
    true_ok = Check("true-model-consistent")
    for _ in range(30):
        G, f = random_instance(rng, 20, 3, 2)
        r = int(rng.integers(1, 3))
        g, _ = separated_coloring(G, r)
        h = product_coloring(g, f)
        m = true_model(G, h, r)
        defect = consistency_report(G, m).defect
        true_ok.record(not defect, f"defect {defect}")

    recon = Check("reconstruction")
    graphs = [cycle(12)] + [random_regular(2 * int(rng.integers(4, 9)), 3, int(rng.integers(1 << 31))) for _ in range(1)]
    for G in graphs:
        s, _ = separated_coloring(G, 7)
        m = true_model(G, s, 7)
        report = consistency_report(G, m)
        for x in range(G.n):
            try:
                res = reconstruct_ball(G, m, x, 2, report)
                ok = res.success and res.model_code == res.graph_code
                recon.record(ok, res.reason or "")
            except (InternalContradiction, PreconditionError) as exc:
                recon.record(False, str(exc))
    return [true_ok, recon]


def suite_cherry(seed: int) -> list[Check]:
    rng = _rng(seed, 4)
    cons, inj, adm, audit = (Check(t) for t in ("cherry-consistent", "cherry-injection", "admissible-mass", "degree-audit"))
    for _ in range(30):
        G, _ = random_instance(rng, 24, 4, 1)
        g, _ = separated_coloring(G, 1)
        m = true_star_model(G, g)
        cons.record(all(is_cherry_consistent_at(G, m, x) for x in range(G.n)))
        inj.record(all(cherry_injection(G, m, x).star_equal for x in range(G.n)))
        adm.record(inadmissible_mass(G, m) == 0)
        rep = average_degree_audit(G, G, m, m)
        audit.record(not rep.positive_gap and rep.root_marginal_degree == rep.mean_model_degree)

    phantom = Check("phantom-leaf-audit")
    G = cycle(20).with_degree_bound(3)
    g, _ = separated_coloring(G, 1)
    m = true_star_model(G, g)
    chosen = sorted(int(v) for v in rng.choice(20, size=3, replace=False))
    m_bad = StarModel(tuple(_add_phantom(m[x], g.k) if x in chosen else m[x] for x in range(20)))
    rep = average_degree_audit(G, G, m_bad, m)
    phantom.record(list(rep.positive_gap) == chosen, f"{rep.positive_gap} vs {chosen}")
    return [cons, inj, adm, audit, phantom]


def _add_phantom(A: StarType, k: int) -> StarType:
    """Add one leaf whose color is the root color (never a true neighbour color under separation)."""
    return StarType.from_leaves(A.root_color, A.leaf_colors() + [A.root_color], k)


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "core": suite_core,
    "separation": suite_separation,
    "walks": suite_walks,
    "consistency": suite_consistency,
    "cherry": suite_cherry,
}


def run_suites(names: list[str], seed: int) -> Iterator[tuple[str, list[Check]]]:
    if "all" in names:
        names = list(SUITES)
    for name in names:
        yield name, SUITES[name](seed)
