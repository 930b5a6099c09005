from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from lgstat.canonical import StarType
from lgstat.distribution import Distribution, hausdorff, tv_distance
from lgstat.errors import EnumerationCapExceeded, UniverseMismatch
from lgstat.graph import Coloring, complete, cycle, disjoint_union, grid_torus, path, random_regular
from lgstat.search import (
    SearchConfig,
    approx_realize,
    approx_stat_set,
    compare_graphs,
    enumerate_stat_set,
    product_coloring,
    separated_coloring,
    separation_bound,
    verify_separation,
)
from lgstat.statistics import LocalObserver, sigma, tau_r

from conftest import graphs

C8 = cycle(8)
C4C4 = disjoint_union(cycle(4), cycle(4))
HALF_PURE = {StarType(1, (2, 0)): Fraction(1, 2), StarType(2, (0, 2)): Fraction(1, 2)}


def star_laws_by_brute_force(G, k):
    return {sigma(G, Coloring(k, cs)) for cs in product(range(1, k + 1), repeat=G.n)}


def test_separated_coloring_on_c5():
    f, cert = separated_coloring(cycle(5), 1)
    assert cert.colors_used == 5 and cert.bound == 9 and cert.verified
    assert len(set(f.colors)) == 5


@settings(max_examples=100, deadline=None)
@given(graphs(n_max=20, d_max=4), st.integers(1, 2))
def test_separated_coloring_certificate(G, r):
    f, cert = separated_coloring(G, r)
    assert cert.verified and verify_separation(G, f, r)
    assert cert.colors_used <= separation_bound(G.d, r)


def test_separation_scan_catches_a_clash():
    assert not verify_separation(cycle(6), Coloring(3, (1, 2, 3, 1, 2, 3)), 2)


def test_product_coloring_is_injective_on_pairs():
    f, g = Coloring(2, (1, 2, 2)), Coloring(3, (3, 1, 3))
    assert product_coloring(f, g).colors == (3, 4, 6)


def test_enumerate_k2_edge():
    S = enumerate_stat_set(complete(2), 2, "sigma")
    assert len(S) == 3
    assert S.mode == "exact"


def test_enumerate_matches_brute_force():
    for G in (path(4), cycle(5), complete(4)):
        S = enumerate_stat_set(G, 2, "sigma")
        assert set(S.members) == star_laws_by_brute_force(G, 2)
        for mu in S:
            assert sigma(G, S.witness_for(mu)) == mu


def test_enumeration_cap():
    with pytest.raises(EnumerationCapExceeded):
        enumerate_stat_set(cycle(10), 2, "sigma", cap=100)


def test_half_pure_law_only_on_disconnected_graph():
    S_c8 = enumerate_stat_set(C8, 2, "sigma")
    S_split = enumerate_stat_set(C4C4, 2, "sigma")
    target = Distribution(S_c8.universe, HALF_PURE)
    assert target in S_split and target not in S_c8
    # a two-colored 8-cycle has at least two bichromatic edges, hence at least four
    # roots with a mixed star: the closest C8 law is at tv 4/8
    closest = min(tv_distance(target, mu) for mu in star_laws_by_brute_force(C8, 2))
    assert closest == Fraction(1, 2)
    assert hausdorff(S_c8, S_split) >= closest


def test_one_color_sets_agree():
    assert hausdorff(enumerate_stat_set(C8, 1, "sigma"), enumerate_stat_set(C4C4, 1, "sigma")) == 0
    c8, c44 = Coloring.constant(8), Coloring.constant(8)
    assert tau_r(C8, c8, 1) == tau_r(C4C4, c44, 1)


def test_compare_exact_reports():
    rep = compare_graphs(C8, C4C4, 1, "sigma")
    assert rep.distance == 0
    rep = compare_graphs(C8, C4C4, 2, "sigma")
    assert rep.distance > 0
    assert rep.to_json()["distance"] == f"{rep.distance.numerator}/{rep.distance.denominator}"
    assert compare_graphs(C8, C8, 2, "sigma").distance == 0


def test_compare_rejects_different_bounds():
    with pytest.raises(ValueError):
        compare_graphs(C8, cycle(8).with_degree_bound(3), 1, "sigma")


@pytest.mark.parametrize("kind,r", [("sigma", None), ("chi", None), ("tau", 1)])
def test_approx_realize_recovers_injected_coloring(kind, r):
    G = random_regular(16, 3, seed=4)
    g = Coloring(3, tuple(1 + (v * 7) % 3 for v in range(16)))
    target = LocalObserver(G, kind, 3, r).distribution(g.colors)
    f, tv = approx_realize(G, 3, kind, r, target, SearchConfig(seed=2, restarts=2), initial=g)
    assert tv == 0


def test_approx_realize_finds_easy_target_from_random_starts():
    G = grid_torus(4, 4)
    target = sigma(G, Coloring(2, tuple(1 + (i + j) % 2 for i in range(4) for j in range(4))))
    f, tv = approx_realize(G, 2, "sigma", None, target, SearchConfig(seed=0, restarts=8))
    assert tv == tv_distance(sigma(G, f), target)


def test_approx_realize_is_deterministic():
    G = random_regular(12, 3, seed=9)
    target = sigma(G, Coloring(2, tuple(1 + v % 2 for v in range(12))))
    cfg = SearchConfig(seed=5, restarts=3, budget=500)
    assert approx_realize(G, 2, "sigma", None, target, cfg) == approx_realize(G, 2, "sigma", None, target, cfg)


def test_approx_realize_universe_mismatch():
    target = sigma(C8, Coloring.constant(8, 2))
    with pytest.raises(UniverseMismatch):
        approx_realize(C8, 3, "sigma", None, target)


@pytest.mark.parametrize("G,k,kind,r", [(C8, 2, "sigma", None), (C4C4, 2, "chi", None), (path(6), 3, "sigma", None), (cycle(6), 2, "tau", 1)])
def test_approx_set_is_subset_of_exact_set(G, k, kind, r):
    approx = approx_stat_set(G, k, kind, r, SearchConfig(seed=1, restarts=4, budget=300))
    exact = enumerate_stat_set(G, k, kind, r)
    assert approx.mode == "approx"
    assert approx.issubset(exact)
    for mu in approx:
        assert LocalObserver(G, kind, k, r).distribution(approx.witness_for(mu).colors) == mu
