from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lgstat.canonical import BallCode, CherryType, RootedColoredGraph, StarType, ball_type, canonical_form, star_of
from lgstat.consistency import (
    BallModel,
    Codebook,
    StarModel,
    admissible_cherries,
    average_degree_audit,
    bad_star_mass,
    cherry_injection,
    closed_walk_comparison,
    consistency_defect_set,
    consistency_report,
    graph_walks,
    inadmissible_mass,
    is_admissible,
    is_cherry_consistent_at,
    is_consistent_at,
    lift_walk,
    model_walks,
    reconstruct_ball,
    true_model,
    true_star_model,
)
from lgstat.errors import PreconditionError
from lgstat.graph import Coloring, Graph, ball_of_set, ball_volume_bound, cycle, path, random_bounded, random_regular, star
from lgstat.search import product_coloring, separated_coloring
from lgstat.statistics import walks_from
from lgstat.verify import wraparound_cycle_model

from conftest import graphs


def separated_model(G, r):
    g, _ = separated_coloring(G, r)
    return true_model(G, g, r)


# ---------------------------------------------------------------- ball models


def test_true_model_rejects_unseparated_coloring():
    with pytest.raises(PreconditionError):
        true_model(cycle(6), Coloring.constant(6), 1)


def test_single_vertex_model_is_one_point_code():
    G = Graph.from_edges(1, [], d=2)
    m = true_model(G, Coloring(1, (1,)), 3)
    assert m[0] == BallCode(1, 3, (1,), ())
    assert is_consistent_at(G, m, 0) == (True, {})


def test_c6_distinct_colors_gives_six_codes():
    m = true_model(cycle(6), Coloring(6, tuple(range(1, 7))), 2)
    assert len(set(m.codes)) == 6


@settings(max_examples=60, deadline=None)
@given(graphs(n_max=14, d_max=3), st.integers(1, 3), st.data())
def test_true_model_consistent_everywhere(G, r, data):
    g, _ = separated_coloring(G, r)
    extra = Coloring(2, tuple(data.draw(st.lists(st.integers(1, 2), min_size=G.n, max_size=G.n))))
    h = product_coloring(g, extra)
    m = true_model(G, h, r)
    for x in range(G.n):
        ok, b = is_consistent_at(G, m, x)
        assert ok
        assert sorted(b.values()) == list(G.adj[x])
        # the bijection is color-determined
        assert all(m[x].colors[v] == h.colors[y] for v, y in b.items())
    assert consistency_defect_set(G, m).defect == ()


def _star_code(root_color, leaf_colors, k, r):
    m = 1 + len(leaf_colors)
    g = RootedColoredGraph(k, r, (root_color,) + tuple(leaf_colors), tuple((0, i) for i in range(1, m)))
    return canonical_form(g)


def test_degree_mismatched_code_breaks_neighbours():
    G = cycle(12)
    m = separated_model(G, 2)
    k = m.k
    fake = _star_code(m[5].root_color, [k + 1, k + 2, k + 3], k + 3, 2)
    lifted = [BallCode(k + 3, b.radius, b.colors, b.edges) for b in m.codes]
    lifted[5] = fake
    bad = BallModel(tuple(lifted))
    assert not is_consistent_at(G, bad, 4)[0]
    assert not is_consistent_at(G, bad, 6)[0]
    assert not is_consistent_at(G, bad, 5)[0]
    assert is_consistent_at(G, bad, 0)[0]
    U, nbhd = consistency_defect_set(G, bad)
    assert U == (4, 5, 6)
    assert nbhd == tuple(sorted(ball_of_set(G, U, 2)))


def test_scrambled_model_defect_and_bound():
    G = cycle(8)
    m = separated_model(G, 1)
    rng = np.random.default_rng(0)
    scrambled = BallModel(tuple(m[int(i)] for i in rng.permutation(8)))
    report = consistency_report(G, scrambled)
    manual = tuple(x for x in range(8) if not is_consistent_at(G, scrambled, x)[0])
    assert report.defect == manual
    U, nbhd = consistency_defect_set(G, scrambled)
    assert len(nbhd) <= ball_volume_bound(2, 1) * len(U)


def test_isolated_vertex_consistent_with_empty_bijection():
    G = Graph.from_edges(3, [(0, 1)], d=1)
    m = separated_model(G, 1)
    assert is_consistent_at(G, m, 2) == (True, {})


def _perturbed(G, m, rng, count):
    codes = list(m.codes)
    for x in rng.choice(G.n, size=count, replace=False):
        codes[int(x)] = codes[int(rng.integers(G.n))]
    return BallModel(tuple(codes))


@pytest.mark.parametrize("seed", range(6))
def test_bad_star_mass_equals_defect_fraction(seed):
    rng = np.random.default_rng(seed)
    G = random_bounded(18, 3, seed=seed, density=0.8)
    m = _perturbed(G, separated_model(G, 2), rng, 4)
    U = consistency_defect_set(G, m).defect
    assert bad_star_mass(G, m) == Fraction(len(U), G.n)


def test_bad_star_mass_zero_for_true_model():
    G = random_regular(12, 3, seed=2)
    assert bad_star_mass(G, separated_model(G, 2)) == 0


# ---------------------------------------------------------------- walks


def test_trivial_walk_lifts_to_root():
    G = cycle(6)
    m = separated_model(G, 4)
    assert lift_walk(G, m, 3, (0,)).graph_walk == (3,)


def test_lift_counts_closed_walks_on_c6():
    G = cycle(6)
    m = separated_model(G, 4)
    report = consistency_report(G, m)
    for x in range(6):
        for t in range(5):
            lifted = [lift_walk(G, m, x, w, report).graph_walk for w in model_walks(m[x], t)]
            closed_model = sum(1 for w in model_walks(m[x], t) if w[-1] == 0)
            closed_graph = sum(1 for h in lifted if h[-1] == x)
            assert closed_model == closed_graph == walks_from(G.adj, x, t)[1][t]


@pytest.mark.parametrize("seed", range(5))
def test_lift_is_bijective_and_prefix_coherent(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 21))
    G = random_bounded(n, 3, seed=seed, density=0.9)
    m = separated_model(G, 4)
    report = consistency_report(G, m)
    for x in range(G.n):
        for t in range(4):
            lifts = {}
            for w in model_walks(m[x], t):
                res = lift_walk(G, m, x, w, report)
                assert res == lift_walk(G, m, x, w, report)
                for j in range(t + 1):
                    assert lift_walk(G, m, x, w[: j + 1], report).graph_walk == res.graph_walk[: j + 1]
                lifts[w] = res.graph_walk
            assert len(set(lifts.values())) == len(lifts)
            assert set(lifts.values()) == set(graph_walks(G, x, t))


def test_lift_preconditions():
    G = cycle(8)
    m = separated_model(G, 2)
    with pytest.raises(PreconditionError):
        lift_walk(G, m, 0, (0, 1, 0, 1))  # longer than r
    with pytest.raises(PreconditionError):
        lift_walk(G, m, 0, (1, 0))  # does not start at the root
    bad = BallModel(tuple(m[(x + 1) % 8] if x == 2 else m[x] for x in range(8)))
    with pytest.raises(PreconditionError):
        lift_walk(G, bad, 0, (0,))


def test_closed_walks_equal_for_true_model_and_t2_is_degree():
    G = random_regular(14, 3, seed=1)
    m = separated_model(G, 3)
    for x in range(G.n):
        rows = closed_walk_comparison(G, m, x, 3)
        assert all(row.equal for row in rows)
        assert rows[1].model == rows[1].graph == G.degree(x)


def test_wraparound_model_strict_at_six():
    G = cycle(12)
    m = wraparound_cycle_model(12, 6, 6)
    assert consistency_defect_set(G, m).defect == ()
    rows = closed_walk_comparison(G, m, 0, 6)
    assert [row.equal for row in rows] == [True] * 5 + [False]
    assert rows[5].model == 22 and rows[5].graph == 20


@pytest.mark.parametrize("n,p,r", [(12, 4, 4), (15, 5, 5), (18, 6, 4), (16, 8, 5)])
def test_closed_walk_inequality_on_wraparound_models(n, p, r):
    G = cycle(n)
    m = wraparound_cycle_model(n, p, r)
    for row in closed_walk_comparison(G, m, 0, r):
        assert row.graph <= row.model


@pytest.mark.parametrize("seed", range(8))
def test_closed_walk_inequality_on_perturbed_models(seed):
    rng = np.random.default_rng(seed)
    G = random_bounded(20, 3, seed=seed, density=0.8)
    r = 2
    m = _perturbed(G, separated_model(G, r), rng, 3)
    report = consistency_report(G, m)
    for x in range(G.n):
        if report.consistent_on(ball_of_set(G, [x], r)):
            for row in closed_walk_comparison(G, m, x, r, report):
                assert row.graph <= row.model


# ---------------------------------------------------------------- reconstruction


def test_reconstruct_strictness():
    G = cycle(12)
    m = separated_model(G, 6)
    with pytest.raises(PreconditionError):
        reconstruct_ball(G, m, 0, 2)  # t = r/3 is rejected
    with pytest.raises(PreconditionError):
        reconstruct_ball(G, m, 0, 0)


def test_reconstruct_needs_equal_closed_walks():
    G = cycle(12)
    m = wraparound_cycle_model(12, 6, 7)
    with pytest.raises(PreconditionError):
        reconstruct_ball(G, m, 0, 2)


@pytest.mark.parametrize("G", [cycle(12), random_regular(14, 3, seed=5), random_bounded(16, 3, seed=8)])
def test_reconstruct_matches_true_ball(G):
    m = separated_model(G, 7)
    s = m.root_coloring()
    report = consistency_report(G, m)
    for x in range(G.n):
        res = reconstruct_ball(G, m, x, 2, report)
        assert res.success, res.reason
        assert res.model_code == ball_type(G, s, x, 1, cap=G.n)
        assert res.phi[0] == x
        assert all(m[x].colors[v] == s.colors[y] for v, y in res.phi.items())


# ---------------------------------------------------------------- stars and cherries


def separated_star_model(G):
    g, _ = separated_coloring(G, 1)
    return g, true_star_model(G, g)


@settings(max_examples=60, deadline=None)
@given(graphs(n_max=16, d_max=4))
def test_true_star_model_is_cherry_consistent(G):
    g, m = separated_star_model(G)
    for x in range(G.n):
        assert is_cherry_consistent_at(G, m, x)
        inj = cherry_injection(G, m, x)
        assert inj.star_equal and m[x] == star_of(G, g, x)
        assert inj.graph_degree == G.degree(x)
    assert inadmissible_mass(G, m) == 0


def test_isolated_vertex_with_degree_one_star():
    G = Graph.from_edges(1, [], d=1)
    assert not is_cherry_consistent_at(G, StarModel((StarType(1, (1,)),)), 0)


def test_pair_not_contained():
    G = star(2)
    m = StarModel((StarType(1, (0, 1)), StarType(2, (1, 0)), StarType(2, (1, 0))))
    assert not is_cherry_consistent_at(G, m, 0)
    m2 = StarModel((StarType(1, (0, 2)),) + m.stars[1:])
    assert is_cherry_consistent_at(G, m2, 0)


def test_phantom_leaf_injection():
    G = path(3)
    g, m = separated_star_model(G)
    A = m[1]
    phantom = StarType.from_leaves(A.root_color, A.leaf_colors() + [A.root_color], A.k)
    bad = StarModel((m[0], phantom, m[2]))
    inj = cherry_injection(G, bad, 1)
    assert inj.graph_degree < inj.model_degree and not inj.star_equal
    assert sorted(inj.injection) == [0, 2]


def test_injection_at_isolated_vertex():
    G = Graph.from_edges(1, [], d=2)
    m = StarModel((StarType(1, (0,)),))
    inj = cherry_injection(G, m, 0)
    assert inj.injection == {} and inj.model_degree == 0


def test_injection_needs_distinct_colors():
    G = star(2)
    m = StarModel((StarType(1, (0, 2)), StarType(2, (1, 0)), StarType(2, (1, 0))))
    with pytest.raises(PreconditionError):
        cherry_injection(G, m, 0)


def test_admissible_basics():
    A0 = StarType(1, (0, 0))
    A1 = StarType(1, (0, 1))
    B = StarType(2, (1, 0))
    C = StarType(1, (1, 0))
    book = Codebook([A0, A1, B, C])
    a0, a1, b, c = (book.color(x) for x in (A0, A1, B, C))
    assert is_admissible(CherryType.point(a0), book)
    assert not is_admissible(CherryType.point(a1), book)
    assert is_admissible(CherryType.edge(a1, b), book)
    assert not is_admissible(CherryType.edge(a1, c), book)
    cherries = admissible_cherries(book)
    assert CherryType.point(a0) in cherries and CherryType.edge(a1, c) not in cherries


def _phantom_model(G, g, chosen):
    m = true_star_model(G, g)
    stars = list(m.stars)
    for x in chosen:
        A = stars[x]
        stars[x] = StarType.from_leaves(A.root_color, A.leaf_colors() + [A.root_color], A.k)
    return m, StarModel(tuple(stars))


def test_degree_audit_true_model_zero_gap():
    G = random_bounded(20, 4, seed=3)
    g, m = separated_star_model(G)
    rep = average_degree_audit(G, G, m, m)
    assert rep.positive_gap == () and set(rep.gap.values()) <= {0}
    assert rep.mean_model_degree == rep.mean_graph_degree == rep.root_marginal_degree
    assert rep.cherry_tv == 0


@pytest.mark.parametrize("chosen", [(1, 7, 13), (0, 2, 19), (4, 5, 6)])
def test_degree_audit_finds_phantom_leaves(chosen):
    G = cycle(20).with_degree_bound(3)
    g, _ = separated_coloring(G, 1)
    m, bad = _phantom_model(G, g, chosen)
    rep = average_degree_audit(G, G, bad, m)
    assert rep.positive_gap == chosen
    assert rep.mean_model_degree == rep.root_marginal_degree == Fraction(43, 20)
    assert rep.cherry_tv > 0


def test_degree_audit_requires_true_reference():
    G = cycle(6)
    g, m = separated_star_model(G)
    _, bad = _phantom_model(G, g, (0,))
    with pytest.raises(PreconditionError):
        average_degree_audit(G, G, m, bad)
