from collections import Counter
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings

from lgstat.canonical import CherryType, StarType
from lgstat.distribution import Universe
from lgstat.errors import BallSizeCapExceeded
from lgstat.graph import Coloring, complete, cycle, disjoint_union, grid_torus, path, star
from lgstat.statistics import (
    LocalObserver,
    chi,
    project_pushforward,
    sigma,
    tau_r,
    theta_pushforward,
    walk_counts,
)

from conftest import colored_graphs, graphs


def chi_by_ordered_pairs(G, f):
    """Cherry law from ordered pairs of distinct neighbours (independent of the library's route)."""
    acc = Counter()
    n = G.n
    for x in range(n):
        nbrs = G.adj[x]
        c = f.colors[x]
        if not nbrs:
            acc[CherryType.point(c)] += Fraction(1, n)
        elif len(nbrs) == 1:
            acc[CherryType.edge(c, f.colors[nbrs[0]])] += Fraction(1, n)
        else:
            ordered = list(permutations(nbrs, 2))
            for y, z in ordered:
                acc[CherryType.two_star(c, f.colors[y], f.colors[z])] += Fraction(1, n * len(ordered))
    return {a: p for a, p in acc.items() if p}


def closed_walks_by_dfs(G, x, t):
    def go(v, left):
        if left == 0:
            return int(v == x)
        return sum(go(u, left - 1) for u in G.adj[v])

    return go(x, t)


def test_sigma_star_k13():
    law = sigma(star(3), Coloring.constant(4))
    assert law.to_json()["atoms"] == {"1:(1)": "3/4", "1:(3)": "1/4"}


def test_chi_star_k13():
    law = chi(star(3), Coloring.constant(4))
    assert law.to_json()["atoms"] == {"E(1|1)": "3/4", "T(1|{1,1})": "1/4"}


def test_sigma_universe_and_atoms():
    law = sigma(cycle(8), Coloring.constant(8))
    assert law.universe == Universe("sigma", d=2, k=1)
    assert law.to_json()["atoms"] == {"1:(2)": "1/1"}


def test_isolated_vertices_give_point_cherries():
    G = disjoint_union(path(1), path(2))
    law = chi(G, Coloring.constant(3))
    assert law[CherryType.point(1)] == Fraction(1, 3)
    assert law[CherryType.edge(1, 1)] == Fraction(2, 3)


def test_cherries_do_not_see_triangles_at_k1():
    c = Coloring.constant(4)
    assert chi(complete(4), c) == chi(cycle(4).with_degree_bound(3), c)
    assert sigma(complete(4), c) != sigma(cycle(4).with_degree_bound(3), c)


@settings(max_examples=200, deadline=None)
@given(colored_graphs(n_max=14, d_max=5, k_max=4))
def test_chi_matches_ordered_pair_oracle(Gf):
    G, f = Gf
    assert chi(G, f).as_dict() == chi_by_ordered_pairs(G, f)


@settings(max_examples=200, deadline=None)
@given(colored_graphs(n_max=14, d_max=5, k_max=4))
def test_star_to_cherry_identity(Gf):
    G, f = Gf
    assert chi(G, f) == theta_pushforward(sigma(G, f))


@settings(max_examples=200, deadline=None)
@given(colored_graphs(n_max=14, d_max=5, k_max=4))
def test_projection_identity(Gf):
    G, f = Gf
    assert project_pushforward(tau_r(G, f, 1)) == sigma(G, f)


@settings(max_examples=50, deadline=None)
@given(colored_graphs(n_max=10, d_max=3, k_max=2))
def test_tau_invariant_under_relabelling(Gf):
    from lgstat.graph import relabel

    G, f = Gf
    perm = list(reversed(range(G.n)))
    H = relabel(G, perm)
    g = [0] * G.n
    for v in range(G.n):
        g[perm[v]] = f.colors[v]
    assert tau_r(G, f, 2) == tau_r(H, Coloring(f.k, tuple(g)), 2)


def test_tau_of_transitive_graph_with_constant_coloring_is_a_point():
    law = tau_r(grid_torus(4, 4), Coloring.constant(16), 2)
    assert len(law) == 1


def test_tau_cap():
    with pytest.raises(BallSizeCapExceeded):
        tau_r(cycle(30), Coloring.constant(30), 10, cap=8)


def test_cycle_walk_counts_by_enumeration():
    assert walk_counts(cycle(8), 4).c(4) == 6
    assert walk_counts(cycle(4), 4).c(4) == 8
    assert closed_walks_by_dfs(cycle(8), 0, 4) == 6
    assert closed_walks_by_dfs(cycle(4), 0, 4) == 8


@settings(max_examples=60, deadline=None)
@given(graphs(n_max=30, d_max=4))
def test_walk_counts_match_trace_oracle(G):
    T = 8
    table = walk_counts(G, T)
    A = np.zeros((G.n, G.n), dtype=np.int64)
    for u, v in G.edges():
        A[u, v] = A[v, u] = 1
    for t in range(1, T + 1):
        assert table.c(t) == Fraction(int(np.trace(np.linalg.matrix_power(A, t))), G.n)
    assert table.c(2) == Fraction(2 * G.num_edges, G.n)
    assert table.c(1) == 0


@settings(max_examples=40, deadline=None)
@given(graphs(n_max=8, d_max=3))
def test_walk_counts_match_dfs(G):
    table = walk_counts(G, 5)
    for x in range(G.n):
        for t in range(6):
            assert table.closed[t][x] == closed_walks_by_dfs(G, x, t)


def test_observer_dependents_cover_reach():
    G = cycle(10)
    obs = LocalObserver(G, "tau", 2, 2)
    assert sorted(obs.dependents(0)) == [0, 1, 2, 8, 9]
    assert sorted(LocalObserver(G, "sigma", 2).dependents(0)) == [0, 1, 9]


def test_star_law_of_two_coloured_path():
    law = sigma(path(3), Coloring(2, (1, 2, 1)))
    assert law[StarType(2, (2, 0))] == Fraction(1, 3)
    assert law[StarType(1, (0, 1))] == Fraction(2, 3)
