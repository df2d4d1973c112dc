"""Intersection graphs: sampling, the graph derived from a two-stage sample,
components against a BFS oracle, and the giant-component fixed point."""
import io
import math
from collections import deque

import numpy as np
import pytest

from trigroup.intersection import (GraphError,
                                   IntersectionGraph, components, derive_rig,
                                   edge_probability, gamma_solve,
                                   giant_fraction, sample_rig, write_edge_list)
from trigroup.presentation import (SplitSample, default_partition,
                                   sample_two_stage)
from trigroup.words import Word


def bfs_components(vertex_count, edges):
    """Oracle: component id = smallest vertex index, via adjacency-list BFS."""
    adj = {v: [] for v in range(vertex_count)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    ids = [-1] * vertex_count
    for start in range(vertex_count):
        if ids[start] != -1:
            continue
        queue = deque([start])
        ids[start] = start
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if ids[u] == -1:
                    ids[u] = start
                    queue.append(u)
    return ids


# ---------------------------------------------------------------------------
# graph structure


def test_intersection_graph_validation():
    with pytest.raises(GraphError):
        IntersectionGraph(2, 3, (frozenset({0}),))
    with pytest.raises(GraphError):
        IntersectionGraph(1, 3, (frozenset({3}),))


def test_edges_from_shared_features():
    g = IntersectionGraph(4, 3, (frozenset({0}), frozenset({0, 1}),
                                 frozenset({1}), frozenset()))
    assert g.edges() == {(0, 1), (1, 2)}


def test_write_edge_list():
    g = IntersectionGraph(3, 1, (frozenset({0}), frozenset({0}), frozenset()))
    buf = io.StringIO()
    write_edge_list(g, buf)
    assert buf.getvalue() == "0 1\n"


# ---------------------------------------------------------------------------
# sampling


def test_sample_rig_extremes():
    rng = np.random.default_rng(0)
    empty = sample_rig(5, 10, 0.0, rng)
    assert all(not feats for feats in empty.assignment)
    full = sample_rig(5, 10, 1.0, rng)
    assert all(feats == frozenset(range(10)) for feats in full.assignment)
    with pytest.raises(GraphError):
        sample_rig(5, 10, 1.5, rng)


def test_sample_rig_deterministic():
    a = sample_rig(30, 100, 0.05, np.random.default_rng(8))
    b = sample_rig(30, 100, 0.05, np.random.default_rng(8))
    assert a == b


def test_sample_rig_feature_counts_binomial_mean():
    """Per-vertex feature counts average m*rho within 3 standard errors."""
    m, rho, vertices = 400, 0.03, 3000
    g = sample_rig(vertices, m, rho, np.random.default_rng(11))
    mean = sum(len(f) for f in g.assignment) / vertices
    se = math.sqrt(m * rho * (1 - rho) / vertices)
    assert abs(mean - m * rho) <= 3 * se


def test_sample_rig_edge_density_matches_formula():
    """Empirical edge frequency matches 1-(1-rho^2)^m within 3 standard
    errors of the pair-count estimate, averaged over trials."""
    vertices, m, rho, trials = 500, 10_000, 0.002, 50
    p_hat = edge_probability(rho, m)
    pairs = vertices * (vertices - 1) // 2
    total_edges = 0
    for seed in range(trials):
        g = sample_rig(vertices, m, rho, np.random.default_rng(seed))
        total_edges += len(g.edges())
    observed = total_edges / (trials * pairs)
    se = math.sqrt(p_hat * (1 - p_hat) / (trials * pairs))
    assert abs(observed - p_hat) <= 3 * se


# ---------------------------------------------------------------------------
# components


def test_components_against_bfs_oracle():
    """components agrees with a BFS oracle on 100 random small instances."""
    rng = np.random.default_rng(99)
    for _ in range(100):
        vertices = int(rng.integers(1, 51))
        m = int(rng.integers(1, 30))
        rho = float(rng.uniform(0.0, 0.3))
        g = sample_rig(vertices, m, rho, rng)
        summary = components(g)
        oracle_ids = bfs_components(vertices, g.edges())
        assert list(summary.component_ids) == oracle_ids
        sizes = {}
        for cid in oracle_ids:
            sizes[cid] = sizes.get(cid, 0) + 1
        assert summary.sizes == sizes
        best = max(sizes.values())
        assert summary.largest_size == best
        assert summary.largest_id == min(c for c, s in sizes.items() if s == best)
        assert summary.largest_members == tuple(
            v for v in range(vertices) if oracle_ids[v] == summary.largest_id)
        assert summary.largest_fraction == pytest.approx(best / vertices)


def test_components_singletons():
    g = IntersectionGraph(3, 2, (frozenset(), frozenset(), frozenset()))
    summary = components(g)
    assert summary.component_ids == (0, 1, 2)
    assert summary.largest_size == 1
    assert summary.largest_id == 0  # smallest id wins ties


# ---------------------------------------------------------------------------
# edge probability and fixed point


def test_edge_probability_examples():
    assert edge_probability(0.0, 100) == 0.0
    assert edge_probability(1.0, 100) == 1.0
    assert edge_probability(0.5, 1) == pytest.approx(0.25)
    # stable in the tiny-rho regime where naive powering loses precision
    rho, m = 1e-9, 10**6
    assert edge_probability(rho, m) == pytest.approx(m * rho * rho, rel=1e-6)


def test_gamma_solve_subcritical():
    assert gamma_solve(0.0) == 1.0
    assert gamma_solve(0.5) == 1.0
    assert gamma_solve(1.0) == 1.0
    assert giant_fraction(0.7) == 0.0


def test_gamma_solve_reference_value():
    gamma = gamma_solve(1.42)
    assert gamma == pytest.approx(0.4735, abs=1e-3)
    assert abs(gamma - math.exp(1.42 * (gamma - 1.0))) <= 1e-10
    assert giant_fraction(1.42) >= 0.52


def test_gamma_solve_residual_grid():
    for beta in np.linspace(1.01, 12.0, 60):
        gamma = gamma_solve(float(beta))
        assert 0.0 < gamma < 1.0
        assert abs(gamma - math.exp(beta * (gamma - 1.0))) <= 1e-10


def test_gamma_solve_monotone_decreasing():
    values = [gamma_solve(b) for b in np.linspace(1.05, 8.0, 40)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_gamma_solve_known_closed_form():
    # at beta = 2, gamma = -W(-2 e^-2)/2 ~ 0.2031878699
    assert gamma_solve(2.0) == pytest.approx(0.20318786997997992, abs=1e-9)


def test_gamma_solve_rejects_negative():
    with pytest.raises(GraphError):
        gamma_solve(-0.1)


# ---------------------------------------------------------------------------
# derived graph


def make_split(n, r1_words, r2_words, p=0.01):
    part = default_partition(n)
    return SplitSample(part, frozenset(r1_words), frozenset(r2_words), p)


def test_derive_rig_structure():
    """n=4: S1 = {0,1} so vertices are letters x0,X0,x1,X1; a stage-1 word
    contributes its S1 letter as vertex and its S2-letter pair as feature."""
    n = 4
    w1 = Word((0, 4, 6))   # x0 x2 x3 -> vertex x0, feature (x2, x3)
    w2 = Word((4, 2, 6))   # x2 x1 x3 -> vertex x1, feature (x3, x2)
    w3 = Word((5, 7, 1))   # X2 X3 X0 -> vertex X0, feature (X2, X3)
    split = make_split(n, [w1, w2, w3], [])
    g = derive_rig(split)
    assert g.vertex_letters == (0, 1, 2, 3)
    assert g.vertex_count == 4
    k2 = 2 * 2
    assert g.feature_count == k2 * (k2 - 1)
    letter_feats = {g.vertex_letters[v]: {g.feature_pairs[f] for f in feats}
                    for v, feats in enumerate(g.assignment)}
    assert letter_feats[0] == {(4, 6)}
    assert letter_feats[2] == {(6, 4)}
    assert letter_feats[1] == {(5, 7)}
    assert letter_feats[3] == set()
    # distinct ordered pairs, so x0 and x1 share no feature here
    assert g.edges() == set()


def test_derive_rig_shared_feature_makes_edge():
    n = 4
    w1 = Word((0, 4, 6))   # x0 x2 x3
    w2 = Word((2, 4, 6))   # x1 x2 x3 -> same feature (x2, x3)
    g = derive_rig(make_split(n, [w1, w2], []))
    assert g.edges() == {(0, 2)}
    assert g.sources[(0, 0)] == (w1, 0)
    assert g.sources[(2, 0)] == (w2, 0)


def test_derive_rig_rotation_invariant_feature():
    """The same underlying relation read at its S1 letter, regardless of the
    rotation it was stored in."""
    n = 4
    w = Word((4, 6, 0))    # x2 x3 x0: S1 letter at rotation 2
    g = derive_rig(make_split(n, [w], []))
    (feats,) = [f for f in g.assignment if f]
    assert g.feature_pairs[next(iter(feats))] == (4, 6)
    assert g.sources[(0, 0)] == (w, 2)


def test_derive_rig_parameters():
    n, p = 8, 0.01
    split = sample_two_stage(n, p, np.random.default_rng(5))
    g = derive_rig(split)
    assert g.vertex_count == 2 * len(split.partition.s1)
    k2 = 2 * len(split.partition.s2)
    assert g.feature_count == k2 * (k2 - 1)
    assert g.rho_exact == pytest.approx(1 - (1 - p) ** 3)
    assert g.rho_lower == p
    assert g.beta_exact == pytest.approx(
        g.rho_exact ** 2 * g.feature_count * g.vertex_count)
    assert g.beta_lower == pytest.approx(p * p * n * n * (n - 1))


def test_derive_rig_requires_stage2_generators():
    part = default_partition(1)
    split = SplitSample(part, frozenset(), frozenset(), 0.1)
    with pytest.raises(GraphError):
        derive_rig(split)


def test_derived_graph_monotone_in_p():
    """Coupled two-stage samples (same seed, nested p via nested binomial
    draws) yield derived graphs with nested assignments."""
    n = 10
    small = sample_two_stage(n, 0.002, np.random.default_rng(21))
    large = sample_two_stage(n, 0.004, np.random.default_rng(21))
    if small.r1 <= large.r1:  # nesting of r1 holds whenever the draws nest
        gs = derive_rig(small)
        gl = derive_rig(large)
        for letter, feats in zip(gs.vertex_letters, gs.assignment):
            v_large = gl.vertex_letters.index(letter)
            pairs_small = {gs.feature_pairs[f] for f in feats}
            pairs_large = {gl.feature_pairs[f] for f in gl.assignment[v_large]}
            assert pairs_small <= pairs_large
