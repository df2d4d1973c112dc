"""Random intersection graphs, the graph derived from a two-stage sample,
connected components, and the giant-component fixed-point law."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .presentation import SplitSample
from .words import Word


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class IntersectionGraph:
    vertex_count: int
    feature_count: int
    assignment: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.assignment) != self.vertex_count:
            raise GraphError("assignment length does not match vertex count")
        for feats in self.assignment:
            if any(not 0 <= f < self.feature_count for f in feats):
                raise GraphError("feature identifier out of range")

    def feature_holders(self) -> dict[int, list[int]]:
        holders: dict[int, list[int]] = {}
        for v, feats in enumerate(self.assignment):
            for f in feats:
                holders.setdefault(f, []).append(v)
        return holders

    def edges(self) -> set[tuple[int, int]]:
        """Materialized edge set; vertices are adjacent iff they share a feature."""
        out: set[tuple[int, int]] = set()
        for vs in self.feature_holders().values():
            for i in range(len(vs)):
                for j in range(i + 1, len(vs)):
                    a, b = vs[i], vs[j]
                    out.add((a, b) if a < b else (b, a))
        return out


@dataclass(frozen=True)
class DerivedGraph(IntersectionGraph):
    """Intersection graph built from stage-1 relations.

    Vertices are the letters of S1 and their inverses (vertex i carries letter
    code vertex_letters[i]); features are ordered pairs (c, d) of S2-letters
    with d != c^-1, remapped to dense identifiers in order of first occurrence.
    sources[(v, f)] records one stage-1 relation assigning feature f to vertex
    v, as (word, rotation) with the vertex letter at position `rotation`.
    """
    vertex_letters: tuple[int, ...] = ()
    feature_pairs: tuple[tuple[int, int], ...] = ()
    sources: dict = field(default_factory=dict)
    rho_exact: float = 0.0
    rho_lower: float = 0.0
    beta_exact: float = 0.0
    beta_lower: float = 0.0


@dataclass(frozen=True, eq=False)
class ComponentSummary:
    """Connected components; a component's id is its smallest vertex index."""
    component_ids: tuple[int, ...]
    sizes: dict[int, int]
    largest_id: int
    largest_size: int
    largest_members: tuple[int, ...]

    @property
    def vertex_count(self) -> int:
        return len(self.component_ids)

    @property
    def largest_fraction(self) -> float:
        return self.largest_size / len(self.component_ids)


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def _distinct_features(m: int, k: int, rng: np.random.Generator) -> frozenset[int]:
    if k > m // 2:
        return frozenset(int(v) for v in rng.permutation(m)[:k])
    chosen: set[int] = set()
    while len(chosen) < k:
        for v in rng.integers(0, m, size=max(16, 2 * (k - len(chosen)))):
            chosen.add(int(v))
            if len(chosen) == k:
                break
    return frozenset(chosen)


def sample_rig(vertex_count: int, m: int, rho: float, rng: np.random.Generator) -> IntersectionGraph:
    """Each (vertex, feature) pair assigned independently with probability rho;
    drawn as per-vertex Binomial(m, rho) counts followed by distinct features."""
    if not 0.0 <= rho <= 1.0:
        raise GraphError(f"rho must lie in [0, 1], got {rho}")
    counts = rng.binomial(m, rho, size=vertex_count)
    assignment = tuple(_distinct_features(m, int(k), rng) for k in counts)
    return IntersectionGraph(vertex_count, m, assignment)


def derive_rig(split: SplitSample) -> DerivedGraph:
    """Build the intersection graph of a two-stage sample.

    A feature (c, d) is assigned to a vertex letter a when R1 contains any of
    the cyclic rotations acd, cda, dac (each stage-1 word carries exactly one
    S1 letter, so it contributes exactly one (vertex, feature) pair).
    """
    partition = split.partition
    if not partition.s2:
        raise GraphError("two-stage split with empty S2")
    s1_sorted = sorted(partition.s1)
    vertex_letters = tuple(code for g in s1_sorted for code in (2 * g, 2 * g + 1))
    vertex_of = {code: i for i, code in enumerate(vertex_letters)}
    s1_gens = partition.s1

    k2 = 2 * len(partition.s2)
    m = k2 * (k2 - 1)

    feature_ids: dict[tuple[int, int], int] = {}
    feature_pairs: list[tuple[int, int]] = []
    features: list[set[int]] = [set() for _ in vertex_letters]
    sources: dict[tuple[int, int], tuple[Word, int]] = {}

    for word in sorted(split.r1, key=lambda w: w.codes):
        codes = word.codes
        i = next(j for j in range(3) if (codes[j] >> 1) in s1_gens)
        a = codes[i]
        pair = (codes[(i + 1) % 3], codes[(i + 2) % 3])
        f = feature_ids.get(pair)
        if f is None:
            f = len(feature_pairs)
            feature_ids[pair] = f
            feature_pairs.append(pair)
        v = vertex_of[a]
        features[v].add(f)
        sources.setdefault((v, f), (word, i))

    p = split.p
    rho_exact = -math.expm1(3.0 * math.log1p(-p)) if p < 1.0 else 1.0
    n = partition.n
    return DerivedGraph(
        vertex_count=len(vertex_letters),
        feature_count=m,
        assignment=tuple(frozenset(fs) for fs in features),
        vertex_letters=vertex_letters,
        feature_pairs=tuple(feature_pairs),
        sources=sources,
        rho_exact=rho_exact,
        rho_lower=p,
        beta_exact=rho_exact * rho_exact * m * len(vertex_letters),
        beta_lower=p * p * n * n * (n - 1),
    )


def components(g: IntersectionGraph) -> ComponentSummary:
    uf = _UnionFind(g.vertex_count)
    first_holder: dict[int, int] = {}
    for v, feats in enumerate(g.assignment):
        for f in feats:
            w = first_holder.setdefault(f, v)
            if w != v:
                uf.union(w, v)
    root_to_id: dict[int, int] = {}
    ids = []
    for v in range(g.vertex_count):
        r = uf.find(v)
        ids.append(root_to_id.setdefault(r, v))
    sizes: dict[int, int] = {}
    for cid in ids:
        sizes[cid] = sizes.get(cid, 0) + 1
    largest_id = -1
    largest_size = 0
    for cid in sorted(sizes):
        if sizes[cid] > largest_size:
            largest_id, largest_size = cid, sizes[cid]
    members = tuple(v for v, cid in enumerate(ids) if cid == largest_id)
    return ComponentSummary(tuple(ids), sizes, largest_id, largest_size, members)


def edge_probability(rho: float, m: int) -> float:
    """1 - (1 - rho^2)^m, evaluated stably for tiny rho^2 * m."""
    if not 0.0 <= rho <= 1.0:
        raise GraphError(f"rho must lie in [0, 1], got {rho}")
    if rho == 1.0:
        return 1.0 if m >= 1 else 0.0
    return -math.expm1(m * math.log1p(-rho * rho))


def gamma_solve(beta: float, residual_tol: float = 1e-10) -> float:
    """Fixed point of gamma = exp(beta * (gamma - 1)) in (0, 1) for beta > 1;
    returns 1 for beta <= 1.  Bisection with an adaptively tightened upper
    bracket, since the root approaches 1 as beta -> 1+."""
    if beta < 0:
        raise GraphError(f"beta must be nonnegative, got {beta}")
    if beta <= 1.0:
        return 1.0

    def g(x: float) -> float:
        return x - math.exp(beta * (x - 1.0))

    hi = 1.0 - 1e-9
    while g(hi) <= 0.0:
        gap = (1.0 - hi) / 2.0
        if gap < 1e-300:
            return 1.0
        hi = 1.0 - gap
    lo = 0.0  # g(0) = -exp(-beta) < 0
    for _ in range(500):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if abs(g(root)) > residual_tol:
        raise GraphError(f"gamma_solve failed to converge for beta={beta}")
    return root


def giant_fraction(beta: float) -> float:
    """Limiting largest-component fraction 1 - gamma(beta); 0 for beta <= 1."""
    return 1.0 - gamma_solve(beta)


def write_edge_list(g: IntersectionGraph, fh: IO[str]) -> None:
    """One 'u v' pair per line, sorted, for oracle cross-checks."""
    for a, b in sorted(g.edges()):
        fh.write(f"{a} {b}\n")
