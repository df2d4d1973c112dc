"""Random triangular presentations: the uniform model, the binomial model,
and the two-stage split used by the collapse witness pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .words import Word, count_cyclically_reduced, is_cyclically_reduced, unrank

RELATION_LENGTH = 3

# Draws are consumed in fixed-size chunks so the accepted-rank sequence for a
# given seed does not depend on how many ranks are requested; uniform samples
# with growing t are therefore nested per seed.
_CHUNK = 1024


class PresentationError(ValueError):
    """Invalid presentation, partition, or sampling parameters."""


def universe_size(n: int) -> int:
    """Number of distinct cyclically reduced length-3 words over n generators."""
    return count_cyclically_reduced(n, RELATION_LENGTH)


@dataclass(frozen=True)
class Presentation:
    n: int
    relations: frozenset[Word]

    def __post_init__(self):
        if self.n < 1:
            raise PresentationError(f"need n >= 1, got {self.n}")
        for w in self.relations:
            if len(w) != RELATION_LENGTH:
                raise PresentationError(f"relation {w.text()!r} has length {len(w)}")
            if not is_cyclically_reduced(w):
                raise PresentationError(f"relation {w.text()!r} is not cyclically reduced")
            if w.max_generator() >= self.n:
                raise PresentationError(
                    f"relation {w.text()!r} uses generators outside [0, {self.n})")

    @property
    def t(self) -> int:
        return len(self.relations)

    def sorted_relations(self) -> list[Word]:
        """Relations in ascending rank (= lexicographic) order."""
        return sorted(self.relations, key=lambda w: w.codes)


@dataclass(frozen=True)
class Partition:
    n: int
    s1: frozenset[int]

    def __post_init__(self):
        if len(self.s1) != -(-self.n // 2):
            raise PresentationError(
                f"|S1| must be ceil(n/2) = {-(-self.n // 2)}, got {len(self.s1)}")
        if not all(0 <= g < self.n for g in self.s1):
            raise PresentationError("S1 contains out-of-range generators")

    @property
    def s2(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.s1


def default_partition(n: int) -> Partition:
    return Partition(n, frozenset(range(-(-n // 2))))


def stage_of(word: Word, partition: Partition) -> int:
    """1 iff exactly one letter's generator lies in S1, else 2."""
    hits = sum(1 for c in word.codes if (c >> 1) in partition.s1)
    return 1 if hits == 1 else 2


@dataclass(frozen=True)
class SplitSample:
    partition: Partition
    r1: frozenset[Word]
    r2: frozenset[Word]
    p: float

    def __post_init__(self):
        for w in self.r1:
            if stage_of(w, self.partition) != 1:
                raise PresentationError(f"{w.text()!r} is not a stage-1 word")
        for w in self.r2:
            if stage_of(w, self.partition) != 2:
                raise PresentationError(f"{w.text()!r} is not a stage-2 word")

    @property
    def n(self) -> int:
        return self.partition.n

    def presentation(self) -> Presentation:
        return Presentation(self.n, self.r1 | self.r2)


def density(n: int, t: int) -> float:
    """ln t / (3 ln n), the relation-count exponent relative to the n^3 universe."""
    if n < 2:
        raise PresentationError(f"density needs n >= 2, got {n}")
    if t < 1:
        raise PresentationError(f"density needs t >= 1, got {t}")
    return math.log(t) / (3.0 * math.log(n))


def _distinct_ranks(universe: int, t: int, rng: np.random.Generator) -> list[int]:
    """First t distinct values of the rng's uniform stream over [0, universe)."""
    if t > universe:
        raise PresentationError(f"requested {t} distinct ranks from universe of {universe}")
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < t:
        for v in rng.integers(0, universe, size=_CHUNK):
            v = int(v)
            if v not in seen:
                seen.add(v)
                out.append(v)
                if len(out) == t:
                    break
    return out


def sample_uniform(n: int, t: int, rng: np.random.Generator) -> Presentation:
    """Uniform over all t-subsets of the length-3 universe.

    For a fixed seed the sample grows monotonically in t: it is a prefix of
    one seed-determined sequence of distinct ranks.
    """
    total = universe_size(n)
    if t > total:
        raise PresentationError(f"t={t} exceeds universe size {total}")
    ranks = _distinct_ranks(total, t, rng)
    return Presentation(n, frozenset(unrank(n, RELATION_LENGTH, r) for r in ranks))


def sample_binomial(n: int, p: float, rng: np.random.Generator) -> Presentation:
    """Each universe word included independently with probability p.

    Implemented as |R| ~ Binomial(N, p) followed by that many distinct
    uniform ranks, which is equivalent in distribution and O(|R|) instead of
    O(N) when p is small.
    """
    if not 0.0 <= p <= 1.0:
        raise PresentationError(f"p must lie in [0, 1], got {p}")
    total = universe_size(n)
    t = int(rng.binomial(total, p))
    ranks = _distinct_ranks(total, t, rng)
    return Presentation(n, frozenset(unrank(n, RELATION_LENGTH, r) for r in ranks))


def sample_two_stage(n: int, p: float, rng: np.random.Generator) -> SplitSample:
    """Binomial sample split into stage-1 words (exactly one S1 letter) and
    the rest; R1 | R2 is distributed identically to sample_binomial(n, p)."""
    if n < 2:
        raise PresentationError(f"two-stage sampling needs n >= 2, got {n}")
    partition = default_partition(n)
    pres = sample_binomial(n, p, rng)
    r1 = frozenset(w for w in pres.relations if stage_of(w, partition) == 1)
    return SplitSample(partition, r1, pres.relations - r1, p)


def write_presentation(pres: Presentation, fh: IO[str]) -> None:
    """Line 1 is 'n=<int>'; then one relation per line, ascending rank."""
    fh.write(f"n={pres.n}\n")
    for w in pres.sorted_relations():
        fh.write(w.text() + "\n")


def read_presentation(fh: IO[str]) -> Presentation:
    header = fh.readline().strip()
    if not header.startswith("n="):
        raise PresentationError(f"bad presentation header {header!r}")
    try:
        n = int(header[2:])
    except ValueError as exc:
        raise PresentationError(f"bad presentation header {header!r}") from exc
    relations = []
    for line in fh:
        line = line.strip()
        if line:
            relations.append(Word.from_text(line))
    return Presentation(n, frozenset(relations))


def save_presentation(pres: Presentation, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_presentation(pres, fh)


def load_presentation(path: str) -> Presentation:
    with open(path, "r", encoding="utf-8") as fh:
        return read_presentation(fh)
