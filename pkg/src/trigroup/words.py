"""Cyclically reduced words over n generators and their formal inverses.

Letters are encoded as integers: generator i has code 2*i, its inverse has
code 2*i + 1, so inversion is an XOR with 1.  Words order, rank and unrank
lexicographically on their code sequences.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

MAX_COUNT = 2**63 - 1

_TOKEN_RE = re.compile(r"^([xX])(\d+)$")


class WordError(ValueError):
    """Malformed word or out-of-range rank."""


class CountOverflowError(OverflowError):
    """Word count does not fit in a signed 64-bit integer."""


@dataclass(frozen=True, order=True)
class Letter:
    generator_index: int
    inverted: bool = False

    @property
    def code(self) -> int:
        return 2 * self.generator_index + int(self.inverted)

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        if code < 0:
            raise WordError(f"negative letter code {code}")
        return cls(code >> 1, bool(code & 1))

    @classmethod
    def from_token(cls, token: str) -> "Letter":
        m = _TOKEN_RE.match(token)
        if m is None:
            raise WordError(f"bad letter token {token!r}")
        return cls(int(m.group(2)), m.group(1) == "X")

    def inverse(self) -> "Letter":
        return Letter(self.generator_index, not self.inverted)

    def token(self) -> str:
        return ("X" if self.inverted else "x") + str(self.generator_index)


def inverse(letter: Letter) -> Letter:
    """Formal inverse of a letter; involutive."""
    return letter.inverse()


@dataclass(frozen=True, order=True)
class Word:
    codes: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.codes):
            raise WordError("letter codes must be nonnegative")

    def __len__(self) -> int:
        return len(self.codes)

    @classmethod
    def from_letters(cls, letters: Iterable[Letter]) -> "Word":
        return cls(tuple(l.code for l in letters))

    @classmethod
    def from_text(cls, text: str) -> "Word":
        tokens = text.split()
        if not tokens:
            raise WordError("empty word text")
        return cls(tuple(Letter.from_token(t).code for t in tokens))

    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter.from_code(c) for c in self.codes)

    def text(self) -> str:
        return " ".join(Letter.from_code(c).token() for c in self.codes)

    def inverse(self) -> "Word":
        return Word(tuple(c ^ 1 for c in reversed(self.codes)))

    def max_generator(self) -> int:
        return max(c >> 1 for c in self.codes)


def is_cyclically_reduced(word: Word) -> bool:
    """True iff the word is reduced and its first letter is not the inverse of its last."""
    codes = word.codes
    if not codes:
        raise WordError("empty word")
    for a, b in zip(codes, codes[1:]):
        if b == a ^ 1:
            return False
    return codes[0] != codes[-1] ^ 1


# Completion counts are tracked in three states relative to the fixed first
# letter f: SAME (current letter is f), INV (current is f^-1), OTHER.  The
# count only depends on the state, never on the concrete letters, so the
# table is shared by every choice of first letter.
_SAME, _INV, _OTHER = 0, 1, 2


@lru_cache(maxsize=256)
def _completion_table(n: int, length: int) -> tuple[tuple[int, int, int], ...]:
    """rows[r][s]: reduced continuations of r more letters from state s whose
    final letter is not the inverse of the first letter."""
    k = 2 * n
    rows = [(1, 0, 1)]
    for _ in range(1, length):
        s, i, o = rows[-1]
        rows.append((
            s + max(k - 2, 0) * o,
            i + max(k - 2, 0) * o,
            s + i + max(k - 3, 0) * o,
        ))
    return tuple(rows)


def count_length3_closed_form(n: int) -> int:
    """Closed form 2n(4n^2 - 6n + 3), kept as a cross-check of the DP count."""
    return 2 * n * (4 * n * n - 6 * n + 3)


def count_cyclically_reduced(n: int, length: int) -> int:
    if n < 1 or length < 1:
        raise WordError(f"need n >= 1 and length >= 1, got n={n}, length={length}")
    total = 2 * n * _completion_table(n, length)[length - 1][_SAME]
    if total > MAX_COUNT:
        raise CountOverflowError(
            f"count for n={n}, length={length} exceeds 64-bit range")
    return total


def _select_letter(rem: int, row: tuple[int, int, int], first: int,
                   forbidden: int) -> tuple[int, int]:
    """Smallest admissible letter d whose cumulative completion count exceeds
    rem, and the residual rank within d's block.  Letters other than the
    first letter, its inverse, and the forbidden letter all carry the same
    OTHER weight, so the cumulative count is inverted segmentwise in O(1)."""
    other = row[_OTHER]
    lo = 0
    for s in sorted({first, first ^ 1, forbidden}):
        segment = (s - lo) * other
        if rem < segment:
            return lo + rem // other, rem % other
        rem -= segment
        if s != forbidden:
            w = row[_SAME] if s == first else row[_INV]
            if rem < w:
                return s, rem
            rem -= w
        lo = s + 1
    return lo + rem // other, rem % other


def _prefix_weight(target: int, row: tuple[int, int, int], first: int,
                   forbidden: int) -> int:
    """Total completion count of admissible letters smaller than target."""
    total = 0
    nonspecial = target
    for s in {first, first ^ 1, forbidden}:
        if s < target:
            nonspecial -= 1
            if s != forbidden:
                total += row[_SAME] if s == first else row[_INV]
    return total + nonspecial * row[_OTHER]


def unrank(n: int, length: int, k: int) -> Word:
    """k-th cyclically reduced word in lexicographic order of letter codes."""
    total = count_cyclically_reduced(n, length)
    if not 0 <= k < total:
        raise WordError(f"rank {k} out of range [0, {total})")
    table = _completion_table(n, length)
    per_first = table[length - 1][_SAME]
    first, rem = divmod(k, per_first)
    codes = [first]
    prev = first
    for pos in range(1, length):
        row = table[length - 1 - pos]
        d, rem = _select_letter(rem, row, first, prev ^ 1)
        codes.append(d)
        prev = d
    return Word(tuple(codes))


def rank(n: int, word: Word) -> int:
    """Inverse of unrank under the same lexicographic order."""
    if not is_cyclically_reduced(word):
        raise WordError(f"word {word.text()!r} is not cyclically reduced")
    if word.max_generator() >= n:
        raise WordError(f"word {word.text()!r} uses generators outside [0, {n})")
    length = len(word)
    table = _completion_table(n, length)
    first = word.codes[0]
    k = first * table[length - 1][_SAME]
    prev = first
    for pos in range(1, length):
        row = table[length - 1 - pos]
        target = word.codes[pos]
        k += _prefix_weight(target, row, first, prev ^ 1)
        prev = target
    return k


def sample_word(n: int, length: int, rng: np.random.Generator) -> Word:
    """Uniform sample over all cyclically reduced words of the given length."""
    total = count_cyclically_reduced(n, length)
    return unrank(n, length, int(rng.integers(total)))
