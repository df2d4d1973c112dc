"""Counting, ranking, and sampling cyclically reduced words.

Walks through the word universe that random triangular presentations are
drawn from: the closed-form count 2n(4n^2 - 6n + 3) for length 3, exact
lexicographic rank/unrank, and uniform sampling.
"""
import numpy as np

from trigroup import (count_cyclically_reduced, count_length3_closed_form,
                      rank, sample_word, unrank, universe_size)


def main():
    print("Universe sizes N(n) = 2n(4n^2 - 6n + 3) for length-3 words:")
    for n in (2, 5, 10, 50, 100):
        assert count_cyclically_reduced(n, 3) == count_length3_closed_form(n)
        print(f"  n={n:>4}: N = {universe_size(n):,}")

    print("\nThe count generalizes to any length via a transfer-matrix DP:")
    for length in range(1, 8):
        print(f"  n=3, length={length}: {count_cyclically_reduced(3, length):,}")

    n = 2
    print(f"\nThe full universe at n={n} in lexicographic order:")
    words = [unrank(n, 3, k) for k in range(universe_size(n))]
    for k, w in enumerate(words):
        assert rank(n, w) == k
        end = "\n" if k % 7 == 6 else ""
        print(f"  {k:>2}:{w.text():<11}", end=end)

    rng = np.random.default_rng(0)
    print("\nTen uniform draws at n=100 (each equally likely among "
          f"{universe_size(100):,} words):")
    for _ in range(10):
        w = sample_word(100, 3, rng)
        print(f"  rank {rank(100, w):>9,}  {w.text()}")


if __name__ == "__main__":
    main()
