"""Monte Carlo sweep across the collapse threshold t = C * n^(3/2).

Runs seeded trials over a (n, C) grid for the binomial model and prints the
detected-trivial / certified-nontrivial / unknown split per cell.  Results
are reproducible from the master seed alone, independent of parallelism.
"""
from trigroup import SweepGrid, sweep


def main():
    grid = SweepGrid(
        n_values=(40, 80),
        c_values=(0.05, 0.3, 1.0, 4.0),
        trials=30,
        model="binomial",
        master_seed=20260823,
    )
    print(f"binomial model, p = C * n^(-3/2), {grid.trials} trials/cell, "
          f"master seed {grid.master_seed}\n")
    table = sweep(grid)
    header = f"{'n':>4} {'C':>6} {'p':>10} {'trivial':>8} {'nontriv':>8} {'unknown':>8}"
    print(header)
    for row in table.rows:
        print(f"{row['n']:>4} {row['C']:>6} {row['t_or_p']:>10.2e} "
              f"{row['trivial_detected']:>8} {row['nontrivial_detected']:>8} "
              f"{row['unknown']:>8}")
    print("\nDetection turns on as C grows past the n^(3/2) threshold; "
          "below it the\nabelianization certifies nontriviality instead.")


if __name__ == "__main__":
    main()
