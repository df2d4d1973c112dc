"""The giant component of random intersection graphs.

Solves the fixed point gamma = exp(beta * (gamma - 1)) for the limiting
largest-component fraction 1 - gamma, then compares the prediction with
simulated G(n, m, rho) graphs at m = ceil(n^1.5), rho = sqrt(beta / (n m)).
"""
import statistics

from trigroup import gamma_solve, giant_experiment, giant_fraction


def main():
    print("Fixed point gamma(beta) and giant fraction 1 - gamma(beta):")
    for beta in (0.8, 1.0, 1.1, 1.42, 2.0, 4.0):
        g = gamma_solve(beta)
        print(f"  beta={beta:<5} gamma={g:.6f} giant={1 - g:.6f}")
    print("\nAt beta = 1.42 the predicted fraction clears the 0.52 mark "
          f"used by the collapse argument: {giant_fraction(1.42):.4f}")

    print("\nSimulated largest-component fractions (n vertices, m = n^1.5 "
          "features, beta = 1.42):")
    print(f"  {'n':>6} {'mean':>8} {'std':>8} {'predicted':>10}")
    for n in (300, 1000, 3000):
        table = giant_experiment(n, 1.5, 1.42, trials=15, master_seed=1)
        fr = [row["largest_fraction"] for row in table.rows]
        print(f"  {n:>6} {statistics.mean(fr):8.4f} "
              f"{statistics.stdev(fr):8.4f} {giant_fraction(1.42):10.4f}")
    print("\nConvergence is slow: each feature shared by several vertices "
          "forms a clique,\nand that clustering (which decays like n^-1/4 "
          "here) drags finite-n fractions\nbelow the tree-like limit.")


if __name__ == "__main__":
    main()
