"""Exact and floating recurrence coefficients of the Gamma-type family m_k = (k+1)!.

    python scripts/jacobi_table.py [M]
"""
import sys

from levyjacobi.measure import JumpMeasure, moments
from levyjacobi.orthopoly import golub_welsch, jacobi_from_moments, jacobi_matrix


def main():
    M = int(sys.argv[1]) if len(sys.argv) > 1 else 9
    fam = JumpMeasure(family="gamma2")
    J = jacobi_matrix(fam, M)
    Jf = jacobi_from_moments([float(x) for x in moments(fam, 2 * M - 1)], M)
    print(f"{'n':>3} {'a_n':>6} {'b_n^2':>6} {'float a_n':>22} {'float b_n^2':>22}")
    for n in range(M):
        b2 = str(J.b2_exact[n - 1]) if n else "-"
        fb2 = f"{Jf.b[n - 1] ** 2:22.15g}" if n else f"{'-':>22}"
        print(f"{n:>3} {str(J.a_exact[n]):>6} {b2:>6} {Jf.a[n]:22.15g} {fb2}")
    q, _ = golub_welsch(J)
    print("\nGauss nodes:  ", " ".join(f"{x:.6g}" for x in q.nodes))
    print("Gauss weights:", " ".join(f"{x:.3e}" for x in q.weights))


if __name__ == "__main__":
    main()
