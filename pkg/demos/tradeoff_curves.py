"""Print the storage / bandwidth curves for k = 8 with ten helpers.

Four curves: one or two failures per round, nothing or half the storage
surviving a failure.  Each line is a bandwidth and the smallest storage that
still lets any k nodes rebuild the file.
"""

from fractions import Fraction

from bcrepair import SystemParams, mbr_point, msr_point, sample_curve
from bcrepair.tradeoff import default_gamma_grid, gamma_breakpoints

K, HELPERS = 8, 10


def main():
    for r in (1, 2):
        for rho in (Fraction(0), Fraction(1, 2)):
            p = SystemParams.make(HELPERS + r, K, r, rho, 1)
            lo, hi = mbr_point(p), msr_point(p)
            print(f"r={r} rho={rho}: MBR ({lo.alpha}, {lo.gamma})  MSR ({hi.alpha}, {hi.gamma})")
            print("  corners at gamma =", ", ".join(str(g) for g in gamma_breakpoints(p)))
            for pt in sample_curve(p, default_gamma_grid(p, 12)):
                per_node = pt.gamma_per_failed_node
                print(f"  gamma {float(pt.gamma):.4f}  per failed node {float(per_node):.4f}"
                      f"  alpha {float(pt.alpha):.4f}  [{pt.regime}]")
            print()


if __name__ == "__main__":
    main()
