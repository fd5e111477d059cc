"""Small instances where the threshold can be checked by hand, each compared
with a brute-force min-cut over every failure pattern."""

from fractions import Fraction

from bcrepair import SystemParams, alpha_star, gamma_star, msr_point, oracle_alpha_star

HALF = Fraction(1, 2)


def show(label, p, gamma):
    a = alpha_star(p, gamma)
    o = oracle_alpha_star(p, gamma)
    print(f"{label}: (n,k,r,rho)=({p.n},{p.k},{p.r},{p.rho}) gamma={gamma} -> alpha*={a}  min-cut search {o}")


def main():
    p = SystemParams.make(4, 3, 2, HALF, 1)
    show("three data nodes, two failures", p, Fraction(2, 5))
    # however much bandwidth is spent, M/3 per node is not enough here
    print("  gamma needed for alpha = 1/3:", gamma_star(p, Fraction(1, 3)))

    p = SystemParams.make(4, 2, 1, HALF, 1)
    m = msr_point(p)
    print(f"single failure, half survives: MSR point alpha={m.alpha} gamma={m.gamma}")
    show("  check", p, m.gamma)

    show("two failures in one round", SystemParams.make(4, 2, 2, HALF, 1), HALF)

    # a collector may read a helper and the newcomer it fed, so storage M/k is out of reach
    p = SystemParams.make(3, 2, 2, HALF, 1)
    show("more failures than spare nodes", p, Fraction(10))


if __name__ == "__main__":
    main()
