"""Run repairs on real coded data over GF(257).

First a hand-built plan that moves 3/8 of the file to fix a node that lost
half its packets, then random linear repair at two points on the curve.
"""

from fractions import Fraction

from bcrepair import SystemParams
from bcrepair.cli import simulate_example2, simulate_rlnc
from bcrepair.repair_sim import format_report


def main():
    entries, ok = simulate_example2(seed=7, files=5)
    print(format_report("explicit plan", entries), "ok" if ok else "FAILED", "\n")

    p = SystemParams.make(6, 4, 2, 0, 1)
    entries, _ = simulate_rlnc(p, Fraction(1, 3), Fraction(2, 3), trials=50, seed=0)
    print(format_report("random coding, two whole-node losses", entries))

    # the same kind of round at a tight point: a few percent of draws land on a bad minor
    p = SystemParams.make(4, 2, 2, Fraction(1, 2), 1)
    for q in (257, 65537):
        entries, _ = simulate_rlnc(p, Fraction(1, 2), Fraction(1, 2), trials=50, seed=0, q=q)
        print(format_report(f"random coding, half survives, q={q}", entries))


if __name__ == "__main__":
    main()
