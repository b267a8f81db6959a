"""Tabulate max |x|^(r+1) |phi_i(x)| per generation against the decay bound.

    python3 scripts/decay_table.py --r 0 1 2 --generations 6
"""

import argparse

from wavelab.analysis import decay_report
from wavelab.bump import build_p
from wavelab.gmra import ScalingVector, example_bank


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--r", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--generations", type=int, default=6)
    parser.add_argument("--samples", type=int, default=64, help="samples per component")
    args = parser.parse_args()

    for r in args.r:
        sv = ScalingVector(example_bank(build_p(r)))
        rep = decay_report(sv, r, range(1, args.generations + 1), args.samples)
        print(f"r = {r}  (bound holds and decreases: {rep.passed})")
        print(f"{'n':>3} {'phi1':>12} {'phi2':>12} {'bound':>12}")
        for row in rep.details["profile"]:
            print(f"{row['n']:>3} {row['phi1']:>12.3e} {row['phi2']:>12.3e} {row['bound']:>12.3e}")
        print()


if __name__ == "__main__":
    main()
