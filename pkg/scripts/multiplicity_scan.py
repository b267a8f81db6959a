"""Scan [-1/2, 1/2) and compare three multiplicity readings of the smooth wavelet.

For each point the script prints the Journé multiplicity m(x), the number of
scaling functions whose periodization is nonzero, and the lattice sum
``sum_k sum_{j>=1} |psi_hat(2^j (x+k))|^2``.  Within about 1/28 of a
multiple of 1/7 the flat transitions underflow, so the middle count can
drop there.

    python3 scripts/multiplicity_scan.py --points 29 --r 1
"""

import argparse

import numpy as np

from wavelab.analysis import _per_values, avoid_breakpoints, dimension_function, model_for_bank
from wavelab.bump import build_p
from wavelab.gmra import example_bank


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=29)
    parser.add_argument("--r", type=int, default=1)
    args = parser.parse_args()

    bank = example_bank(build_p(args.r))
    model = model_for_bank(bank)
    x = avoid_breakpoints((np.arange(args.points) + 0.5) / args.points - 0.5)
    m = bank.m(x)
    per1, _ = _per_values(model, "phi1", x)
    per2, _ = _per_values(model, "phi2", x)
    D, trunc = dimension_function(model, x)
    print(f"{'x':>9} {'m':>2} {'#Per>0':>6} {'D':>12}")
    for xi, mi, a, b, d in zip(x, m, per1, per2, D):
        print(f"{xi:>9.5f} {mi:>2} {int(a > 0) + int(b > 0):>6} {d:>12.6f}")
    print(f"mean D = {D.mean():.5f} (tail bound {trunc['tail_bound']:.1e}); mean m = {m.mean():.5f}")


if __name__ == "__main__":
    main()
