"""Price of anarchy as the homogeneous link cost grows.

    python scripts/price_of_anarchy.py --n 5 --delta 0.6
"""

import argparse

import numpy as np

from netform.model import BenefitFunction, Homogeneous
from netform.stability import price_of_anarchy


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--delta", type=float, default=0.6)
    p.add_argument("--steps", type=int, default=10)
    args = p.parse_args()
    bf = BenefitFunction.decay(args.delta)
    print(f"{'c':>7} {'stable':>7} {'efficient U':>12} {'worst U':>9} {'poa':>8}")
    for c in np.linspace(0.05, 2.0 * bf(1), args.steps):
        r = price_of_anarchy(args.n, bf, Homogeneous(c))
        worst = "-" if r.worst_stable_total is None else f"{r.worst_stable_total:.4f}"
        poa = "undef" if r.poa is None else f"{r.poa:.4f}"
        print(f"{c:7.3f} {r.stable_count:7d} {r.efficient_total:12.4f} {worst:>9} {poa:>8}")


if __name__ == "__main__":
    main()
