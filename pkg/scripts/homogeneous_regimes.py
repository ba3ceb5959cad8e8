"""Efficient structure across the homogeneous cost range, checked by enumeration.

    python scripts/homogeneous_regimes.py --n 5 --delta 0.6 --steps 12
"""

import argparse
from dataclasses import dataclass

import numpy as np

from netform.efficiency import classify_homogeneous, enumerate_efficient, homogeneous_thresholds
from netform.model import BenefitFunction, Homogeneous


@dataclass
class Config:
    n: int = 5
    delta: float = 0.6
    steps: int = 12


def shape(graphs, n):
    if len(graphs) == 1 and not graphs[0].edges:
        return "empty"
    if all(len(g.edges) == n * (n - 1) // 2 for g in graphs):
        return "complete"
    if all(len(g.edges) == n - 1 and max(g.degrees()) == n - 1 for g in graphs):
        return f"star x{len(graphs)}"
    return f"{len(graphs)} other graphs"


def main(cfg: Config) -> None:
    bf = BenefitFunction.decay(cfg.delta)
    low, high = homogeneous_thresholds(cfg.n, bf)
    print(f"n={cfg.n} delta={cfg.delta}: complete below c={low:.4f}, star up to c={high:.4f}")
    print(f"{'c':>8} {'predicted':>10} {'enumerated':>12} {'best U':>10}")
    for c in np.linspace(0.02, 1.3 * high, cfg.steps):
        cls = classify_homogeneous(cfg.n, bf, c)
        es = enumerate_efficient(cfg.n, bf, Homogeneous(c), max_listed=cfg.n + 1)
        print(f"{c:8.4f} {cls.regime.value:>10} {shape(es.optimizers, cfg.n):>12} {es.best_total:10.4f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=Config.n)
    p.add_argument("--delta", type=float, default=Config.delta)
    p.add_argument("--steps", type=int, default=Config.steps)
    main(Config(**vars(p.parse_args())))
