"""Efficient (total-utility maximizing) connectivity structures.

Closed forms for homogeneous and separable link costs, plus an exhaustive
enumerator over all graphs on a small node set that serves as ground truth.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import enumeration
from .graph import Graph, complete_graph, empty_graph, star_graph
from .model import EPS, BenefitFunction, CostModel, Homogeneous, total_utility

DEFAULT_CAP = 8
MAX_LISTED = 64


class BoundaryTieWarning(UserWarning):
    """Parameters sit on a regime boundary, where several structures tie."""


class Regime(str, enum.Enum):
    COMPLETE = "COMPLETE"
    STAR = "STAR"
    EMPTY = "EMPTY"


@dataclass(frozen=True)
class RegimeClassification:
    regime: Regime
    thresholds: tuple[float, float]
    boundary: bool


def _b1_b2(bf: BenefitFunction, n: int) -> tuple[float, float]:
    # with two nodes b(2) never occurs; a one-entry table is allowed
    if n == 2 and bf.table is not None and len(bf.table) < 2:
        return bf(1), 0.0
    return bf(1), bf(2)


def homogeneous_thresholds(n: int, bf: BenefitFunction) -> tuple[float, float]:
    b1, b2 = _b1_b2(bf, n)
    return b1 - b2, b1 + 0.5 * (n - 2) * b2


def classify_homogeneous(n: int, bf: BenefitFunction, c: float, eps: float = EPS) -> RegimeClassification:
    if n < 2:
        raise ValueError(f"regime classification needs n >= 2, got {n}")
    low, high = homogeneous_thresholds(n, bf)
    if c < low:
        regime = Regime.COMPLETE
    elif c < high:
        regime = Regime.STAR
    else:
        regime = Regime.EMPTY
    boundary = abs(c - low) <= eps or abs(c - high) <= eps
    return RegimeClassification(regime, (low, high), boundary)


def construct_efficient_homogeneous(n: int, bf: BenefitFunction, c: float, eps: float = EPS) -> Graph:
    """Complete graph, star on hub 0, or empty graph according to the cost regime.

    On a regime boundary a co-optimal structure is returned and a
    :class:`BoundaryTieWarning` is issued.
    """
    if n == 1:
        return empty_graph(1)
    cls = classify_homogeneous(n, bf, c, eps)
    if cls.boundary:
        warnings.warn(
            f"c={c} lies within {eps} of a regime threshold {cls.thresholds}; "
            f"returning a co-optimal {cls.regime.value} structure",
            BoundaryTieWarning,
            stacklevel=2,
        )
    if cls.regime is Regime.COMPLETE:
        return complete_graph(n)
    if cls.regime is Regime.STAR:
        return star_graph(n, 0)
    return empty_graph(n)


@dataclass(frozen=True)
class EfficientSet:
    n: int
    best_total: float
    masks: tuple[int, ...]
    overflow: int = 0

    @property
    def optimizers(self) -> list[Graph]:
        return [Graph.from_mask(self.n, m) for m in self.masks]

    @property
    def count(self) -> int:
        return len(self.masks) + self.overflow


def enumerate_efficient(
    n: int,
    bf: BenefitFunction,
    cm: CostModel,
    states=None,
    *,
    cap: int = DEFAULT_CAP,
    eps: float = EPS,
    threads: int = 1,
    max_listed: int = MAX_LISTED,
) -> EfficientSet:
    """Exhaustively maximize total utility over all 2^(n(n-1)/2) graphs.

    Maximizers within ``eps`` of the best total are listed in ascending mask
    order, at most ``max_listed`` of them; the rest are counted in ``overflow``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    enumeration.check_cap(n, cap, "efficient-network search")
    b_values = bf.values(n) if n > 1 else np.zeros(0)
    cost = cm.matrix(n, states)

    def scan(masks):
        totals = enumeration.total_utilities(masks, n, b_values, cost)
        best = totals.max()
        keep = totals >= best - eps
        return best, masks[keep], totals[keep]

    parts = enumeration.map_chunks(scan, n, threads)
    best = max(p[0] for p in parts)
    winners = []
    for _, masks, totals in parts:
        winners.extend(masks[totals >= best - eps].tolist())
    listed = tuple(winners[:max_listed])
    return EfficientSet(n, float(best), listed, len(winners) - len(listed))


@dataclass(frozen=True)
class SeparableEfficientStructure:
    m: int
    threshold_m: int
    hub: int
    order: tuple[int, ...]
    participants: tuple[int, ...]
    isolated: tuple[int, ...]
    core_edges: tuple[tuple[int, int], ...]
    graph: Graph
    prefix_totals: tuple[float, ...]
    ties: tuple[str, ...] = field(default=())


def construct_efficient_separable(
    n: int, bf: BenefitFunction, c, eps: float = EPS
) -> SeparableEfficientStructure:
    """Generalized star (core-periphery) for per-node link costs ``c``.

    Nodes are ranked by ascending cost, ties broken by node id. The cheapest
    node is the hub. The ``m`` cheapest nodes participate: each links to the
    hub, and two non-hub participants also link directly when
    ``b(1) - b(2) > (c_i + c_j) / 2``. All other nodes stay isolated.

    ``threshold_m`` is the largest rank ``k`` whose marginal star condition
    ``2 b(1) + 2 (k-2) b(2) > c_k + c_1`` holds. That condition alone can
    admit a star whose total utility is negative, so ``m`` is instead the
    participant count whose structure has the largest total utility (largest
    count on ties); both are reported.
    """
    c = [float(x) for x in c]
    if n < 2:
        raise ValueError(f"separable construction needs n >= 2, got {n}")
    if len(c) != n:
        raise ValueError(f"cost vector has length {len(c)}, expected {n}")
    b1 = bf(1)
    b2 = bf(2) if n >= 3 else 0.0
    order = tuple(sorted(range(n), key=lambda v: (c[v], v)))
    cs = [c[v] for v in order]
    ties = []
    for a in range(n - 1):
        if abs(cs[a] - cs[a + 1]) <= eps:
            ties.append(f"equal costs for nodes {order[a]} and {order[a + 1]}")

    threshold_m = 1
    for k in range(2, n + 1):
        slack = 2 * b1 + 2 * (k - 2) * b2 - (cs[k - 1] + cs[0])
        if abs(slack) <= eps:
            ties.append(f"participation threshold is tight at rank {k}")
        elif slack > 0:
            threshold_m = k

    core_gain = {}
    for r in range(1, n):
        for s in range(r + 1, n):
            slack = (b1 - b2) - 0.5 * (cs[r] + cs[s])
            core_gain[r, s] = slack
            if abs(slack) <= eps:
                ties.append(f"direct-link rule is tight for nodes {order[r]} and {order[s]}")

    # every participant is within two hops of every other through the hub
    totals = [0.0]
    for k in range(2, n + 1):
        r = k - 1
        added = 2 * b1 - cs[0] - cs[r] + 2 * (k - 2) * b2
        added += sum(2 * g for (a, s), g in core_gain.items() if s == r and g > eps)
        totals.append(totals[-1] + added)
    best = max(totals)
    near = [k for k, t in enumerate(totals, start=1) if t >= best - eps]
    m = near[-1]
    if len(near) > 1:
        ties.append(f"participant counts {near} give equal total utility")

    hub = order[0]
    participants = order[:m] if m > 1 else ()
    isolated = order[m:] if m > 1 else order
    edges = {tuple(sorted((hub, v))) for v in participants[1:]}
    core = [
        tuple(sorted((order[r], order[s])))
        for (r, s), g in core_gain.items()
        if s < m and g > eps
    ]
    edges.update(core)
    return SeparableEfficientStructure(
        m=m,
        threshold_m=threshold_m,
        hub=hub,
        order=order,
        participants=tuple(participants),
        isolated=tuple(isolated),
        core_edges=tuple(sorted(core)),
        graph=Graph(n, frozenset(edges)),
        prefix_totals=tuple(totals),
        ties=tuple(ties),
    )


@dataclass(frozen=True)
class EfficiencyCheck:
    total: float
    best_total: float
    gap: float
    efficient: bool


def verify_efficiency(
    g: Graph,
    bf: BenefitFunction,
    cm: CostModel,
    states=None,
    *,
    cap: int = DEFAULT_CAP,
    eps: float = EPS,
    threads: int = 1,
) -> EfficiencyCheck:
    """Compare ``g`` with the exhaustive optimum; ``gap`` is clipped at zero."""
    best = enumerate_efficient(g.n, bf, cm, states, cap=cap, eps=eps, threads=threads, max_listed=0)
    total = total_utility(g, bf, cm, states).total
    gap = max(best.best_total - total, 0.0)
    return EfficiencyCheck(total, best.best_total, gap, gap <= eps)


def is_homogeneous(cm: CostModel) -> bool:
    return isinstance(cm, Homogeneous)
