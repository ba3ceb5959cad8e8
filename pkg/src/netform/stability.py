"""Pairwise stability: checking, exhaustive enumeration and price of anarchy."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import enumeration
from .efficiency import enumerate_efficient
from .graph import Graph, all_pairs
from .model import EPS, BenefitFunction, CostModel, Homogeneous, total_utility

DEFAULT_CAP = 7
MAX_LISTED = 256


class ViolationKind(str, enum.Enum):
    SEVER_PROFITABLE = "SEVER_PROFITABLE"
    ADD_PROFITABLE = "ADD_PROFITABLE"


def addition_blocked(gain_i, gain_j, eps: float = EPS):
    """True where adding a link upsets stability.

    One endpoint must strictly gain while the other does not lose. Works on
    scalars and numpy arrays alike.
    """
    i_gains, j_gains = gain_i > eps, gain_j > eps
    return (i_gains & (gain_j >= -eps)) | (j_gains & (gain_i >= -eps))


def severance_blocked(gain_i, gain_j, eps: float = EPS):
    """True where either endpoint strictly gains by cutting the link."""
    return (gain_i > eps) | (gain_j > eps)


@dataclass(frozen=True)
class Violation:
    pair: tuple[int, int]
    kind: ViolationKind
    delta_i: float
    delta_j: float


@dataclass(frozen=True)
class StabilityVerdict:
    violations: tuple[Violation, ...] = ()

    @property
    def stable(self) -> bool:
        return not self.violations


def check_pairwise_stable(
    g: Graph, bf: BenefitFunction, cm: CostModel, states=None, eps: float = EPS
) -> StabilityVerdict:
    base = total_utility(g, bf, cm, states).u
    found = []
    for i, j in all_pairs(g.n):
        present = g.has_edge(i, j)
        other = g.remove_edge(i, j) if present else g.add_edge(i, j)
        u = total_utility(other, bf, cm, states).u
        di, dj = u[i] - base[i], u[j] - base[j]
        if present and severance_blocked(di, dj, eps):
            found.append(Violation((i, j), ViolationKind.SEVER_PROFITABLE, di, dj))
        elif not present and addition_blocked(di, dj, eps):
            found.append(Violation((i, j), ViolationKind.ADD_PROFITABLE, di, dj))
    return StabilityVerdict(tuple(found))


@dataclass(frozen=True)
class StableSet:
    n: int
    masks: tuple[int, ...]
    totals: tuple[float, ...]
    overflow: int = 0
    worst_total: float | None = None
    best_total: float | None = None

    @property
    def graphs(self) -> list[Graph]:
        return [Graph.from_mask(self.n, m) for m in self.masks]

    @property
    def count(self) -> int:
        return len(self.masks) + self.overflow


def stable_mask(masks: np.ndarray, table: np.ndarray, n: int, eps: float = EPS) -> np.ndarray:
    """Which of ``masks`` are pairwise stable, given per-node utilities of all graphs."""
    here = table[masks]
    ok = np.ones(len(masks), dtype=bool)
    for b, (i, j) in enumerate(all_pairs(n)):
        flipped = table[masks ^ (1 << b)]
        di = flipped[:, i] - here[:, i]
        dj = flipped[:, j] - here[:, j]
        present = ((masks >> b) & 1).astype(bool)
        bad = np.where(present, severance_blocked(di, dj, eps), addition_blocked(di, dj, eps))
        ok &= ~bad
    return ok


def enumerate_stable(
    n: int,
    bf: BenefitFunction,
    cm: CostModel,
    states=None,
    *,
    cap: int = DEFAULT_CAP,
    eps: float = EPS,
    threads: int = 1,
    max_listed: int = MAX_LISTED,
) -> StableSet:
    """All pairwise-stable graphs on ``n`` nodes, in ascending mask order."""
    if n < 1:
        raise ValueError("n must be positive")
    enumeration.check_cap(n, cap, "stable-network search")
    b_values = bf.values(n) if n > 1 else np.zeros(0)
    table = enumeration.utility_table(n, b_values, cm.matrix(n, states), threads)

    def scan(masks):
        keep = masks[stable_mask(masks, table, n, eps)]
        return keep, table[keep].sum(axis=1)

    parts = enumeration.map_chunks(scan, n, threads)
    masks = np.concatenate([p[0] for p in parts])
    totals = np.concatenate([p[1] for p in parts])
    listed = min(len(masks), max_listed)
    return StableSet(
        n=n,
        masks=tuple(masks[:listed].tolist()),
        totals=tuple(totals[:listed].tolist()),
        overflow=len(masks) - listed,
        worst_total=float(totals.min()) if len(totals) else None,
        best_total=float(totals.max()) if len(totals) else None,
    )


def min_degree_property(ss: StableSet, bf: BenefitFunction, cm: CostModel) -> bool:
    """Every non-empty stable graph gives each non-isolated node two or more links.

    Only meaningful for homogeneous costs above ``b(1)``; other inputs raise.
    """
    if not isinstance(cm, Homogeneous) or not cm.c > bf(1):
        raise ValueError("minimum-degree property applies only to homogeneous cost c > b(1)")
    if ss.overflow:
        raise ValueError("stable set was truncated; enumerate with a larger max_listed")
    for g in ss.graphs:
        if any(d == 1 for d in g.degrees()):
            return False
    return True


@dataclass(frozen=True)
class PriceOfAnarchy:
    efficient_total: float
    worst_stable_total: float | None
    best_stable_total: float | None
    stable_count: int = 0
    poa: float | None = field(default=None)

    @property
    def defined(self) -> bool:
        return self.poa is not None


def price_of_anarchy(
    n: int,
    bf: BenefitFunction,
    cm: CostModel,
    states=None,
    *,
    cap: int = DEFAULT_CAP,
    eps: float = EPS,
    threads: int = 1,
) -> PriceOfAnarchy:
    """Efficient total over the worst stable total; undefined (``poa=None``)
    when no stable graph exists or the worst stable total is not positive."""
    eff = enumerate_efficient(n, bf, cm, states, cap=cap, eps=eps, threads=threads, max_listed=0)
    ss = enumerate_stable(n, bf, cm, states, cap=cap, eps=eps, threads=threads, max_listed=0)
    poa = None
    if ss.worst_total is not None and ss.worst_total > 0:
        poa = eff.best_total / ss.worst_total
    return PriceOfAnarchy(eff.best_total, ss.worst_total, ss.best_total, ss.count, poa)
