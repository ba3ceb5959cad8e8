"""Newman modularity and greedy agglomerative community detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .graph import Graph
from .model import EPS


@dataclass(frozen=True)
class ModularityResult:
    partition: tuple[int, ...]
    q: float

    @property
    def communities(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for node, c in enumerate(self.partition):
            groups.setdefault(c, []).append(node)
        return [groups[c] for c in sorted(groups)]


def canonical_partition(labels: Sequence[Hashable]) -> tuple[int, ...]:
    """Relabel communities 0, 1, ... in order of first appearance."""
    seen: dict[Hashable, int] = {}
    return tuple(seen.setdefault(c, len(seen)) for c in labels)


def modularity_q(g: Graph, partition: Sequence[Hashable]) -> float:
    """Q = sum over communities of (e_cc - a_c^2).

    ``e_cc`` is the fraction of edges with both ends in ``c`` and ``a_c`` the
    fraction of edge ends attached to ``c``. Zero for a graph without edges.
    """
    if len(partition) != g.n:
        raise ValueError(f"partition covers {len(partition)} nodes, graph has {g.n}")
    m = len(g.edges)
    if m == 0:
        return 0.0
    inside: dict[Hashable, int] = {}
    ends: dict[Hashable, int] = {}
    for i, j in g.edges:
        ci, cj = partition[i], partition[j]
        if ci == cj:
            inside[ci] = inside.get(ci, 0) + 1
        ends[ci] = ends.get(ci, 0) + 1
        ends[cj] = ends.get(cj, 0) + 1
    return sum(inside.get(c, 0) / m - (k / (2 * m)) ** 2 for c, k in ends.items())


def _agglomerate(g: Graph, labels: list[int], eps: float) -> bool:
    """Merge communities greedily, in place. Returns whether anything merged."""
    n = g.n
    m = len(g.edges)
    # e[c, d]: fraction of edge ends joining c to d, split evenly across (c, d) and (d, c)
    e = np.zeros((n, n))
    for i, j in g.edges:
        e[labels[i], labels[j]] += 0.5 / m
        e[labels[j], labels[i]] += 0.5 / m
    active = np.zeros(n, dtype=bool)
    active[labels] = True
    merged = False
    while True:
        a = e.sum(axis=1)
        gain = 2.0 * (e - np.outer(a, a))
        gain = np.where(np.triu(np.outer(active, active), k=1), gain, -np.inf)
        best = gain.max()
        if not best > eps:
            return merged
        c, d = np.argwhere(gain >= best - eps)[0]
        e[c, :] += e[d, :]
        e[:, c] += e[:, d]
        e[d, :] = 0.0
        e[:, d] = 0.0
        active[d] = False
        labels[:] = [c if x == d else x for x in labels]
        merged = True


def _kl_pass(adj: np.ndarray, labels: list[int], eps: float) -> bool:
    """One Kernighan-Lin style sweep, in place.

    Every node is moved exactly once, each time taking the best available move
    even if it lowers Q, and the partition is then rolled back to the best
    state seen along the way. Returns whether Q rose by more than ``eps``.
    """
    n = len(labels)
    deg = adj.sum(axis=1)
    two_m = deg.sum()
    lab = np.array(labels)
    locked = np.zeros(n, dtype=bool)
    locked[deg == 0] = True
    q_shift, best_shift, best_lab = 0.0, 0.0, lab.copy()
    while not locked.all():
        # communities named by node ids; column n stands for a fresh singleton
        member = np.zeros((n, n + 1))
        member[np.arange(n), lab] = 1.0
        links = adj @ member
        tot = deg @ member
        own_links = links[np.arange(n), lab]
        own_rest = tot[lab] - deg
        gain = 2.0 * ((links - own_links[:, None]) / two_m - deg[:, None] * (tot[None, :] - own_rest[:, None]) / two_m**2)
        gain[np.arange(n), lab] = -np.inf
        gain[locked, :] = -np.inf
        gain[own_rest == 0, n] = -np.inf  # already a singleton
        unused = np.setdiff1d(np.arange(n), lab)
        if len(unused) == 0:
            gain[:, n] = -np.inf
        # only neighbouring communities or a fresh singleton are candidates
        gain[:, :n][links[:, :n] == 0] = -np.inf
        best = gain.max()
        if best == -np.inf:
            break
        v, c = np.argwhere(gain >= best - eps)[0]
        lab[v] = unused[0] if c == n else c
        locked[v] = True
        q_shift += best
        if q_shift > best_shift + eps:
            best_shift, best_lab = q_shift, lab.copy()
    labels[:] = best_lab.tolist()
    return best_shift > eps


def _tune_split(sub: np.ndarray, side: np.ndarray, eps: float) -> np.ndarray:
    """Flip-each-node-once passes on a two-way split, keeping the best state."""
    while True:
        current = side.copy()
        score = best = current @ sub @ current
        best_side = current.copy()
        free = np.ones(len(side), dtype=bool)
        while free.any():
            # change of s^T B s when flipping node v: -4 s_v (B s)_v + 4 B_vv
            delta = -4.0 * current * (sub @ current) + 4.0 * np.diag(sub)
            delta[~free] = -np.inf
            v = int(np.argmax(delta))
            current[v] = -current[v]
            free[v] = False
            score += delta[v]
            if score > best + eps:
                best, best_side = score, current.copy()
        if not best > side @ sub @ side + eps:
            return side
        side = best_side


def _bisect(adj: np.ndarray, eps: float) -> list[int]:
    """Recursive leading-eigenvector bisection of the modularity matrix."""
    n = len(adj)
    deg = adj.sum(axis=1)
    two_m = deg.sum()
    b = adj - np.outer(deg, deg) / two_m
    labels = [0] * n
    pending = [np.arange(n)]
    next_label = 1
    while pending:
        group = pending.pop()
        if len(group) < 2:
            continue
        sub = b[np.ix_(group, group)]
        sub = sub - np.diag(sub.sum(axis=1))
        values, vectors = np.linalg.eigh(sub)
        if values[-1] <= eps:
            continue
        lead = vectors[:, -1]
        # fix the eigenvector sign so the split does not depend on the solver
        if lead[np.argmax(np.abs(lead) > eps)] < 0:
            lead = -lead
        side = _tune_split(sub, np.where(lead >= 0, 1.0, -1.0), eps)
        if side @ sub @ side / (2 * two_m) <= eps or abs(side.sum()) == len(side):
            continue
        right = group[side < 0]
        for v in right:
            labels[v] = next_label
        next_label += 1
        pending.extend([group[side > 0], right])
    return labels


def _refine(g: Graph, adj: np.ndarray, labels: list[int], eps: float, max_passes: int) -> None:
    for _ in range(max_passes):
        moved = False
        while _kl_pass(adj, labels, eps):
            moved = True
        if not (moved and _agglomerate(g, labels, eps)):
            return


def detect_communities(g: Graph, eps: float = EPS, max_passes: int = 100) -> ModularityResult:
    """Modularity maximization by greedy agglomeration with refinement.

    Agglomeration starts from singletons and keeps merging the pair of
    communities with the largest modularity gain until no merge gains more
    than ``eps``; ties go to the smallest community pair, a community being
    named by its smallest node. Plain agglomeration can stall well short of
    the optimum, so the result is refined by Kernighan-Lin node-moving passes
    alternated with further merges. A second candidate from recursive
    leading-eigenvector bisection gets the same refinement, and the partition
    with the higher Q wins (the agglomerative one on ties).
    """
    if not g.edges:
        return ModularityResult(tuple(range(g.n)), 0.0)
    adj = np.zeros((g.n, g.n))
    for i, j in g.edges:
        adj[i, j] = adj[j, i] = 1.0
    best = None
    for start in ("merge", "merge-reversed", _bisect(adj, eps), "singletons"):
        if start == "merge-reversed":
            # same agglomeration with node ids reversed, so ties break the other way
            flip = list(range(g.n - 1, -1, -1))
            h = g.relabel(flip)
            labels = list(range(g.n))
            _agglomerate(h, labels, eps)
            _refine(h, adj[np.ix_(flip, flip)], labels, eps, max_passes)
            labels = [labels[flip[v]] for v in range(g.n)]
        else:
            labels = list(range(g.n)) if isinstance(start, str) else _canonical_ids(start)
            if start == "merge":
                _agglomerate(g, labels, eps)
            _refine(g, adj, labels, eps, max_passes)
        partition = canonical_partition(labels)
        result = ModularityResult(partition, modularity_q(g, partition))
        if best is None or result.q > best.q + eps:
            best = result
    return best


def _canonical_ids(labels: list[int]) -> list[int]:
    """Name each community by its smallest node, as the merge step expects."""
    first: dict[int, int] = {}
    for v, c in enumerate(labels):
        first.setdefault(c, v)
    return [first[c] for c in labels]
