"""Immutable undirected simple graphs over dense integer node ids."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator


class _Unreachable:
    """Marker for node pairs with no connecting path.

    Deliberately not a number: any arithmetic on it raises ``TypeError``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNREACHABLE"

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()


def pair_bit(i: int, j: int, n: int) -> int:
    """Bit index of the unordered pair {i, j} in the canonical edge encoding."""
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def all_pairs(n: int) -> list[tuple[int, int]]:
    """Unordered pairs in bit order, so ``all_pairs(n)[pair_bit(i, j, n)] == (i, j)``."""
    return list(combinations(range(n), 2))


def _normalize(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"graph needs at least one node, got n={self.n}")
        normalized = set()
        for i, j in self.edges:
            self._check_node(i)
            self._check_node(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            normalized.add(_normalize(i, j))
        object.__setattr__(self, "edges", frozenset(normalized))

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ValueError(f"node {i} out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> Graph:
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> Graph:
        pairs = all_pairs(n)
        return cls(n, frozenset(p for b, p in enumerate(pairs) if mask >> b & 1))

    @property
    def mask(self) -> int:
        out = 0
        for i, j in self.edges:
            out |= 1 << pair_bit(i, j, self.n)
        return out

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return _normalize(i, j) in self.edges

    def neighbors(self, i: int) -> set[int]:
        self._check_node(i)
        return {b if a == i else a for a, b in self.edges if i in (a, b)}

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency())

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.sorted_edges())

    def add_edge(self, i: int, j: int) -> Graph:
        return add_edge(self, i, j)

    def remove_edge(self, i: int, j: int) -> Graph:
        return remove_edge(self, i, j)

    def relabel(self, perm: list[int]) -> Graph:
        """Graph with node ``v`` renamed to ``perm[v]``."""
        return Graph(self.n, frozenset(_normalize(perm[i], perm[j]) for i, j in self.edges))


def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(all_pairs(n)))


def star_graph(n: int, hub: int = 0) -> Graph:
    if not 0 <= hub < n:
        raise ValueError(f"hub {hub} out of range for n={n}")
    return Graph(n, frozenset(_normalize(hub, v) for v in range(n) if v != hub))


def add_edge(g: Graph, i: int, j: int) -> Graph:
    g._check_node(i)
    g._check_node(j)
    if i == j:
        raise ValueError(f"self-loop on node {i}")
    if g.has_edge(i, j):
        return g
    return Graph(g.n, g.edges | {_normalize(i, j)})


def remove_edge(g: Graph, i: int, j: int) -> Graph:
    g._check_node(i)
    g._check_node(j)
    e = _normalize(i, j)
    if e not in g.edges:
        return g
    return Graph(g.n, g.edges - {e})


class DistanceMatrix:
    """All-pairs hop counts; entries are ints or ``UNREACHABLE``."""

    def __init__(self, rows: list[list]):
        self._rows = tuple(tuple(r) for r in rows)

    @property
    def n(self) -> int:
        return len(self._rows)

    def __getitem__(self, i: int) -> tuple:
        return self._rows[i]

    def __iter__(self):
        return iter(self._rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, DistanceMatrix) and self._rows == other._rows

    def __repr__(self) -> str:
        return f"DistanceMatrix({[list(r) for r in self._rows]})"

    def reachable(self, i: int, j: int) -> bool:
        return self._rows[i][j] is not UNREACHABLE

    def diameter(self):
        """Longest finite distance, or ``UNREACHABLE`` if the graph is disconnected."""
        best = 0
        for row in self._rows:
            for d in row:
                if d is UNREACHABLE:
                    return UNREACHABLE
                best = max(best, d)
        return best


def bfs_distances(adj: list[set[int]], source: int) -> list:
    dist: list = [UNREACHABLE] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] is UNREACHABLE:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distances(g: Graph) -> DistanceMatrix:
    adj = g.adjacency()
    return DistanceMatrix([bfs_distances(adj, s) for s in range(g.n)])


def neighborhood(g: Graph, i: int, k: int) -> set[int]:
    """Nodes other than ``i`` within ``k`` hops of ``i``."""
    g._check_node(i)
    if g.n > 1 and not 1 <= k <= g.n - 1:
        raise ValueError(f"k must lie in [1, {g.n - 1}], got {k}")
    dist = bfs_distances(g.adjacency(), i)
    return {j for j, d in enumerate(dist) if j != i and d is not UNREACHABLE and d <= k}


def connected_components(g: Graph) -> list[set[int]]:
    adj = g.adjacency()
    seen: set[int] = set()
    out = []
    for s in range(g.n):
        if s in seen:
            continue
        comp = {v for v, d in enumerate(bfs_distances(adj, s)) if d is not UNREACHABLE}
        seen |= comp
        out.append(comp)
    return out
