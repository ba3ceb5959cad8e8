"""Benefit functions, connection-cost models and the distance-based utility."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .graph import UNREACHABLE, Graph, bfs_distances

# absolute tolerance for every real comparison in the package
EPS = 1e-9


@dataclass(frozen=True)
class BenefitFunction:
    """Benefit ``b(k)`` of reaching another node at hop distance ``k``.

    Exactly one of ``delta`` (giving ``b(k) = delta**k``) or ``table``
    (``table[k-1] = b(k)``) must be set. Both forms are strictly decreasing
    and positive.
    """

    delta: float | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.delta is None) == (self.table is None):
            raise ValueError("exactly one of delta or table must be given")
        if self.delta is not None:
            if not 0.0 < self.delta < 1.0:
                raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        else:
            table = tuple(float(x) for x in self.table)
            object.__setattr__(self, "table", table)
            problems = benefit_table_problems(table)
            if problems:
                raise ValueError("; ".join(problems))

    @classmethod
    def decay(cls, delta: float = 0.5) -> BenefitFunction:
        return cls(delta=delta)

    @classmethod
    def from_table(cls, values: Sequence[float]) -> BenefitFunction:
        return cls(table=tuple(values))

    def __call__(self, k: int) -> float:
        return benefit(self, k)

    def values(self, n: int) -> np.ndarray:
        """Array ``[b(1), ..., b(n-1)]``."""
        if self.delta is not None:
            return self.delta ** np.arange(1, n, dtype=float)
        if len(self.table) < n - 1:
            raise ValueError(f"benefit table has {len(self.table)} entries, need {n - 1}")
        return np.asarray(self.table[: n - 1], dtype=float)

    def lookup(self, n: int) -> np.ndarray:
        """Distance-indexed table of length ``n + 1``: entry 0 (self) and entry ``n``
        (used for unreachable) are zero."""
        out = np.zeros(n + 1)
        out[1:n] = self.values(n)
        return out


def benefit_table_problems(table: Sequence[float]) -> list[str]:
    problems = []
    if len(table) == 0:
        problems.append("benefit table is empty")
    for k, v in enumerate(table, start=1):
        if not np.isfinite(v) or v <= 0:
            problems.append(f"b({k}) = {v} must be positive and finite")
    for k in range(1, len(table)):
        if not table[k - 1] > table[k]:
            problems.append(f"b({k}) = {table[k - 1]} must exceed b({k + 1}) = {table[k]}")
    return problems


def benefit(bf: BenefitFunction, k: int, n: int | None = None) -> float:
    if k < 1 or (n is not None and k >= n):
        raise ValueError(f"hop distance {k} outside [1, n-1]")
    if bf.delta is not None:
        return bf.delta**k
    if k > len(bf.table):
        raise ValueError(f"hop distance {k} beyond benefit table of length {len(bf.table)}")
    return bf.table[k - 1]


def _check_nonneg(values, what):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"{what} must be finite and nonnegative")
    return arr


@dataclass(frozen=True)
class Homogeneous:
    c: float

    def __post_init__(self):
        _check_nonneg(self.c, "homogeneous cost")

    def matrix(self, n: int, states=None) -> np.ndarray:
        m = np.full((n, n), float(self.c))
        np.fill_diagonal(m, 0.0)
        return m


@dataclass(frozen=True)
class Separable:
    """Node ``i`` pays ``c[i]`` for each of its links, whoever the partner is."""

    c: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        _check_nonneg(self.c, "separable costs")

    def matrix(self, n: int, states=None) -> np.ndarray:
        if len(self.c) != n:
            raise ValueError(f"separable cost vector has length {len(self.c)}, expected {n}")
        m = np.repeat(np.asarray(self.c)[:, None], n, axis=1)
        np.fill_diagonal(m, 0.0)
        return m


@dataclass(frozen=True)
class Matrix:
    c: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        arr = _check_nonneg(self.c, "cost matrix")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("cost matrix must be square")
        if not np.allclose(arr, arr.T, atol=EPS, rtol=0):
            raise ValueError("cost matrix must be symmetric")
        if np.any(np.diag(arr) != 0):
            raise ValueError("cost matrix must have a zero diagonal")
        object.__setattr__(self, "c", tuple(tuple(float(x) for x in row) for row in arr))

    def matrix(self, n: int, states=None) -> np.ndarray:
        arr = np.asarray(self.c, dtype=float)
        if arr.shape != (n, n):
            raise ValueError(f"cost matrix has shape {arr.shape}, expected {(n, n)}")
        return arr.copy()


@dataclass(frozen=True)
class StateDependent:
    """Cost ``base + alpha * |s_i - s_j|`` from scalar node states."""

    base: float
    alpha: float

    def __post_init__(self):
        _check_nonneg([self.base, self.alpha], "state-dependent cost parameters")

    def matrix(self, n: int, states=None) -> np.ndarray:
        if states is None:
            raise ValueError("state-dependent cost needs node states")
        s = np.asarray(states, dtype=float)
        if s.shape != (n,):
            raise ValueError(f"expected {n} states, got shape {s.shape}")
        m = self.base + self.alpha * np.abs(s[:, None] - s[None, :])
        np.fill_diagonal(m, 0.0)
        return m


CostModel = Union[Homogeneous, Separable, Matrix, StateDependent]


def potential_cost(cm: CostModel, i: int, j: int, states=None) -> float:
    """What node ``i`` pays for a direct link to ``j``."""
    if i == j:
        raise ValueError("no cost is defined for a node and itself")
    if isinstance(cm, Homogeneous):
        return float(cm.c)
    if isinstance(cm, Separable):
        return cm.c[i]
    if isinstance(cm, Matrix):
        return cm.c[i][j]
    if isinstance(cm, StateDependent):
        if states is None:
            raise ValueError("state-dependent cost needs node states")
        return cm.base + cm.alpha * abs(states[i] - states[j])
    raise TypeError(f"unknown cost model {cm!r}")


@dataclass(frozen=True)
class UtilityVector:
    u: tuple[float, ...]
    total: float = field(default=None)

    def __post_init__(self):
        if self.total is None:
            object.__setattr__(self, "total", float(sum(self.u)))


def node_utility(g: Graph, i: int, bf: BenefitFunction, cm: CostModel, states=None) -> float:
    dist = bfs_distances(g.adjacency(), i)
    gained = sum(benefit(bf, d) for j, d in enumerate(dist) if j != i and d is not UNREACHABLE)
    paid = sum(potential_cost(cm, i, j, states) for j in g.neighbors(i))
    return gained - paid


def total_utility(g: Graph, bf: BenefitFunction, cm: CostModel, states=None) -> UtilityVector:
    return UtilityVector(tuple(node_utility(g, i, bf, cm, states) for i in range(g.n)))
