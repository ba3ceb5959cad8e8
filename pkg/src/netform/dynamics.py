"""Seeded agent-based link formation among heterogeneous, capacity-limited nodes.

Each node carries a scalar state in [0, 1] that drifts with its environment.
Linking to a dissimilar node costs more (``base + alpha * |s_i - s_j|``) but
reaching one pays more (benefit ``b(d) * (1 + beta * |s_i - s_j|)``). Each
round the states drift, over-capacity nodes shed their costliest links, and
then every unordered pair is visited once in a seeded random order: absent
links are added when the pair agrees and both can afford it, present links
are cut when either endpoint gains.

Randomness comes from numpy's PCG64 generator. Sweep replications get their
own streams from ``SeedSequence(seed, spawn_key=(grid_index, replication))``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import stats

from .community import detect_communities
from .graph import UNREACHABLE, Graph, all_pairs, bfs_distances
from .model import EPS, BenefitFunction
from .stability import addition_blocked, severance_blocked


@dataclass(frozen=True)
class AgentProfile:
    state: float
    capacity: float = math.inf
    drift: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.state <= 1.0:
            raise ValueError(f"state {self.state} outside [0, 1]")
        if self.capacity < 0:
            raise ValueError(f"capacity {self.capacity} must be nonnegative")


@dataclass(frozen=True)
class EnvironmentConfig:
    heterogeneity: float = 0.0
    rounds: int = 500
    seed: int = 0
    base: float = 0.05
    alpha: float = 0.5
    benefit: BenefitFunction = field(default_factory=lambda: BenefitFunction.decay(0.7))
    beta: float = 1.0
    epsilon: float = EPS
    track_modularity: bool = True

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.heterogeneity < 0:
            raise ValueError("heterogeneity must be nonnegative")


def uniform_profiles(n: int, state: float = 0.5, capacity: float = math.inf, drift: float = 0.1) -> list[AgentProfile]:
    return [AgentProfile(state, capacity, drift) for _ in range(n)]


def _states(profiles: Sequence[AgentProfile]) -> np.ndarray:
    return np.array([p.state for p in profiles], dtype=float)


def _link_cost(profiles, cfg, i, j) -> float:
    return cfg.base + cfg.alpha * abs(profiles[i].state - profiles[j].state)


def dynamic_utility(g: Graph, i: int, profiles: Sequence[AgentProfile], cfg: EnvironmentConfig) -> float:
    dist = bfs_distances(g.adjacency(), i)
    s = profiles[i].state
    gained = sum(
        cfg.benefit(d) * (1.0 + cfg.beta * abs(s - profiles[j].state))
        for j, d in enumerate(dist)
        if j != i and d is not UNREACHABLE
    )
    return gained - link_cost_load(g, i, profiles, cfg)


def link_cost_load(g: Graph, i: int, profiles: Sequence[AgentProfile], cfg: EnvironmentConfig) -> float:
    return sum(_link_cost(profiles, cfg, i, j) for j in g.neighbors(i))


@dataclass(frozen=True)
class CapacityViolation:
    pair: tuple[int, int]
    kind: str
    delta_i: float
    delta_j: float


def capacity_stability_violations(
    g: Graph, profiles: Sequence[AgentProfile], cfg: EnvironmentConfig
) -> list[CapacityViolation]:
    """Moves the dynamics would still make from ``g``, found by direct re-evaluation.

    Reports over-capacity nodes, profitable severances, and additions that
    are profitable under the stability convention and affordable for both.
    """
    eps = cfg.epsilon
    out = []
    for i in range(g.n):
        if link_cost_load(g, i, profiles, cfg) > profiles[i].capacity + eps:
            out.append(CapacityViolation((i, i), "OVER_CAPACITY", 0.0, 0.0))
    base = [dynamic_utility(g, v, profiles, cfg) for v in range(g.n)]
    for i, j in all_pairs(g.n):
        present = g.has_edge(i, j)
        other = g.remove_edge(i, j) if present else g.add_edge(i, j)
        di = dynamic_utility(other, i, profiles, cfg) - base[i]
        dj = dynamic_utility(other, j, profiles, cfg) - base[j]
        if present and severance_blocked(di, dj, eps):
            out.append(CapacityViolation((i, j), "SEVER_PROFITABLE", di, dj))
        elif not present and addition_blocked(di, dj, eps):
            cost = _link_cost(profiles, cfg, i, j)
            fits = all(
                link_cost_load(g, v, profiles, cfg) + cost <= profiles[v].capacity + eps for v in (i, j)
            )
            if fits:
                out.append(CapacityViolation((i, j), "ADD_PROFITABLE", di, dj))
    return out


@dataclass(frozen=True)
class RoundRecord:
    round: int
    added: tuple[tuple[int, int], ...]
    removed: tuple[tuple[int, int], ...]
    forced: tuple[tuple[int, int], ...]
    utilities: tuple[float, ...]
    total: float
    q: float | None

    @property
    def quiet(self) -> bool:
        return not (self.added or self.removed or self.forced)

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "added": [list(e) for e in self.added],
            "removed": [list(e) for e in self.removed],
            "forced": [list(e) for e in self.forced],
            "total_utility": self.total,
            "q": self.q,
        }


@dataclass(frozen=True)
class DynamicsTrace:
    records: tuple[RoundRecord, ...]
    final_graph: Graph
    final_profiles: tuple[AgentProfile, ...]
    converged: bool
    convergence_round: int | None


class _Engine:
    """Array state of one run; all graph evaluation is vectorized over pairs."""

    def __init__(self, g: Graph, profiles: Sequence[AgentProfile], cfg: EnvironmentConfig):
        n = g.n
        self.n = n
        self.cfg = cfg
        self.eps = cfg.epsilon
        self.adj = np.zeros((n, n), dtype=bool)
        for i, j in g.edges:
            self.adj[i, j] = self.adj[j, i] = True
        self.s = _states(profiles)
        self.kappa = np.array([p.capacity for p in profiles], dtype=float)
        self.rho = np.array([p.drift for p in profiles], dtype=float)
        # distance-indexed benefit; index n stands for unreachable
        self.blook = cfg.benefit.lookup(n) if n > 1 else np.zeros(3)
        pairs = all_pairs(n)
        self.pi = np.array([p[0] for p in pairs], dtype=np.int64)
        self.pj = np.array([p[1] for p in pairs], dtype=np.int64)
        self._dist = None
        self._refresh_costs()

    def _refresh_costs(self):
        diff = np.abs(self.s[:, None] - self.s[None, :])
        self.cost = self.cfg.base + self.cfg.alpha * diff
        np.fill_diagonal(self.cost, 0.0)
        self.weight = 1.0 + self.cfg.beta * diff

    def graph(self) -> Graph:
        i, j = np.nonzero(np.triu(self.adj, k=1))
        return Graph(self.n, frozenset(zip(i.tolist(), j.tolist())))

    def profiles(self) -> tuple[AgentProfile, ...]:
        return tuple(
            AgentProfile(float(s), float(k), float(r)) for s, k, r in zip(self.s, self.kappa, self.rho)
        )

    def loads(self) -> np.ndarray:
        return (self.adj * self.cost).sum(axis=1)

    def _all_distances(self) -> np.ndarray:
        if self._dist is None:
            self._dist = self._distances(np.arange(self.n))
        return self._dist

    def _distances(self, sources: np.ndarray, cut: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
        """BFS hop counts from each source row; ``cut`` removes one edge per row."""
        n = self.n
        rows = len(sources)
        a = self.adj.astype(float)
        reach = np.zeros((rows, n), dtype=bool)
        reach[np.arange(rows), sources] = True
        dist = np.full((rows, n), n, dtype=np.int64)
        dist[np.arange(rows), sources] = 0
        for level in range(1, n):
            hits = reach.astype(float) @ a
            if cut is not None:
                u, v = cut
                r = np.arange(rows)
                hits[r, v] -= reach[r, u]
                hits[r, u] -= reach[r, v]
            grown = reach | (hits > 0.5)
            new = grown & ~reach
            if not new.any():
                break
            dist[new] = level
            reach = grown
        return dist

    def benefits(self, dist: np.ndarray, owners: np.ndarray) -> np.ndarray:
        return (self.weight[owners] * self.blook[dist]).sum(axis=1)

    def utilities(self) -> np.ndarray:
        nodes = np.arange(self.n)
        return self.benefits(self._all_distances(), nodes) - self.loads()

    def moves(self) -> np.ndarray:
        """Per pair (bit order): True where the pair would change its link now."""
        n, eps = self.n, self.eps
        nodes = np.arange(n)
        dist = self._all_distances()
        gained = self.benefits(dist, nodes)
        load = self.loads()

        pi, pj = self.pi, self.pj
        c = self.cost[pi, pj]
        fits = (load[pi] + c <= self.kappa[pi] + eps) & (load[pj] + c <= self.kappa[pj] + eps)
        present = self.adj[pi, pj]
        decide = np.zeros(len(pi), dtype=bool)

        # adding (i, j): distances from i become min(d(i, k), 1 + d(j, k))
        idx = np.nonzero(~present & fits)[0]
        if len(idx):
            u, v = pi[idx], pj[idx]
            from_u = np.minimum(np.minimum(dist[u], 1 + dist[v]), n)
            from_v = np.minimum(np.minimum(dist[v], 1 + dist[u]), n)
            gu = self.benefits(from_u, u) - gained[u] - c[idx]
            gv = self.benefits(from_v, v) - gained[v] - c[idx]
            decide[idx] = addition_blocked(gu, gv, eps)

        # cutting (i, j) loses at least weight * (b(1) - b(2)) per endpoint, so
        # links cheaper than that can never be worth cutting
        floor = self.weight[pi, pj] * (self.blook[1] - self.blook[2]) - c
        idx = np.nonzero(present & (floor <= eps))[0]
        if len(idx):
            u, v = pi[idx], pj[idx]
            sources = np.concatenate([u, v])
            others = np.concatenate([v, u])
            cut_dist = self._distances(sources, cut=(sources, others))
            after = self.benefits(cut_dist, sources) - (load[sources] - self.cost[sources, others])
            gain = after - (gained[sources] - load[sources])
            k = len(idx)
            decide[idx] = severance_blocked(gain[:k], gain[k:], eps)
        return decide

    def toggle(self, p: int) -> tuple[int, int]:
        i, j = int(self.pi[p]), int(self.pj[p])
        adding = not self.adj[i, j]
        self.adj[i, j] = self.adj[j, i] = adding
        if adding and self._dist is not None:
            d = self._dist
            through = np.minimum(d[:, i, None] + 1 + d[None, j, :], d[:, j, None] + 1 + d[None, i, :])
            self._dist = np.minimum(d, np.minimum(through, self.n))
        else:
            self._dist = None
        return i, j

    def drift(self, rng: np.random.Generator) -> None:
        xi = rng.uniform(-1.0, 1.0, self.n)
        self.s = np.clip(self.s + self.cfg.heterogeneity * self.rho * xi, 0.0, 1.0)
        self._refresh_costs()

    def shed_overload(self) -> list[tuple[int, int]]:
        """Cut each over-capacity node's costliest links (lowest id on ties) until it fits."""
        forced = []
        for i in range(self.n):
            while self.adj[i].any() and (self.adj[i] * self.cost[i]).sum() > self.kappa[i] + self.eps:
                held = np.where(self.adj[i], self.cost[i], -np.inf)
                j = int(np.argmax(held))
                self.adj[i, j] = self.adj[j, i] = False
                self._dist = None
                forced.append((min(i, j), max(i, j)))
        return forced


def _play_round(engine: _Engine, rng: np.random.Generator, index: int) -> RoundRecord:
    engine.drift(rng)
    forced = engine.shed_overload()
    order = rng.permutation(len(engine.pi))
    added, removed = [], []
    pos = 0
    while pos < len(order):
        decide = engine.moves()[order[pos:]]
        hit = np.flatnonzero(decide)
        if not len(hit):
            break
        pos += int(hit[0])
        p = int(order[pos])
        was_present = bool(engine.adj[engine.pi[p], engine.pj[p]])
        (removed if was_present else added).append(engine.toggle(p))
        pos += 1
    u = engine.utilities()
    q = detect_communities(engine.graph()).q if engine.cfg.track_modularity else None
    return RoundRecord(
        round=index,
        added=tuple(added),
        removed=tuple(removed),
        forced=tuple(forced),
        utilities=tuple(u.tolist()),
        total=float(u.sum()),
        q=q,
    )


def make_rng(seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def step(
    g: Graph, profiles: Sequence[AgentProfile], cfg: EnvironmentConfig, rng: np.random.Generator, index: int = 1
) -> tuple[Graph, tuple[AgentProfile, ...], RoundRecord]:
    """Play one round from ``g``; ``rng`` is advanced in place."""
    engine = _Engine(g, profiles, cfg)
    record = _play_round(engine, rng, index)
    return engine.graph(), engine.profiles(), record


def run(
    initial: Graph,
    profiles: Sequence[AgentProfile],
    cfg: EnvironmentConfig,
    rng: np.random.Generator | None = None,
) -> DynamicsTrace:
    """Play up to ``cfg.rounds`` rounds.

    In a static environment (no drift) the run stops at the first round that
    changes no link, which is then a fixed point. Otherwise all rounds are
    played and ``converged`` reports whether the last round was quiet;
    ``convergence_round`` is the first round of the trailing quiet stretch.
    """
    if len(profiles) != initial.n:
        raise ValueError(f"{len(profiles)} profiles for {initial.n} nodes")
    rng = make_rng(cfg.seed) if rng is None else rng
    engine = _Engine(initial, profiles, cfg)
    static = cfg.heterogeneity == 0 or not engine.rho.any()
    records = []
    quiet_since = None
    for r in range(1, cfg.rounds + 1):
        rec = _play_round(engine, rng, r)
        records.append(rec)
        if rec.quiet:
            quiet_since = quiet_since or r
            if static:
                break
        else:
            quiet_since = None
    return DynamicsTrace(
        records=tuple(records),
        final_graph=engine.graph(),
        final_profiles=engine.profiles(),
        converged=quiet_since is not None,
        convergence_round=quiet_since,
    )


@dataclass(frozen=True)
class SweepRow:
    heterogeneity: float
    capacity: float
    mean_q: float
    sd_q: float
    qs: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    rho_heterogeneity: float | None
    rho_capacity: float | None


DEFAULT_GRID = tuple((h, k) for h in (0.0, 0.5, 1.0, 2.0) for k in (0.3, 0.6, 1.2))


def _sweep_task(args) -> float:
    states, drifts, h, kappa, cfg, grid_index, rep = args
    cfg = replace(cfg, heterogeneity=h, track_modularity=False)
    profiles = [AgentProfile(s, kappa, r) for s, r in zip(states, drifts)]
    trace = run(Graph(len(states)), profiles, cfg, make_rng(cfg.seed, grid_index, rep))
    return detect_communities(trace.final_graph).q


def heterogeneity_sweep(
    grid: Sequence[tuple[float, float]] = DEFAULT_GRID,
    replications: int = 10,
    cfg: EnvironmentConfig | None = None,
    n: int = 30,
    initial_state: float | Sequence[float] = 0.5,
    drift: float | Sequence[float] = 0.1,
    threads: int = 1,
) -> SweepResult:
    """Final modularity over a grid of (heterogeneity, capacity) points.

    ``initial_state`` and ``drift`` are scalars shared by all nodes or
    per-node sequences of length ``n``. Every node gets the grid point's
    capacity and runs begin from the empty graph. Results do not depend on
    ``threads``.
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    cfg = cfg or EnvironmentConfig()
    states = _per_node(initial_state, n, "initial_state")
    drifts = _per_node(drift, n, "drift")
    tasks = [
        (states, drifts, float(h), float(k), cfg, gi, rep)
        for gi, (h, k) in enumerate(grid)
        for rep in range(replications)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            qs = list(pool.map(_sweep_task, tasks))
    else:
        qs = [_sweep_task(t) for t in tasks]
    rows = []
    for gi, (h, k) in enumerate(grid):
        vals = np.array(qs[gi * replications : (gi + 1) * replications])
        sd = float(vals.std(ddof=1)) if replications > 1 else 0.0
        rows.append(SweepRow(float(h), float(k), float(vals.mean()), sd, tuple(vals.tolist())))
    hs = [r.heterogeneity for r in rows]
    ks = [r.capacity for r in rows]
    means = [r.mean_q for r in rows]
    return SweepResult(tuple(rows), _spearman(hs, means), _spearman(ks, means))


def _per_node(value, n: int, what: str) -> tuple[float, ...]:
    if np.ndim(value) == 0:
        return (float(value),) * n
    out = tuple(float(v) for v in value)
    if len(out) != n:
        raise ValueError(f"{what} has {len(out)} entries, expected {n}")
    return out


def _spearman(x, y) -> float | None:
    """Rank correlation, or None when either side is constant."""
    if len(set(x)) < 2 or len(set(y)) < 2:
        return None
    return float(stats.spearmanr(x, y).statistic)
