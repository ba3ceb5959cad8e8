"""Run the analysis a scenario asks for and assemble its report."""

from __future__ import annotations

import math
import time
from dataclasses import replace
from typing import Callable

from . import __version__
from .community import detect_communities
from .dynamics import (
    DEFAULT_GRID,
    AgentProfile,
    EnvironmentConfig,
    heterogeneity_sweep,
    run,
)
from .efficiency import (
    DEFAULT_CAP as EFFICIENT_CAP,
    classify_homogeneous,
    construct_efficient_homogeneous,
    construct_efficient_separable,
    enumerate_efficient,
    verify_efficiency,
)
from .enumeration import EnumerationCapError
from .graph import Graph
from .model import Homogeneous, Separable, StateDependent, total_utility
from .scenario import AnalysisReport, Scenario
from .stability import (
    DEFAULT_CAP as STABLE_CAP,
    check_pairwise_stable,
    enumerate_stable,
    min_degree_property,
    price_of_anarchy,
)

DEFAULT_STATE = 0.5
DEFAULT_DRIFT = 0.1


def _edges(g: Graph) -> list[list[int]]:
    return [list(e) for e in g.sorted_edges()]


def _utilities(sc: Scenario, g: Graph) -> dict:
    uv = total_utility(g, sc.benefit, sc.cost, sc.states)
    return {"u": list(uv.u), "U": uv.total}


def _cap(sc: Scenario, default: int) -> int:
    return sc.params.enum_cap if sc.params.enum_cap is not None else default


def efficient(sc: Scenario, threads: int = 1) -> tuple[dict, Graph]:
    """Closed-form structure where one exists, checked against full enumeration.

    Enumeration is skipped when ``n`` exceeds the cap but a closed form is
    available; otherwise an over-cap ``n`` raises :class:`EnumerationCapError`.
    """
    eps = sc.params.epsilon
    out: dict = {}
    primary = None
    if isinstance(sc.cost, Homogeneous) and sc.n >= 2:
        cls = classify_homogeneous(sc.n, sc.benefit, sc.cost.c, eps)
        out["regime"] = {"class": cls.regime, "thresholds": list(cls.thresholds), "boundary": cls.boundary}
        primary = construct_efficient_homogeneous(sc.n, sc.benefit, sc.cost.c, eps)
    elif isinstance(sc.cost, Separable) and sc.n >= 2:
        st = construct_efficient_separable(sc.n, sc.benefit, sc.cost.c, eps)
        out["structure"] = {
            "m": st.m,
            "threshold_m": st.threshold_m,
            "hub": st.hub,
            "participants": list(st.participants),
            "isolated": list(st.isolated),
            "core_edges": [list(e) for e in st.core_edges],
            "edges": _edges(st.graph),
            "ties": list(st.ties),
        }
        primary = st.graph
    cap = _cap(sc, EFFICIENT_CAP)
    if primary is not None and sc.n > cap:
        out["enumeration"] = None
    else:
        es = enumerate_efficient(sc.n, sc.benefit, sc.cost, sc.states, cap=cap, eps=eps, threads=threads)
        out["enumeration"] = {
            "best_total": es.best_total,
            "optimizer_count": es.count,
            "optimizers": [_edges(g) for g in es.optimizers],
            "overflow": es.overflow,
        }
        if primary is None:
            primary = es.optimizers[0]
        else:
            total = total_utility(primary, sc.benefit, sc.cost, sc.states).total
            out["construction_gap"] = max(es.best_total - total, 0.0)
    out["graph"] = _edges(primary)
    out["utilities"] = _utilities(sc, primary)
    return out, primary


def stable(sc: Scenario, threads: int = 1) -> tuple[dict, Graph | None]:
    eps = sc.params.epsilon
    ss = enumerate_stable(sc.n, sc.benefit, sc.cost, sc.states, cap=_cap(sc, STABLE_CAP), eps=eps, threads=threads)
    out = {
        "count": ss.count,
        "graphs": [_edges(g) for g in ss.graphs],
        "totals": list(ss.totals),
        "overflow": ss.overflow,
        "worst_total": ss.worst_total,
        "best_total": ss.best_total,
    }
    if isinstance(sc.cost, Homogeneous) and sc.n >= 2 and sc.cost.c > sc.benefit(1) and not ss.overflow:
        out["min_degree_two"] = min_degree_property(ss, sc.benefit, sc.cost)
    graphs = ss.graphs
    return out, graphs[0] if graphs else None


def poa(sc: Scenario, threads: int = 1) -> tuple[dict, None]:
    res = price_of_anarchy(
        sc.n, sc.benefit, sc.cost, sc.states, cap=_cap(sc, STABLE_CAP), eps=sc.params.epsilon, threads=threads
    )
    return {
        "efficient_total": res.efficient_total,
        "worst_stable_total": res.worst_stable_total,
        "best_stable_total": res.best_stable_total,
        "stable_count": res.stable_count,
        "poa": res.poa,
        "defined": res.defined,
    }, None


def environment(sc: Scenario, **overrides) -> EnvironmentConfig:
    if isinstance(sc.cost, StateDependent):
        base, alpha = sc.cost.base, sc.cost.alpha
    elif isinstance(sc.cost, Homogeneous):
        base, alpha = sc.cost.c, 0.0
    else:
        raise ValueError("dynamics needs a homogeneous or state_dependent cost")
    p = sc.params
    return EnvironmentConfig(
        heterogeneity=p.heterogeneity,
        rounds=p.rounds,
        seed=p.seed,
        base=base,
        alpha=alpha,
        benefit=sc.benefit,
        beta=p.beta,
        epsilon=p.epsilon,
        **overrides,
    )


def _profile_columns(sc: Scenario):
    prof = sc.profiles
    states = prof.states if prof and prof.states else (DEFAULT_STATE,) * sc.n
    caps = prof.capacities if prof and prof.capacities else (math.inf,) * sc.n
    drift = prof.drift if prof and prof.drift else (DEFAULT_DRIFT,) * sc.n
    return states, caps, drift


def dynamics(sc: Scenario, threads: int = 1, on_round: Callable | None = None) -> tuple[dict, Graph]:
    cfg = environment(sc, track_modularity=on_round is not None)
    states, caps, drift = _profile_columns(sc)
    profiles = [AgentProfile(s, k, r) for s, k, r in zip(states, caps, drift)]
    trace = run(Graph(sc.n), profiles, cfg)
    if on_round is not None:
        for rec in trace.records:
            on_round(rec)
    g = trace.final_graph
    mod = detect_communities(g)
    last = trace.records[-1]
    return {
        "rounds_played": len(trace.records),
        "converged": trace.converged,
        "convergence_round": trace.convergence_round,
        "final_graph": _edges(g),
        "edge_count": len(g.edges),
        "final_states": [p.state for p in trace.final_profiles],
        "utilities": {"u": list(last.utilities), "U": last.total},
        "modularity": {"q": mod.q, "partition": list(mod.partition)},
    }, g


def sweep(sc: Scenario, threads: int = 1) -> tuple[dict, None]:
    states, _, drift = _profile_columns(sc)
    grid = sc.params.grid or DEFAULT_GRID
    res = heterogeneity_sweep(
        grid,
        sc.params.replications,
        replace(environment(sc), heterogeneity=0.0),
        n=sc.n,
        initial_state=states,
        drift=drift,
        threads=threads,
    )
    rows = [
        {"heterogeneity": r.heterogeneity, "capacity": r.capacity, "mean_q": r.mean_q, "sd_q": r.sd_q, "q": list(r.qs)}
        for r in res.rows
    ]
    return {
        "rows": rows,
        "spearman_heterogeneity_q": res.rho_heterogeneity,
        "spearman_capacity_q": res.rho_capacity,
    }, None


def check(sc: Scenario, g: Graph, threads: int = 1) -> dict:
    """Efficiency gap and pairwise-stability verdict for a given graph."""
    eps = sc.params.epsilon
    verdict = check_pairwise_stable(g, sc.benefit, sc.cost, sc.states, eps)
    out = {
        "graph": _edges(g),
        "utilities": _utilities(sc, g),
        "pairwise_stable": verdict.stable,
        "violations": [
            {"pair": list(v.pair), "kind": v.kind, "delta_i": v.delta_i, "delta_j": v.delta_j}
            for v in verdict.violations
        ],
    }
    ec = verify_efficiency(g, sc.benefit, sc.cost, sc.states, cap=_cap(sc, EFFICIENT_CAP), eps=eps, threads=threads)
    out["efficiency"] = {"total": ec.total, "best_total": ec.best_total, "gap": ec.gap, "efficient": ec.efficient}
    return out


RUNNERS = {"efficient": efficient, "stable": stable, "poa": poa, "dynamics": dynamics, "sweep": sweep}


def run_analysis(
    sc: Scenario, analysis: str | None = None, threads: int = 1, on_round: Callable | None = None
) -> tuple[AnalysisReport, Graph | None]:
    """Run ``analysis`` (default: the scenario's own) and return the report and its headline graph."""
    name = analysis or sc.analysis
    start = time.perf_counter()
    if name == "dynamics":
        results, g = dynamics(sc, threads, on_round)
    else:
        results, g = RUNNERS[name](sc, threads)
    elapsed = time.perf_counter() - start
    return AnalysisReport(sc, name, results, __version__, {name: elapsed}), g


__all__ = ["run_analysis", "check", "environment", "EnumerationCapError"]
