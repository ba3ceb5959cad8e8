"""Scenario files, analysis reports and graph export formats.

Scenarios and reports are JSON. Floats are written with Python's shortest
round-trip representation, so every 64-bit value reads back bit for bit.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .graph import Graph
from .model import (
    EPS,
    BenefitFunction,
    CostModel,
    Homogeneous,
    Matrix,
    Separable,
    StateDependent,
    benefit_table_problems,
)

ANALYSES = ("efficient", "stable", "poa", "dynamics", "sweep")
DEFAULT_DELTA = 0.5
MAX_SEED = 2**64 - 1


class ScenarioError(ValueError):
    """Every problem found in a scenario document, as (JSON pointer, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("\n".join(f"{path or '/'}: {msg}" for path, msg in self.errors))


@dataclass(frozen=True)
class Profiles:
    states: tuple[float, ...] | None = None
    capacities: tuple[float, ...] | None = None
    drift: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Params:
    epsilon: float = EPS
    enum_cap: int | None = None
    seed: int = 0
    rounds: int = 500
    beta: float = 1.0
    heterogeneity: float = 0.0
    grid: tuple[tuple[float, float], ...] | None = None
    replications: int = 10


@dataclass(frozen=True)
class Scenario:
    n: int
    benefit: BenefitFunction
    cost: CostModel
    analysis: str
    profiles: Profiles | None = None
    params: Params = field(default_factory=Params)
    labels: tuple[str, ...] | None = None

    @property
    def states(self) -> tuple[float, ...] | None:
        return self.profiles.states if self.profiles else None

    def label_map(self) -> list[str]:
        return list(self.labels) if self.labels else [str(i) for i in range(self.n)]

    def to_dict(self) -> dict:
        """The scenario echo: a document that parses back to an equal scenario."""
        bf = self.benefit
        doc: dict[str, Any] = {
            "n": self.n,
            "benefit": {"delta": bf.delta} if bf.delta is not None else {"table": list(bf.table)},
            "cost": _cost_doc(self.cost),
            "analysis": self.analysis,
        }
        if self.profiles is not None:
            prof = {}
            for key in ("states", "capacities", "drift"):
                values = getattr(self.profiles, key)
                if values is not None:
                    prof[key] = [None if math.isinf(v) else v for v in values]
            doc["profiles"] = prof
        params = {}
        for key in Params.__dataclass_fields__:
            value = getattr(self.params, key)
            if key == "grid" and value is not None:
                value = [[h, None if math.isinf(k) else k] for h, k in value]
            if value is not None:
                params[key] = value
        doc["params"] = params
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        return doc


def _cost_doc(cm: CostModel) -> dict:
    if isinstance(cm, Homogeneous):
        return {"homogeneous": cm.c}
    if isinstance(cm, Separable):
        return {"separable": list(cm.c)}
    if isinstance(cm, Matrix):
        return {"matrix": [list(row) for row in cm.c]}
    return {"state_dependent": {"base": cm.base, "alpha": cm.alpha}}


class _Checker:
    """Collects errors instead of stopping at the first one."""

    def __init__(self):
        self.errors: list[tuple[str, str]] = []

    def fail(self, path: str, msg: str) -> None:
        self.errors.append((path, msg))

    def obj(self, value, path: str, allowed: tuple[str, ...]) -> dict | None:
        if not isinstance(value, dict):
            self.fail(path, "expected an object")
            return None
        for key in value:
            if key not in allowed:
                self.fail(f"{path}/{_escape(key)}", "unknown key")
        return value

    def real(self, value, path: str, *, lo=None, hi=None, lo_open=False, hi_open=False, nullable=False):
        if value is None and nullable:
            return math.inf
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.fail(path, "expected a finite number" + (" or null" if nullable else ""))
            return None
        v = float(value)
        if lo is not None and (v <= lo if lo_open else v < lo):
            self.fail(path, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
            return None
        if hi is not None and (v >= hi if hi_open else v > hi):
            self.fail(path, f"must be {'<' if hi_open else '<='} {hi}, got {v}")
            return None
        return v

    def integer(self, value, path: str, *, lo=None, hi=None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, "expected an integer")
            return None
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            self.fail(path, f"must lie in [{lo}, {hi if hi is not None else 'inf'}], got {value}")
            return None
        return value

    def vector(self, value, path: str, length: int | None, **bounds):
        if not isinstance(value, list):
            self.fail(path, "expected an array")
            return None
        if length is not None and len(value) != length:
            self.fail(path, f"dimension mismatch: {len(value)} entries, expected n = {length}")
            return None
        out = [self.real(v, f"{path}/{k}", **bounds) for k, v in enumerate(value)]
        return None if any(v is None for v in out) else tuple(out)


def _escape(key) -> str:
    return str(key).replace("~", "~0").replace("/", "~1")


def parse_scenario(text: str | bytes) -> Scenario:
    """Validate a JSON scenario document.

    Raises :class:`ScenarioError` listing every problem found, each tagged
    with a JSON-pointer path.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError([("", f"not UTF-8: {exc}")]) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([("", f"malformed JSON: {exc}")]) from None
    return scenario_from_dict(doc)


def scenario_from_dict(doc) -> Scenario:
    ck = _Checker()
    top = ck.obj(doc, "", ("n", "benefit", "cost", "profiles", "analysis", "params", "labels"))
    if top is None:
        raise ScenarioError(ck.errors)
    for key in ("n", "cost", "analysis"):
        if key not in top:
            ck.fail(f"/{key}", "missing required field")

    n = ck.integer(top["n"], "/n", lo=1) if "n" in top else None

    bf = BenefitFunction.decay(DEFAULT_DELTA)
    if "benefit" in top:
        bf = _parse_benefit(ck, top["benefit"], n)

    cm = _parse_cost(ck, top["cost"], n) if "cost" in top else None

    analysis = top.get("analysis")
    if "analysis" in top and analysis not in ANALYSES:
        ck.fail("/analysis", f"must be one of {list(ANALYSES)}, got {analysis!r}")
        analysis = None

    profiles = _parse_profiles(ck, top["profiles"], n) if "profiles" in top else None
    params = _parse_params(ck, top["params"]) if "params" in top else Params()

    labels = None
    if "labels" in top:
        raw = top["labels"]
        if not isinstance(raw, list) or not all(isinstance(x, str) and x for x in raw):
            ck.fail("/labels", "expected an array of non-empty strings")
        elif n is not None and len(raw) != n:
            ck.fail("/labels", f"dimension mismatch: {len(raw)} labels, expected n = {n}")
        elif len(set(raw)) != len(raw):
            ck.fail("/labels", "labels must be distinct")
        else:
            labels = tuple(raw)

    if isinstance(cm, StateDependent) and analysis in ("efficient", "stable", "poa"):
        if profiles is None or profiles.states is None:
            ck.fail("/profiles/states", "state-dependent cost needs node states for this analysis")
    if analysis in ("dynamics", "sweep") and cm is not None and not isinstance(cm, (Homogeneous, StateDependent)):
        ck.fail("/cost", "dynamics needs a homogeneous or state_dependent cost")

    if ck.errors:
        raise ScenarioError(ck.errors)
    return Scenario(n, bf, cm, analysis, profiles, params, labels)


def _parse_benefit(ck: _Checker, raw, n) -> BenefitFunction | None:
    body = ck.obj(raw, "/benefit", ("delta", "table"))
    if body is None:
        return None
    if len(body.keys() & {"delta", "table"}) != 1:
        ck.fail("/benefit", "give exactly one of delta or table")
        return None
    if "delta" in body:
        delta = ck.real(body["delta"], "/benefit/delta", lo=0.0, hi=1.0, lo_open=True, hi_open=True)
        return None if delta is None else BenefitFunction.decay(delta)
    table = ck.vector(body["table"], "/benefit/table", None)
    if table is None:
        return None
    problems = benefit_table_problems(table)
    for msg in problems:
        ck.fail("/benefit/table", f"b must be positive and strictly decreasing: {msg}")
    if n is not None and n > 1 and len(table) < n - 1:
        ck.fail("/benefit/table", f"dimension mismatch: {len(table)} entries, need n - 1 = {n - 1}")
        return None
    return None if problems else BenefitFunction.from_table(table)


def _parse_cost(ck: _Checker, raw, n) -> CostModel | None:
    kinds = ("homogeneous", "separable", "matrix", "state_dependent")
    body = ck.obj(raw, "/cost", kinds)
    if body is None:
        return None
    given = [k for k in kinds if k in body]
    if len(given) != 1:
        ck.fail("/cost", f"give exactly one of {list(kinds)}")
        return None
    kind = given[0]
    path = f"/cost/{kind}"
    value = body[kind]
    if kind == "homogeneous":
        c = ck.real(value, path, lo=0.0)
        return None if c is None else Homogeneous(c)
    if kind == "separable":
        c = ck.vector(value, path, n, lo=0.0)
        return None if c is None else Separable(c)
    if kind == "matrix":
        if not isinstance(value, list):
            ck.fail(path, "expected an array of rows")
            return None
        if n is not None and len(value) != n:
            ck.fail(path, f"dimension mismatch: {len(value)} rows, expected n = {n}")
            return None
        rows = [ck.vector(row, f"{path}/{r}", len(value), lo=0.0) for r, row in enumerate(value)]
        if any(row is None for row in rows):
            return None
        bad = False
        for i, row in enumerate(rows):
            if row[i] != 0:
                ck.fail(f"{path}/{i}/{i}", "diagonal entries must be 0")
                bad = True
            for j in range(i + 1, len(rows)):
                if abs(row[j] - rows[j][i]) > EPS:
                    ck.fail(f"{path}/{i}/{j}", f"matrix must be symmetric: {row[j]} vs {rows[j][i]}")
                    bad = True
        return None if bad else Matrix(tuple(rows))
    sd = ck.obj(value, path, ("base", "alpha"))
    if sd is None:
        return None
    parts = {}
    for key in ("base", "alpha"):
        if key not in sd:
            ck.fail(f"{path}/{key}", "missing required field")
        else:
            parts[key] = ck.real(sd[key], f"{path}/{key}", lo=0.0)
    if len(parts) < 2 or None in parts.values():
        return None
    return StateDependent(parts["base"], parts["alpha"])


def _parse_profiles(ck: _Checker, raw, n) -> Profiles | None:
    body = ck.obj(raw, "/profiles", ("states", "capacities", "drift"))
    if body is None:
        return None
    bounds = {
        "states": dict(lo=0.0, hi=1.0),
        "capacities": dict(lo=0.0, nullable=True),
        "drift": dict(lo=0.0),
    }
    out = {key: ck.vector(body[key], f"/profiles/{key}", n, **bounds[key]) for key in bounds if key in body}
    return Profiles(**out)


def _parse_params(ck: _Checker, raw) -> Params | None:
    body = ck.obj(raw, "/params", tuple(Params.__dataclass_fields__))
    if body is None:
        return None
    out: dict[str, Any] = {}
    checks = {
        "epsilon": lambda v, p: ck.real(v, p, lo=0.0, lo_open=True),
        "enum_cap": lambda v, p: ck.integer(v, p, lo=1),
        "seed": lambda v, p: ck.integer(v, p, lo=0, hi=MAX_SEED),
        "rounds": lambda v, p: ck.integer(v, p, lo=1),
        "beta": lambda v, p: ck.real(v, p, lo=0.0),
        "heterogeneity": lambda v, p: ck.real(v, p, lo=0.0),
        "replications": lambda v, p: ck.integer(v, p, lo=1),
    }
    for key, check in checks.items():
        if key in body:
            value = check(body[key], f"/params/{key}")
            if value is not None:
                out[key] = value
    if "grid" in body:
        grid = body["grid"]
        if not isinstance(grid, list) or not grid:
            ck.fail("/params/grid", "expected a non-empty array of [heterogeneity, capacity] pairs")
        else:
            points = []
            for k, point in enumerate(grid):
                path = f"/params/grid/{k}"
                if not isinstance(point, list) or len(point) != 2:
                    ck.fail(path, "expected a [heterogeneity, capacity] pair")
                    continue
                h = ck.real(point[0], f"{path}/0", lo=0.0)
                kappa = ck.real(point[1], f"{path}/1", lo=0.0, nullable=True)
                if h is not None and kappa is not None:
                    points.append((h, kappa))
            if len(points) == len(grid):
                out["grid"] = tuple(points)
    return Params(**out)


def plain(value):
    """Convert numpy scalars, tuples and non-finite floats into JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if hasattr(value, "tolist"):
        return plain(value.tolist())
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class AnalysisReport:
    scenario: Scenario
    analysis: str
    results: dict
    version: str
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> dict:
        doc = {
            "tool": {"name": "netform", "version": self.version},
            "analysis": self.analysis,
            "scenario": self.scenario.to_dict(),
            "labels": self.scenario.label_map(),
            "results": self.results,
        }
        if include_timings:
            doc["timings"] = self.timings
        return plain(doc)


def emit_report(report: AnalysisReport, include_timings: bool = False) -> str:
    """Deterministic JSON text with sorted keys; timings are left out by default."""
    return json.dumps(report.to_dict(include_timings), sort_keys=True, indent=2, allow_nan=False) + "\n"


class GraphFormat(str, enum.Enum):
    EDGELIST = "edgelist"
    DOT = "dot"
    JSON = "json"


def export_graph(g: Graph, fmt: GraphFormat | str) -> str:
    try:
        fmt = GraphFormat(fmt.lower() if isinstance(fmt, str) else fmt)
    except ValueError:
        raise ValueError(f"unknown graph format {fmt!r}; use one of {[f.value for f in GraphFormat]}") from None
    edges = g.sorted_edges()
    if fmt is GraphFormat.EDGELIST:
        return "".join(f"{i} {j}\n" for i, j in edges)
    if fmt is GraphFormat.DOT:
        lines = ["graph G {"]
        lines += [f"  {v};" for v in range(g.n)]
        lines += [f"  {i} -- {j};" for i, j in edges]
        return "\n".join(lines) + "\n}\n"
    return json.dumps({"n": g.n, "edges": [list(e) for e in edges]}, separators=(",", ":")) + "\n"


def parse_graph(text: str, n: int, labels: list[str] | None = None) -> Graph:
    """Read a graph written as JSON ``{"n", "edges"}`` or as an edge list.

    Edge-list lines hold two node ids (or labels); blank lines and ``#``
    comments are skipped.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed graph JSON: {exc}") from None
        if not isinstance(doc, dict) or not isinstance(doc.get("edges"), list):
            raise ValueError("graph JSON needs an 'edges' array")
        if doc.get("n", n) != n:
            raise ValueError(f"graph has n = {doc.get('n')}, scenario has n = {n}")
        pairs = doc["edges"]
    else:
        pairs = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ValueError(f"line {lineno}: expected two node ids, got {line!r}")
            pairs.append([_node_id(t, labels, lineno) for t in tokens])
    try:
        if not all(isinstance(p, list) and len(p) == 2 and all(_is_int(v) for v in p) for p in pairs):
            raise ValueError("edges must be pairs of integer node ids")
        return Graph.from_edges(n, [tuple(p) for p in pairs])
    except ValueError as exc:
        raise ValueError(f"invalid graph: {exc}") from None


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _node_id(token: str, labels, lineno: int) -> int:
    if labels and token in labels:
        return labels.index(token)
    try:
        return int(token)
    except ValueError:
        raise ValueError(f"line {lineno}: unknown node {token!r}") from None
