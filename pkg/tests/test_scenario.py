import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from netform.analysis import run_analysis
from netform.graph import Graph, complete_graph, empty_graph, star_graph
from netform.model import BenefitFunction, Homogeneous, Separable, StateDependent
from netform.scenario import (
    AnalysisReport,
    Params,
    Profiles,
    Scenario,
    ScenarioError,
    emit_report,
    export_graph,
    parse_graph,
    parse_scenario,
)

MINIMAL = {"n": 4, "benefit": {"delta": 0.5}, "cost": {"homogeneous": 0.3}, "analysis": "efficient"}


def errors_of(doc):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(json.dumps(doc))
    return info.value.errors


class TestParse:
    def test_minimal(self):
        sc = parse_scenario(json.dumps(MINIMAL))
        assert sc.n == 4 and sc.cost == Homogeneous(0.3) and sc.benefit == BenefitFunction.decay(0.5)
        assert sc.params == Params()

    def test_default_benefit(self):
        doc = dict(MINIMAL)
        del doc["benefit"]
        assert parse_scenario(json.dumps(doc)).benefit == BenefitFunction.decay(0.5)

    def test_increasing_table(self):
        errs = errors_of({**MINIMAL, "n": 3, "benefit": {"table": [1.0, 1.1]}})
        assert any(path == "/benefit/table" and "decreasing" in msg for path, msg in errs)

    def test_separable_dimension(self):
        errs = errors_of({**MINIMAL, "cost": {"separable": [0.1, 0.2, 0.3]}})
        assert errs == [("/cost/separable", "dimension mismatch: 3 entries, expected n = 4")]

    def test_collects_every_error(self):
        doc = {
            "n": 3,
            "benefit": {"delta": 1.5},
            "cost": {"separable": [0.1, -0.2, 0.3]},
            "analysis": "nope",
            "params": {"rounds": 0, "color": "red"},
            "surprise": True,
        }
        paths = {p for p, _ in errors_of(doc)}
        assert paths == {
            "/benefit/delta",
            "/cost/separable/1",
            "/analysis",
            "/params/rounds",
            "/params/color",
            "/surprise",
        }

    def test_missing_fields(self):
        paths = {p for p, _ in errors_of({"benefit": {"delta": 0.5}})}
        assert paths == {"/n", "/cost", "/analysis"}

    def test_malformed_json(self):
        with pytest.raises(ScenarioError, match="malformed"):
            parse_scenario("{not json")

    def test_not_an_object(self):
        assert errors_of([1, 2]) == [("", "expected an object")]

    def test_matrix_checks(self):
        errs = errors_of({**MINIMAL, "n": 2, "cost": {"matrix": [[0, 1], [2, 0]]}})
        assert errs[0][0] == "/cost/matrix/0/1"
        errs = errors_of({**MINIMAL, "n": 2, "cost": {"matrix": [[1, 1], [1, 0]]}})
        assert errs[0][0] == "/cost/matrix/0/0"

    def test_two_cost_kinds(self):
        errs = errors_of({**MINIMAL, "cost": {"homogeneous": 1, "separable": [1, 1, 1, 1]}})
        assert errs[0][0] == "/cost"

    def test_state_dependent_needs_states_for_static_analyses(self):
        errs = errors_of({**MINIMAL, "cost": {"state_dependent": {"base": 0.1, "alpha": 0.2}}})
        assert errs[0][0] == "/profiles/states"

    def test_dynamics_rejects_separable(self):
        errs = errors_of({**MINIMAL, "analysis": "dynamics", "cost": {"separable": [0.1] * 4}})
        assert errs[0][0] == "/cost"

    def test_profiles_and_labels(self):
        doc = {
            **MINIMAL,
            "profiles": {"states": [0, 0.5, 1, 0.25], "capacities": [1, None, 2, 3]},
            "labels": ["a", "b", "c", "d"],
        }
        sc = parse_scenario(json.dumps(doc))
        assert sc.profiles.capacities[1] == math.inf
        assert sc.label_map() == ["a", "b", "c", "d"]

    def test_duplicate_labels(self):
        assert errors_of({**MINIMAL, "labels": ["a", "a", "b", "c"]})[0][0] == "/labels"

    def test_bool_is_not_a_number(self):
        assert errors_of({**MINIMAL, "n": True})[0][0] == "/n"

    def test_grid(self):
        sc = parse_scenario(json.dumps({**MINIMAL, "params": {"grid": [[0, 0.3], [1, None]]}}))
        assert sc.params.grid == ((0.0, 0.3), (1.0, math.inf))
        assert errors_of({**MINIMAL, "params": {"grid": [[0]]}})[0][0] == "/params/grid/0"


scenarios = st.builds(
    Scenario,
    n=st.just(4),
    benefit=st.one_of(
        st.floats(0.01, 0.99).map(BenefitFunction.decay),
        st.just(BenefitFunction.from_table([1.0, 0.3, 0.1])),
    ),
    cost=st.one_of(
        st.floats(0, 10).map(Homogeneous),
        st.lists(st.floats(0, 10), min_size=4, max_size=4).map(lambda c: Separable(tuple(c))),
    ),
    analysis=st.sampled_from(["efficient", "stable", "poa"]),
    profiles=st.one_of(
        st.none(),
        st.builds(
            Profiles,
            states=st.lists(st.floats(0, 1), min_size=4, max_size=4).map(tuple),
            capacities=st.lists(st.one_of(st.just(math.inf), st.floats(0, 5)), min_size=4, max_size=4).map(tuple),
        ),
    ),
    params=st.builds(
        Params,
        epsilon=st.floats(1e-12, 1e-3),
        seed=st.integers(0, 2**64 - 1),
        rounds=st.integers(1, 1000),
        beta=st.floats(0, 3),
    ),
)


@given(scenarios)
def test_echo_round_trip(sc):
    text = json.dumps(sc.to_dict(), sort_keys=True)
    assert parse_scenario(text) == sc


def test_report_echo_round_trips():
    sc = parse_scenario(json.dumps({**MINIMAL, "cost": {"homogeneous": 0.1 + 0.2}}))
    report, _ = run_analysis(sc)
    echoed = json.loads(emit_report(report))["scenario"]
    assert parse_scenario(json.dumps(echoed)) == sc


class TestReport:
    def test_sorted_and_without_timings(self):
        sc = parse_scenario(json.dumps(MINIMAL))
        report = AnalysisReport(sc, "efficient", {"z": 1, "a": [1.5]}, "0.0", {"efficient": 1.25})
        text = emit_report(report)
        doc = json.loads(text)
        assert "timings" not in doc
        assert list(doc) == sorted(doc)
        assert json.loads(emit_report(report, include_timings=True))["timings"] == {"efficient": 1.25}

    def test_empty_optimizer_list(self):
        sc = parse_scenario(json.dumps(MINIMAL))
        report = AnalysisReport(sc, "stable", {"optimizers": []}, "0.0")
        assert '"optimizers": []' in emit_report(report)

    def test_non_finite_become_null(self):
        sc = parse_scenario(json.dumps(MINIMAL))
        report = AnalysisReport(sc, "poa", {"poa": None, "x": math.nan, "y": math.inf}, "0.0")
        doc = json.loads(emit_report(report))
        assert doc["results"] == {"poa": None, "x": None, "y": None}

    def test_floats_are_bit_faithful(self):
        x = 0.1 + 0.2
        sc = parse_scenario(json.dumps(MINIMAL))
        doc = json.loads(emit_report(AnalysisReport(sc, "efficient", {"x": x}, "0.0")))
        assert doc["results"]["x"] == x


class TestExport:
    def test_edgelist(self):
        assert export_graph(star_graph(3, 0), "edgelist") == "0 1\n0 2\n"

    def test_dot(self):
        text = export_graph(empty_graph(2), "dot")
        assert text == "graph G {\n  0;\n  1;\n}\n"

    def test_json(self):
        assert export_graph(complete_graph(3), "json") == '{"n":3,"edges":[[0,1],[0,2],[1,2]]}\n'

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown graph format"):
            export_graph(empty_graph(2), "gml")

    @pytest.mark.parametrize("fmt", ["edgelist", "json"])
    def test_parse_back(self, fmt):
        g = Graph.from_edges(5, [(0, 4), (1, 2), (3, 4)])
        assert parse_graph(export_graph(g, fmt), 5) == g

    def test_parse_labels_and_comments(self):
        g = parse_graph("# hub links\na b\nb c  # trailing\n\n", 3, ["a", "b", "c"])
        assert g == Graph.from_edges(3, [(0, 1), (1, 2)])

    @pytest.mark.parametrize("text", ["0 1 2\n", "0 9\n", "x y\n", '{"n": 2, "edges": [[0, 0]]}', '{"edges": 3}'])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_graph(text, 3)
