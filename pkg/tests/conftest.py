import itertools

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from netform.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, frozenset(p for p, k in zip(pairs, keep) if k))


@st.composite
def benefit_tables(draw, length):
    """Strictly decreasing positive tables of the given length."""
    top = draw(st.floats(0.2, 2.0))
    ratios = draw(st.lists(st.floats(0.1, 0.95), min_size=length - 1, max_size=length - 1))
    out = [top]
    for r in ratios:
        out.append(out[-1] * r)
    return out


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
