import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netform import enumeration
from netform.graph import Graph
from netform.model import BenefitFunction, Matrix, Separable, total_utility


def test_cap_error():
    with pytest.raises(enumeration.EnumerationCapError, match="2\\^36"):
        enumeration.check_cap(9, 8, "search")
    enumeration.check_cap(8, 8, "search")


def test_thread_env(monkeypatch):
    monkeypatch.setenv("NETFORM_THREADS", "3")
    assert enumeration.default_threads() == 3


def test_chunks_cover_every_mask_once():
    seen = np.concatenate(list(enumeration.mask_chunks(5, chunk=100)))
    assert seen.tolist() == list(range(1024))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_node_utilities_match_scalar_path_everywhere(n):
    rng = np.random.default_rng(n)
    bf = BenefitFunction.from_table(sorted(rng.uniform(0.1, 1.0, n - 1), reverse=True))
    c = rng.uniform(0, 1, (n, n))
    cm = Matrix(tuple(map(tuple, np.triu(c, 1) + np.triu(c, 1).T)))
    masks = np.arange(enumeration.graph_count(n))
    table = enumeration.node_utilities(masks, n, bf.values(n), cm.matrix(n))
    for m in masks:
        ref = total_utility(Graph.from_mask(n, int(m)), bf, cm).u
        np.testing.assert_allclose(table[m], ref, atol=1e-12)


@given(st.lists(st.integers(0, 2**21 - 1), min_size=1, max_size=20), st.floats(0.1, 0.9))
def test_seven_node_samples_match_scalar_path(masks, delta):
    n = 7
    bf = BenefitFunction.decay(delta)
    cm = Separable(tuple(0.1 * k for k in range(n)))
    arr = np.array(masks, dtype=np.int64)
    got = enumeration.total_utilities(arr, n, bf.values(n), cm.matrix(n))
    want = [total_utility(Graph.from_mask(n, m), bf, cm).total for m in masks]
    np.testing.assert_allclose(got, want, atol=1e-9)


def test_threads_do_not_change_results():
    n = 5
    b = BenefitFunction.decay(0.6).values(n)
    cost = Separable((0.1, 0.2, 0.3, 0.4, 0.5)).matrix(n)
    one = enumeration.utility_table(n, b, cost, threads=1)
    four = enumeration.utility_table(n, b, cost, threads=4)
    assert np.array_equal(one, four)
