import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from ising_proptest import graph_core as gc
from ising_proptest.graph_core import Graph, WeightedGraph
from ising_proptest.ising_core import (
    ConsistencyError, IsingModel, SampleBatch, StateCounts, curie_weiss_edge_correlation,
    curie_weiss_edge_correlation_quadrature, curie_weiss_log_partition, empirical_correlations,
    exact_correlation_matrix, exact_counts, exact_pair_correlation, exact_sample,
    exact_single_spin_means, forest_correlations, format_batch, gibbs_sample, index_to_spins,
    log_weight, parse_batch, partition_function, path_correlation_formula, read_batch,
    state_probabilities, write_batch)


def brute_corr(model: IsingModel) -> np.ndarray:
    """Plain-Python enumeration with mpmath accumulation."""
    d = model.d
    z = mpmath.mpf(0)
    acc = [[mpmath.mpf(0)] * d for _ in range(d)]
    for x in itertools.product((1, -1), repeat=d):
        w = mpmath.exp(model.theta * sum(wt * x[u] * x[v] for (u, v), wt in model.wg.weights.items()))
        z += w
        for u in range(d):
            for v in range(d):
                acc[u][v] += w * x[u] * x[v]
    return np.array([[float(a / z) for a in row] for row in acc])


@st.composite
def weighted_graphs(draw, max_d=7, signed=True, forest=False):
    d = draw(st.integers(2, max_d))
    if forest:
        parent = [draw(st.integers(-1, v - 1)) for v in range(1, d)]
        edges = [(p, v) for v, p in zip(range(1, d), parent) if p >= 0]
    else:
        pairs = list(itertools.combinations(range(d), 2))
        edges = [p for p in pairs if draw(st.booleans())]
    lo = -1.5 if signed else 0.2
    ws = {}
    for e in edges:
        w = draw(st.floats(lo, 1.5))
        if abs(w) > 0.05:
            ws[e] = w
    return WeightedGraph.from_dict(d, ws)


# ------------------------------------------------------------- log weight

def test_log_weight_examples():
    edge = IsingModel.simple(gc.path_graph(2), 0.5)
    assert log_weight(edge, [1, 1]) == 0.5
    tri = IsingModel.simple(gc.cycle_graph(3), 0.5)
    assert log_weight(tri, [1, 1, -1]) == -0.5
    assert log_weight(IsingModel.simple(gc.cycle_graph(3), 0.0), [1, -1, 1]) == 0.0
    with pytest.raises(ValueError):
        log_weight(tri, [1, 1])


# ------------------------------------------------------- partition function

def test_partition_function_examples():
    assert partition_function(IsingModel.simple(gc.empty_graph(3), 1.0)) == pytest.approx(math.log(8), abs=1e-15)
    for th in (0.0, 0.3, 2.0, 40.0):
        got = partition_function(IsingModel.simple(gc.path_graph(2), th))
        want = float(mpmath.log(4 * mpmath.cosh(th)))
        assert got == pytest.approx(want, rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("m", [2, 3, 5, 8, 11])
@pytest.mark.parametrize("theta", [0.0, 0.4, 1.7, 10.0, 50.0])
def test_clique_partition_function_two_ways(m, theta):
    enum = partition_function(IsingModel.simple(gc.clique_graph(range(m)), theta))
    sums = curie_weiss_log_partition(m, theta)
    assert enum == pytest.approx(sums, rel=1e-12)
    # the binomial sum, evaluated independently in mpmath
    ref = mpmath.log(mpmath.fsum(mpmath.binomial(m, k) * mpmath.exp(theta * ((m - 2 * k) ** 2 - m) / 2)
                                 for k in range(m + 1)))
    assert sums == pytest.approx(float(ref), rel=1e-13)


def test_enumeration_guard():
    big = IsingModel.simple(gc.empty_graph(26), 0.1)
    with pytest.raises(ValueError):
        partition_function(big)
    with pytest.raises(ValueError):
        exact_sample(IsingModel.simple(gc.empty_graph(21), 0.1), 5, 0)


# --------------------------------------------------------- correlations

def test_pair_correlation_examples():
    # frozen from mpmath: tanh(0.5), tanh(0.5)^2, (e^2-1)/(e^2+3)
    edge = IsingModel.simple(gc.path_graph(2), 0.5)
    assert exact_pair_correlation(edge, 0, 1) == pytest.approx(0.46211715726000975850, abs=1e-15)
    path = IsingModel.simple(gc.path_graph(3), 0.5)
    assert exact_pair_correlation(path, 0, 2) == pytest.approx(0.21355226703407258985, abs=1e-15)
    tri = IsingModel.simple(gc.cycle_graph(3), 0.5)
    for u, v in [(0, 1), (0, 2), (1, 2)]:
        assert exact_pair_correlation(tri, u, v) == pytest.approx(0.61497945897012514659, abs=1e-15)


def test_correlation_matrix_examples():
    assert np.array_equal(exact_correlation_matrix(IsingModel.simple(gc.empty_graph(4), 1.0)), np.eye(4))
    g = gc.disjoint_union(gc.cycle_graph(3), gc.path_graph(3))
    m = exact_correlation_matrix(IsingModel.simple(g, 0.7))
    assert np.all(m[:3, 3:] == 0)


@settings(max_examples=30, deadline=None)
@given(weighted_graphs(max_d=6), st.floats(0.0, 2.0))
def test_correlation_matrix_matches_brute_force(wg, theta):
    model = IsingModel(theta, wg)
    m = exact_correlation_matrix(model)
    assert np.allclose(m, brute_corr(model), atol=1e-12)
    for u, v in itertools.combinations(range(wg.d), 2):
        assert exact_pair_correlation(model, u, v) == pytest.approx(m[u, v], abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(weighted_graphs(max_d=8), st.floats(0.0, 3.0))
def test_single_spin_means_vanish(wg, theta):
    assert np.all(exact_single_spin_means(IsingModel(theta, wg)) == 0)


# ---------------------------------------------------------- path products

def test_path_formula_examples():
    assert path_correlation_formula(0.5, [1]) == pytest.approx(0.46211715726000975850, abs=1e-15)
    assert path_correlation_formula(0.5, [1, 0, 2]) == 0
    assert path_correlation_formula(0.5, [1, 1]) == pytest.approx(
        exact_pair_correlation(IsingModel.simple(gc.path_graph(3), 0.5), 0, 2), abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(weighted_graphs(max_d=10, forest=True), st.floats(0.05, 2.0))
def test_forest_formula_matches_enumeration(wg, theta):
    model = IsingModel(theta, wg)
    assert np.allclose(forest_correlations(model), exact_correlation_matrix(model), atol=1e-12)


def test_forest_formula_signed_examples():
    neg = IsingModel(0.5, WeightedGraph.from_dict(2, {(0, 1): -1.0}))
    assert forest_correlations(neg)[0, 1] == pytest.approx(-math.tanh(0.5), abs=1e-15)
    mixed = IsingModel(0.5, WeightedGraph.from_dict(3, {(0, 1): 1.2, (1, 2): -0.8}))
    want = -math.tanh(0.6) * math.tanh(0.4)
    assert forest_correlations(mixed)[0, 2] == pytest.approx(want, abs=1e-15)
    assert exact_pair_correlation(mixed, 0, 2) == pytest.approx(want, abs=1e-14)
    with pytest.raises(ValueError):
        forest_correlations(IsingModel.simple(gc.cycle_graph(3), 0.5))


# ---------------------------------------------------- graph-level identities

@settings(max_examples=25, deadline=None)
@given(weighted_graphs(max_d=8, signed=False), st.floats(0.05, 2.0))
def test_edge_correlation_at_least_tanh(wg, theta):
    lifted = WeightedGraph(wg.graph, {e: 1.0 + abs(w) for e, w in wg.weights.items()})
    m = exact_correlation_matrix(IsingModel(theta, lifted))
    for u, v in lifted.graph.edges:
        assert m[u, v] >= math.tanh(theta) - 1e-12


@settings(max_examples=25, deadline=None)
@given(weighted_graphs(max_d=8), st.floats(0.05, 1.5), st.data())
def test_restriction_to_simple_paths(wg, theta, data):
    u, v = sorted(data.draw(st.lists(st.integers(0, wg.d - 1), min_size=2, max_size=2, unique=True)))
    keep = gc.simple_path_vertices(wg.graph, u, v)
    full = exact_pair_correlation(IsingModel(theta, wg), u, v)
    sub = WeightedGraph.from_dict(wg.d, {e: wg.weights[e] for e in gc.induced_subgraph_edges(wg.graph, keep)})
    assert exact_pair_correlation(IsingModel(theta, sub), u, v) == pytest.approx(full, abs=1e-12)


# ---------------------------------------------------------- Curie-Weiss

def mp_cw(m, theta):
    num = den = mpmath.mpf(0)
    for k in range(m + 1):
        s = (m - 2 * k) ** 2 - m
        w = mpmath.binomial(m, k) * mpmath.exp(mpmath.mpf(theta) * s / 2)
        den += w
        num += w * mpmath.mpf(s) / (m * (m - 1))
    return num / den


def test_curie_weiss_examples():
    for th in (0.0, 0.3, 1.0, 5.0):
        assert curie_weiss_edge_correlation(2, th) == math.tanh(th)
    assert curie_weiss_edge_correlation(3, 0.5) == pytest.approx(0.61497945897012515193, abs=1e-14)
    assert curie_weiss_edge_correlation(7, 0.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        curie_weiss_edge_correlation(1, 0.5)


@pytest.mark.parametrize("m", [3, 4, 6, 9, 12, 20, 40, 200, 1000])
@pytest.mark.parametrize("theta", [0.01, 0.2, 1.0, 2.0])
def test_curie_weiss_matches_mpmath(m, theta):
    assert curie_weiss_edge_correlation(m, theta) == pytest.approx(float(mp_cw(m, theta)), abs=1e-12)


def test_curie_weiss_quadrature_agrees_for_small_cliques():
    for m in range(3, 13):
        for th in np.linspace(0, 2, 21):
            a = curie_weiss_edge_correlation(m, th, check=False)
            assert abs(curie_weiss_edge_correlation_quadrature(m, th) - a) <= 1e-8


def test_curie_weiss_monotone_grid():
    grid = np.linspace(0, 3, 31)
    vals = np.array([[curie_weiss_edge_correlation(m, t) for t in grid] for m in range(2, 13)])
    assert np.all(np.diff(vals, axis=1) >= -1e-15)
    assert np.all(np.diff(vals, axis=0) >= -1e-15)


def test_curie_weiss_consistency_error_is_raised(monkeypatch):
    import ising_proptest.ising_core as ic
    monkeypatch.setattr(ic, "curie_weiss_edge_correlation_quadrature", lambda m, t, nodes=64: 0.0)
    with pytest.raises(ConsistencyError):
        ic.curie_weiss_edge_correlation(5, 1.0)


# ------------------------------------------------------------- sampling

def test_exact_sample_is_deterministic_and_valid():
    model = IsingModel.simple(gc.cycle_graph(4), 0.4)
    a = exact_sample(model, 500, 7)
    b = exact_sample(model, 500, 7)
    assert np.array_equal(a.spins, b.spins)
    assert not np.array_equal(a.spins, exact_sample(model, 500, 8).spins)
    assert set(np.unique(a.spins)) <= {-1, 1}


def test_exact_sample_d1_is_fair_coin():
    x = exact_sample(IsingModel.simple(gc.empty_graph(1), 0.3), 20000, 1).spins[:, 0]
    assert abs(x.mean()) < 4 / math.sqrt(20000)


def test_exact_sample_uniform_at_theta_zero():
    batch = exact_sample(IsingModel.simple(gc.cycle_graph(5), 0.0), 100000, 3)
    idx = ((1 - batch.spins.astype(int)) // 2) @ (1 << np.arange(5))
    counts = np.bincount(idx, minlength=32)
    assert chisquare(counts).pvalue > 1e-3


def test_exact_sample_frequencies_match_probabilities():
    model = IsingModel(0.6, WeightedGraph.from_dict(4, {(0, 1): 1.0, (1, 2): -1.3, (2, 3): 0.7, (0, 3): 1.0}))
    p = state_probabilities(model)
    n = 10 ** 6
    batch = exact_sample(model, n, 11)
    idx = ((1 - batch.spins.astype(int)) // 2) @ (1 << np.arange(4))
    freq = np.bincount(idx, minlength=16) / n
    assert np.all(np.abs(freq - p) <= 5 * np.sqrt(p * (1 - p) / n))


def test_state_counts_match_batch_statistics():
    model = IsingModel.simple(gc.path_graph(5), 0.8)
    counts = exact_counts(model, 3000, 5)
    assert counts.n == 3000
    m1 = empirical_correlations(counts)
    m2 = empirical_correlations(counts.to_batch())
    assert np.allclose(m1, m2, atol=1e-14)


def test_gibbs_theta_zero_is_fair():
    n = 4000
    batch = gibbs_sample(IsingModel.simple(gc.cycle_graph(6), 0.0), n, 2, burn_in=5, thin=1)
    assert np.all(np.abs(batch.spins.mean(0)) <= 4 / math.sqrt(n))


def test_gibbs_single_edge_correlation():
    n = 10 ** 5
    batch = gibbs_sample(IsingModel.simple(gc.path_graph(2), 0.5), n, 3, burn_in=50, thin=1)
    m = empirical_correlations(batch)
    # consecutive retained states are dependent; thin=1 still mixes fast on one edge
    assert abs(m[0, 1] - math.tanh(0.5)) <= 4 / math.sqrt(n) * 2


def test_gibbs_matches_exact_on_fifteen_vertices():
    g = gc.disjoint_union(gc.cycle_graph(5), gc.path_graph(5), gc.star_graph(5))
    model = IsingModel.simple(g, 0.4)
    n = 4000
    batch = gibbs_sample(model, n, 4, independent_chains=True, burn_in=60, thin=1)
    assert np.all(np.abs(empirical_correlations(batch) - exact_correlation_matrix(model)) <= 5 / math.sqrt(n))


def test_gibbs_long_chain_determinism():
    model = IsingModel.simple(gc.cycle_graph(4), 0.3)
    a = gibbs_sample(model, 50, 9, burn_in=10, thin=2)
    b = gibbs_sample(model, 50, 9, burn_in=10, thin=2)
    assert np.array_equal(a.spins, b.spins) and a.sampler_tag == "gibbs"


# ------------------------------------------------------------ empirical

def test_empirical_correlation_examples():
    one = SampleBatch(np.array([[1, -1, 1]]))
    m = empirical_correlations(one)
    assert m[0, 1] == -1 and m[0, 2] == 1 and np.all(np.diag(m) == 1)
    batch = exact_sample(IsingModel.simple(gc.path_graph(4), 0.5), 200, 1)
    flipped = SampleBatch(-batch.spins)
    assert np.array_equal(empirical_correlations(batch), empirical_correlations(flipped))


def test_empirical_converges_to_exact():
    model = IsingModel.simple(gc.cycle_graph(5), 0.5)
    n = 200000
    m = empirical_correlations(exact_counts(model, n, 3))
    assert np.max(np.abs(m - exact_correlation_matrix(model))) <= 5 / math.sqrt(n)


def test_sample_batch_validation():
    with pytest.raises(ValueError):
        SampleBatch(np.array([[1, 0]]))
    with pytest.raises(ValueError):
        SampleBatch(np.zeros((0, 3)))


# ------------------------------------------------------------------ I/O

def test_batch_file_roundtrip(tmp_path):
    batch = exact_sample(IsingModel.simple(gc.path_graph(3), 0.5), 4, 42)
    path = tmp_path / "b.txt"
    write_batch(batch, path)
    text = path.read_text()
    assert text.splitlines()[0] == "n=4 d=3 seed=42 sampler=exact"
    assert all(tok in ("+1", "-1") for ln in text.splitlines()[1:] for tok in ln.split())
    back = read_batch(path)
    assert np.array_equal(back.spins, batch.spins) and back.seed == 42
    with pytest.raises(ValueError):
        parse_batch("n=2 d=2 seed=0 sampler=exact\n+1 +1\n")


def test_index_to_spins_bit_convention():
    assert index_to_spins(np.array([0, 1, 2]), 2).tolist() == [[1, 1], [-1, 1], [1, -1]]
