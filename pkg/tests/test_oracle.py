import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ising_proptest import graph_core as gc
from ising_proptest.graph_core import Graph, WeightedGraph
from ising_proptest.ising_core import ConsistencyError, IsingModel, exact_correlation_matrix
from ising_proptest.oracle import (
    SUITES, CliquePairSpec, DominanceSpec, antiferro_T, antiferro_T_enumerated, chi2_exact,
    chi2_mixture, chi2_mixture_direct, chi2_product, edge_addition_factor,
    griffiths_edge_prune_check, ratio, ratio_limit, ratio_monotonicity_check, run_suite,
    second_moment, stochastic_dominance_check)


def incomplete_triangles(d, theta, block=None):
    """d/3 copies of a two-edge path; block j gets its missing edge."""
    motif = Graph(3, frozenset({(0, 1), (1, 2)}))
    g = gc.repeated_motif(motif, d, (0, 2) if block is not None else None, block or 0)
    return IsingModel.simple(g, theta)


# ------------------------------------------------------------ chi-square

def test_chi2_identity_cases():
    m = IsingModel.simple(gc.cycle_graph(4), 0.7)
    assert chi2_exact(m, m) == pytest.approx(0.0, abs=1e-14)
    p1 = IsingModel.simple(gc.path_graph(2), 0.5)
    p0 = IsingModel.simple(gc.empty_graph(2), 0.5)
    # E_0 (P_1/P_0)^2 = 1 + tanh^2(theta), frozen from mpmath
    assert second_moment(p1, p1, p0) == pytest.approx(1.2135522670340725899, abs=1e-12)
    assert chi2_exact(p1, p0) == pytest.approx(math.tanh(0.5) ** 2, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_chi2_product_rule(n):
    p0 = IsingModel(0.6, WeightedGraph.from_dict(4, {(0, 1): 1.0, (2, 3): -1.0}))
    p1 = IsingModel(0.6, WeightedGraph.from_dict(4, {(0, 1): 1.0, (1, 2): 1.0, (2, 3): -1.0}))
    f = second_moment(p1, p1, p0)
    assert chi2_product(f, n) == pytest.approx(chi2_mixture_direct([p1], p0, n), rel=1e-10, abs=1e-12)


def test_mixture_pairwise_equals_product_space():
    p0 = incomplete_triangles(6, 0.4)
    alts = [incomplete_triangles(6, 0.4, j) for j in range(2)]
    for n in (1, 2, 3):
        assert chi2_mixture(alts, p0, n) == pytest.approx(chi2_mixture_direct(alts, p0, n), abs=1e-10)


@pytest.mark.parametrize("theta", [0.2, 0.5, 1.0])
def test_incomplete_triangle_family_mixture(theta):
    d, blocks = 9, 3
    p0 = incomplete_triangles(d, theta)
    alts = [incomplete_triangles(d, theta, j) for j in range(blocks)]
    e0 = exact_correlation_matrix(p0)[0, 2]
    ej = exact_correlation_matrix(alts[0])[0, 2]
    exact_factor = 1 + (ej - e0) / (e0 + 1 / math.tanh(theta))
    tanh_factor = 1 + math.tanh(theta) * (ej - e0)
    for n in (1, 2):
        direct = chi2_mixture_direct(alts, p0, n)
        formula = exact_factor ** n / blocks - 1 / blocks
        assert formula == pytest.approx(direct, abs=1e-10)
    for n in (1, 2, 5, 50, 400):
        formula = exact_factor ** n / blocks - 1 / blocks
        assert chi2_mixture(alts, p0, n) == pytest.approx(formula, rel=1e-10, abs=1e-12)
        # the tanh form is an upper bound, strictly above for theta > 0
        assert tanh_factor ** n / blocks - 1 / blocks >= formula


def test_edge_addition_examples():
    base = gc.disjoint_union(gc.path_graph(3), gc.path_graph(3))
    f = edge_addition_factor(base, (0, 2), (3, 5), 0.8)
    assert f.enumerated == pytest.approx(1.0, abs=1e-12) and f.closed_form == pytest.approx(1.0, abs=1e-15)
    one = edge_addition_factor(gc.empty_graph(2), (0, 1), (0, 1), 0.5)
    assert one.enumerated == pytest.approx(1.2135522670340725899, abs=1e-12)
    assert one.closed_form == pytest.approx(1.2135522670340725899, abs=1e-14)
    with pytest.raises(ValueError):
        edge_addition_factor(gc.path_graph(3), (0, 1), (0, 2), 0.5)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 7), st.integers(0, 10 ** 6), st.floats(0.05, 2.0), st.booleans())
def test_edge_addition_identity_and_bound(d, seed, theta, weighted):
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(d), 2))
    mask = rng.random(len(pairs)) < 0.4
    edges = [p for p, k in zip(pairs, mask) if k]
    free = [p for p, k in zip(pairs, mask) if not k]
    if len(free) < 1:
        return
    g0 = Graph(d, frozenset(edges))
    e_j = free[int(rng.integers(len(free)))]
    e_k = free[int(rng.integers(len(free)))]
    w = {e: float(rng.uniform(0.3, 1.5)) for e in edges} if weighted else None
    f = edge_addition_factor(g0, e_j, e_k, theta, w)
    assert abs(f.enumerated - f.closed_form) <= 1e-12
    assert f.enumerated <= f.bound + 1e-12


def test_edge_addition_consistency_error(monkeypatch):
    import ising_proptest.oracle as orc
    monkeypatch.setattr(orc, "second_moment", lambda a, b, c: 5.0)
    with pytest.raises(ConsistencyError):
        orc.edge_addition_factor(gc.path_graph(3), (0, 2), (0, 2), 0.5)


# ------------------------------------------------------ antiferro ratios

def test_ratio_examples():
    for s, j in [(3, 2), (5, 5), (6, 0)]:
        assert ratio(CliquePairSpec(s, j, 0.0)) == pytest.approx(1.0, abs=1e-15)
    for th in (0.0, 0.7, 5.0):
        assert ratio(CliquePairSpec(7, 0, th)) == pytest.approx(1.0, abs=1e-14)
    r = ratio(CliquePairSpec(4, 4, 20.0))
    assert r == pytest.approx(16 / 6, abs=1e-6) and r <= math.sqrt(8)
    assert ratio_limit(4, 4) == pytest.approx(16 / 6, rel=1e-15)
    assert ratio(CliquePairSpec(5, 3, 0.5)) >= 1.0


def mp_T(s, j, theta):
    # raw sum over the union, in mpmath, grouped by the three partial sums
    theta = mpmath.mpf(theta)
    tot = mpmath.mpf(0)
    for a in range(j + 1):
        for b in range(s - j + 1):
            for c in range(s - j + 1):
                i, u, u2 = j - 2 * a, s - j - 2 * b, s - j - 2 * c
                w = mpmath.binomial(j, a) * mpmath.binomial(s - j, b) * mpmath.binomial(s - j, c)
                sv, sw = u + i, u2 + i
                tot += w * mpmath.exp(-theta * ((sv ** 2 - s) + (sw ** 2 - s)) / 2)
    return tot / mpmath.mpf(2) ** (2 * s - j)


@pytest.mark.parametrize("s", [2, 3, 5, 8])
def test_antiferro_T_three_ways(s):
    for j in range(s + 1):
        for th in (0.0, 0.3, 2.0):
            spec = CliquePairSpec(s, j, th)
            assert antiferro_T(spec) == pytest.approx(float(mp_T(s, j, th)), rel=1e-12)
            if 2 * s - j <= 16:
                assert antiferro_T(spec) == pytest.approx(antiferro_T_enumerated(spec), rel=1e-12)


def test_ratio_limit_matches_high_theta():
    for s in range(2, 9):
        for j in range(s + 1):
            assert abs(ratio(CliquePairSpec(s, j, 20.0)) - ratio_limit(s, j)) <= 1e-6


def test_monotonicity_check_report():
    rep = ratio_monotonicity_check(5, 3, [0.1 * i for i in range(51)])
    assert rep.passed and rep.points == 51
    flat = ratio_monotonicity_check(4, 0, [0.0, 1.0, 2.0])
    assert flat.passed and flat.details["max_violation"] == 0.0
    with pytest.raises(ValueError):
        ratio_monotonicity_check(4, 2, [1.0, 0.5])


def test_clique_pair_spec_guard():
    with pytest.raises(ValueError):
        CliquePairSpec(14, 0, 1.0)
    with pytest.raises(ValueError):
        CliquePairSpec(4, 5, 1.0)


# -------------------------------------------------------- dominance

def test_dominance_examples():
    eq = stochastic_dominance_check(DominanceSpec(6, 2, 0.7, 0.7))
    assert eq.passed and eq.worst_margin == 0.0
    assert stochastic_dominance_check(DominanceSpec(12, 6, 2.0, 0.5)).passed
    rep = stochastic_dominance_check(DominanceSpec(4, 1, 1.0, 0.5, t_grid=(-3.0, 0.0)))
    assert rep.passed
    with pytest.raises(ValueError):
        DominanceSpec(4, 1, 0.5, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10), st.integers(0, 6), st.floats(0, 3), st.floats(0, 1))
def test_dominance_random(k, h, theta, frac):
    assert stochastic_dominance_check(DominanceSpec(k, h, theta, theta * frac)).passed


# -------------------------------------------------------- Griffiths

def test_griffiths_examples():
    tri = gc.cycle_graph(3)
    before = exact_correlation_matrix(IsingModel.simple(tri, 0.5))[0, 2]
    after = exact_correlation_matrix(IsingModel.simple(tri.remove_edge(0, 2), 0.5))[0, 2]
    assert before == pytest.approx(0.61497945897012514659, abs=1e-14)
    assert after == pytest.approx(0.21355226703407258985, abs=1e-14)
    g = gc.disjoint_union(gc.cycle_graph(3), gc.path_graph(3))
    a = exact_correlation_matrix(IsingModel.simple(g, 0.5))
    b = exact_correlation_matrix(IsingModel.simple(g.remove_edge(3, 4), 0.5))
    assert np.allclose(a[:3, :3], b[:3, :3], rtol=0, atol=1e-14)
    assert griffiths_edge_prune_check(g, 0.5, trials=3).passed


def test_griffiths_guard():
    with pytest.raises(ValueError):
        griffiths_edge_prune_check(gc.path_graph(9), 0.5)


# ------------------------------------------------------------ suites

@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_pass(name):
    ok, margin = run_suite(name)
    assert ok and margin >= 0


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
