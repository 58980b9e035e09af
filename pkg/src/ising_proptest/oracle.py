"""Brute-force certification: exact chi-square divergences between Ising
measures, standardized partition ratios of two overlapping antiferromagnetic
cliques, a stochastic-dominance check, and edge-deletion monotonicity."""
from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import comb, gammaln

from .graph_core import Edge, Graph, WeightedGraph
from .ising_core import (ConsistencyError, IsingModel, exact_correlation_matrix, index_to_spins,
                    make_rng, state_probabilities)


# ------------------------------------------------------------ chi-square

def _log_probs(model: IsingModel) -> np.ndarray:
    return np.log(state_probabilities(model))


def chi2_exact(p_model: IsingModel, q_model: IsingModel) -> float:
    """E_Q (dP/dQ - 1)^2 = sum_x p(x)^2 / q(x) - 1, summed over all states."""
    if p_model.d != q_model.d:
        raise ValueError("state spaces differ")
    lp, lq = _log_probs(p_model), _log_probs(q_model)
    return math.fsum(np.exp(2 * lp - lq)) - 1.0


def chi2_product(factor: float, n: int) -> float:
    """Divergence of n-fold products when the single-copy second moment
    E_Q (dP/dQ)^2 equals factor."""
    return factor ** n - 1.0


def second_moment(p_j: IsingModel, p_k: IsingModel, p_0: IsingModel) -> float:
    """E_0 (P_j/P_0)(P_k/P_0) by enumeration."""
    lj, lk, l0 = _log_probs(p_j), _log_probs(p_k), _log_probs(p_0)
    return math.fsum(np.exp(lj + lk - l0))


def chi2_mixture(alternatives: list[IsingModel], null: IsingModel, n: int) -> float:
    """Divergence between the uniform mixture of the n-fold alternatives and
    the n-fold null: (1/M^2) sum_{j,k} [E_0 (P_j/P_0)(P_k/P_0)]^n - 1."""
    m = len(alternatives)
    terms = [second_moment(a, b, null) ** n for a in alternatives for b in alternatives]
    return math.fsum(terms) / m ** 2 - 1.0


def chi2_mixture_direct(alternatives: list[IsingModel], null: IsingModel, n: int) -> float:
    """Same divergence by enumerating the product space of n samples
    (2^(d n) states; small d n only)."""
    d = null.d
    if d * n > 20:
        raise ValueError("product-space enumeration limited to d * n <= 20")
    p0 = state_probabilities(null)
    pj = [state_probabilities(a) for a in alternatives]

    def product(p):
        out = p
        for _ in range(n - 1):
            out = np.multiply.outer(out, p)
        return out.ravel()

    q = product(p0)
    mix = sum(product(p) for p in pj) / len(pj)
    return math.fsum(mix * mix / q) - 1.0


@dataclass
class EdgeAdditionFactor:
    enumerated: float
    closed_form: float
    bound: float


def _add_edge(model: IsingModel, e: Edge) -> IsingModel:
    w = dict(model.wg.weights)
    w[tuple(sorted(e))] = 1.0
    return IsingModel(model.theta, WeightedGraph.from_dict(model.d, w))


def edge_addition_factor(g0: Graph, e_j: Edge, e_k: Edge, theta: float,
                         weights: dict | None = None) -> EdgeAdditionFactor:
    """E_0 (P_j/P_0)(P_k/P_0) where P_j adds edge e_j (coupling theta) to g0.

    Returns the enumerated value, the exact identity
    1 + (E_j a - E_0 a) / (E_0 a + coth theta) with a = X_{u_k} X_{v_k},
    and the upper bound 1 + tanh(theta) (E_j a - E_0 a)."""
    for e in (e_j, e_k):
        if e in g0:
            raise ValueError(f"edge {e} already in the base graph")
    if g0.d > 20:
        raise ValueError("enumeration refused: d > 20")
    wg = WeightedGraph(g0, weights) if weights is not None else WeightedGraph.uniform(g0)
    p0 = IsingModel(theta, wg)
    pj, pk = _add_edge(p0, e_j), _add_edge(p0, e_k)
    enum = second_moment(pj, pk, p0)
    if theta == 0:
        return EdgeAdditionFactor(enum, 1.0, 1.0)
    u, v = e_k
    e0 = exact_correlation_matrix(p0)[u, v]
    ej = exact_correlation_matrix(pj)[u, v]
    closed = 1 + (ej - e0) / (e0 + 1 / math.tanh(theta))
    if abs(closed - enum) > 1e-12:
        raise ConsistencyError(f"edge addition factor: enumeration {enum!r} vs identity {closed!r}")
    return EdgeAdditionFactor(enum, closed, 1 + math.tanh(theta) * (ej - e0))


# --------------------------------------- antiferromagnetic clique pairs

@dataclass(frozen=True)
class CliquePairSpec:
    s: int
    overlap: int
    theta: float

    def __post_init__(self):
        if not 0 <= self.overlap <= self.s:
            raise ValueError("overlap must lie in [0, s]")
        if 2 * self.s - self.overlap > 26:
            raise ValueError("union of the two cliques exceeds 26 vertices")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")


def _lse(logs) -> float:
    # log-sum-exp with compensated accumulation of the scaled terms
    logs = list(logs)
    top = max(logs)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


def _log_binom_half(k: int, total: int) -> float:
    # log P(sum of k Rademachers = total)
    j = (total + k) // 2
    return float(gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1)) - k * math.log(2)


def antiferro_log_T(spec: CliquePairSpec) -> float:
    """log of Z / 2^(2s - |overlap|) for two antiferromagnetic s-cliques
    (coupling -theta) sharing `overlap` vertices, summed over the shared
    sum I and the two private sums U, U'."""
    s, j, th = spec.s, spec.overlap, spec.theta
    outer = []
    for i in range(-j, j + 1, 2):
        inner = _lse(_log_binom_half(s - j, u) - th * (u + i) ** 2 / 2
                     for u in range(-(s - j), s - j + 1, 2))
        outer.append(_log_binom_half(j, i) + 2 * inner)
    return s * th + _lse(outer)


def antiferro_T(spec: CliquePairSpec) -> float:
    return math.exp(antiferro_log_T(spec))


def antiferro_T_enumerated(spec: CliquePairSpec) -> float:
    """Same quantity by summing over all 2^(2s - overlap) spin states."""
    s, j = spec.s, spec.overlap
    union = 2 * s - j
    if union > 16:
        raise ValueError("raw enumeration limited to 16 vertices")
    x = index_to_spins(np.arange(1 << union), union).astype(float)
    sv = x[:, :s].sum(1)                       # V = first s vertices
    sw = x[:, s - j:].sum(1)                   # V' = last s vertices
    pairs = (sv ** 2 - s) / 2 + (sw ** 2 - s) / 2
    lw = -spec.theta * pairs
    return math.exp(_lse(lw.tolist()) - union * math.log(2))


def ratio(spec: CliquePairSpec) -> float:
    base = CliquePairSpec(spec.s, 0, spec.theta)
    return math.exp(antiferro_log_T(spec) - antiferro_log_T(base))


def ratio_limit(s: int, overlap: int) -> float:
    """theta -> infinity limit of ratio, from the minimal-energy terms."""
    j = overlap
    if s % 2 == 0:
        tot = sum(comb(j, i, exact=True) * comb(s - j, s // 2 - i, exact=True) ** 2
                  for i in range(j + 1))
        return 2 ** j * tot / comb(s, s // 2, exact=True) ** 2
    tot = sum(comb(j, i, exact=True)
              * (comb(s - j, (s - 1) // 2 - i, exact=True) + comb(s - j, (s + 1) // 2 - i, exact=True)) ** 2
              for i in range(j + 1))
    return 2 ** j * tot / (4 * comb(s, (s - 1) // 2, exact=True) ** 2)


@dataclass
class CheckReport:
    passed: bool
    worst_margin: float
    points: int = 0
    details: dict = field(default_factory=dict)


def ratio_monotonicity_check(s: int, overlap: int, theta_grid, tol: float = 1e-10) -> CheckReport:
    grid = list(theta_grid)
    if grid != sorted(grid):
        raise ValueError("theta grid must be ascending")
    vals = [ratio(CliquePairSpec(s, overlap, t)) for t in grid]
    drops = [vals[i] - vals[i + 1] for i in range(len(vals) - 1)]
    worst = max(drops, default=-math.inf)
    return CheckReport(worst <= tol, tol - worst, len(grid), {"max_violation": max(worst, 0.0)})


@dataclass(frozen=True)
class DominanceSpec:
    k: int
    h: int
    theta: float
    theta_prime: float
    t_grid: tuple = ()

    def __post_init__(self):
        if self.h < 0 or self.k < 0:
            raise ValueError("k and h must be nonnegative")
        if not self.theta >= self.theta_prime >= 0:
            raise ValueError("need theta >= theta' >= 0")


def stochastic_dominance_check(spec: DominanceSpec) -> CheckReport:
    """P(th (S_Y+h+2)^2 + th' (S_X+h)^2 < t) <= P(th' (S_Y+h+2)^2 + th (S_X+h)^2 < t)
    for S_X, S_Y independent sums of k Rademachers, at every breakpoint and
    midpoint of both laws plus the user grid. Exact rational arithmetic on
    the binary values of theta and theta'."""
    k, h = spec.k, spec.h
    if k > 40:
        raise ValueError("k limited to 40")
    th, tp = Fraction(spec.theta), Fraction(spec.theta_prime)
    support = [(v, Fraction(comb(k, (v + k) // 2, exact=True), 2 ** k)) for v in range(-k, k + 1, 2)]
    left, right = {}, {}
    for sy, py in support:
        for sx, px in support:
            a, b = (sy + h + 2) ** 2, (sx + h) ** 2
            p = py * px
            lv, rv = th * a + tp * b, tp * a + th * b
            left[lv] = left.get(lv, 0) + p
            right[rv] = right.get(rv, 0) + p

    def cdf(law):
        keys = sorted(law)
        acc, run = [], Fraction(0)
        for x in keys:
            run += law[x]
            acc.append(run)
        return keys, acc

    lk, lc = cdf(left)
    rk, rc = cdf(right)

    def below(keys, acc, t):           # P(value < t)
        i = bisect_left(keys, t)
        return acc[i - 1] if i > 0 else Fraction(0)

    pts = sorted(set(lk) | set(rk))
    ts = set(pts) | {(a + b) / 2 for a, b in zip(pts, pts[1:])}
    ts |= {pts[-1] + 1, Fraction(0), Fraction(-1)}
    ts |= {Fraction(t) for t in spec.t_grid}
    worst = None
    for t in ts:
        margin = below(rk, rc, t) - below(lk, lc, t)
        if worst is None or margin < worst:
            worst = margin
    return CheckReport(worst >= 0, float(worst), len(ts))


# ---------------------------------------------------------- Griffiths

def griffiths_edge_prune_check(g: Graph, theta: float, trials: int = 1, seed: int = 0,
                               tol: float = 1e-12) -> CheckReport:
    """For the uniform weights and `trials - 1` random ferromagnetic weight
    draws on g, delete each edge in turn and compare every exact pair
    correlation before and after. Reports the largest increase."""
    if g.d > 8:
        raise ValueError("limited to d <= 8")
    rng = make_rng(seed, 0)
    edges = g.sorted_edges()
    worst, count = -math.inf, 0
    for trial in range(max(trials, 1)):
        if trial == 0:
            w = {e: 1.0 for e in edges}
        else:
            w = {e: float(x) for e, x in zip(edges, rng.uniform(0.2, 1.5, len(edges)))}
        model = IsingModel(theta, WeightedGraph(g, w))
        before = exact_correlation_matrix(model)
        for e in edges:
            w2 = {f: x for f, x in w.items() if f != e}
            after = exact_correlation_matrix(IsingModel(theta, WeightedGraph(g.remove_edge(*e), w2)))
            worst = max(worst, float(np.max(after - before)))
            count += 1
    return CheckReport(worst <= tol, tol - worst, count, {"max_increase": worst})


# ------------------------------------------------------------- suites

def _suite_exactness():
    from .ising_core import exact_pair_correlation, path_correlation_formula
    from .graph_core import path_graph
    worst = 0.0
    for th in np.round(np.arange(0, 3.01, 0.1), 10):
        m = IsingModel.simple(Graph(2, frozenset({(0, 1)})), th)
        worst = max(worst, abs(exact_pair_correlation(m, 0, 1) - math.tanh(th)))
    rng = make_rng(1, 0)
    for d in range(2, 9):
        w = rng.uniform(-1.5, 1.5, d - 1)
        m = IsingModel(0.7, WeightedGraph.from_dict(d, {(i, i + 1): w[i] for i in range(d - 1)}))
        c = exact_correlation_matrix(m)
        worst = max(worst, abs(c[0, d - 1] - path_correlation_formula(0.7, w)))
    return worst <= 1e-12, 1e-12 - worst


def _suite_curie_weiss():
    from .ising_core import (_cw_by_magnetization, curie_weiss_edge_correlation_quadrature,
                        exact_pair_correlation)
    from .graph_core import clique_graph
    worst_q, worst_e = 0.0, 0.0
    for mm in range(3, 13):
        for th in np.linspace(0, 2, 11):
            a = _cw_by_magnetization(mm, th)
            worst_q = max(worst_q, abs(a - curie_weiss_edge_correlation_quadrature(mm, th)))
            if mm <= 10:
                e = exact_pair_correlation(IsingModel.simple(clique_graph(range(mm)), th), 0, 1)
                worst_e = max(worst_e, abs(a - e))
    return worst_q <= 1e-8 and worst_e <= 1e-10, min(1e-8 - worst_q, 1e-10 - worst_e)


def _suite_griffiths():
    rng = make_rng(2, 0)
    worst = math.inf
    ok = True
    for i in range(20):
        d = int(rng.integers(3, 7))
        pairs = list(itertools.combinations(range(d), 2))
        keep = rng.random(len(pairs)) < 0.5
        g = Graph(d, frozenset(p for p, k in zip(pairs, keep) if k))
        rep = griffiths_edge_prune_check(g, float(rng.uniform(0.1, 1.5)), trials=2, seed=i)
        ok &= rep.passed
        worst = min(worst, rep.worst_margin)
    return ok, worst


def _suite_antiferro():
    worst = math.inf
    ok = True
    for s in range(2, 9):
        for j in range(s + 1):
            rep = ratio_monotonicity_check(s, j, [round(0.1 * i, 10) for i in range(51)])
            lim = abs(ratio(CliquePairSpec(s, j, 20.0)) - ratio_limit(s, j))
            cap = math.sqrt(2 * s) - ratio(CliquePairSpec(s, j, 20.0))
            ok &= rep.passed and lim <= 1e-6 and cap >= 0
            worst = min(worst, rep.worst_margin, 1e-6 - lim, cap)
    for th, tp in [(2, 0.5), (1, 0.9), (0.3, 0.3)]:
        rep = stochastic_dominance_check(DominanceSpec(8, 3, th, tp))
        ok &= rep.passed
        worst = min(worst, rep.worst_margin)
    return ok, worst


def _suite_chi2():
    g0 = Graph(4, frozenset({(0, 1), (1, 2)}))
    worst = 0.0
    for e_j, e_k in [((0, 2), (0, 2)), ((0, 2), (2, 3)), ((0, 3), (2, 3))]:
        f = edge_addition_factor(g0, e_j, e_k, 0.6)
        worst = max(worst, abs(f.enumerated - f.closed_form), f.enumerated - f.bound)
    return worst <= 1e-12, 1e-12 - worst


SUITES = {
    "exactness": _suite_exactness,
    "curie-weiss": _suite_curie_weiss,
    "griffiths": _suite_griffiths,
    "antiferro": _suite_antiferro,
    "chi2": _suite_chi2,
}


def run_suite(name: str) -> tuple[bool, float]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    ok, margin = SUITES[name]()
    return bool(ok), float(margin)
