"""Zero-field Ising models: exact inference by enumeration, samplers and
closed-form correlations.

P(x) is proportional to exp(theta * sum_{(u,v) in E} w_uv x_u x_v), x in {-1,+1}^d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import gammaln, logsumexp

from .graph_core import Graph, WeightedGraph, is_forest, forest_path

ENUM_GUARD = 25
SAMPLE_GUARD = 20
GH_NODES = 64
# beyond this clique size the Gaussian quadrature no longer resolves the
# integrand, so the magnetization sum is used alone
GH_CHECK_MAX_M = 30
_CHUNK = 1 << 16


class ConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class IsingModel:
    theta: float
    wg: WeightedGraph

    def __post_init__(self):
        if not self.theta >= 0:
            raise ValueError("theta must be nonnegative")
        object.__setattr__(self, "theta", float(self.theta))

    @classmethod
    def simple(cls, g: Graph, theta: float) -> "IsingModel":
        return cls(theta, WeightedGraph.uniform(g))

    @property
    def d(self) -> int:
        return self.wg.d

    @property
    def graph(self) -> Graph:
        return self.wg.graph

    def family(self) -> str:
        w = self.wg.weights.values()
        if all(x == 1.0 for x in w):
            return "simple-ferro"
        if all(x > 0 for x in w):
            return "ferro"
        return "general"

    def in_general_class(self, Theta: float) -> bool:
        """Every coupling magnitude theta*|w| lies in [theta, Theta]."""
        return all(1.0 <= abs(x) <= Theta / self.theta * (1 + 1e-12)
                   for x in self.wg.weights.values())

    def edge_arrays(self):
        es = self.wg.graph.sorted_edges()
        us = np.array([u for u, _ in es], dtype=int)
        vs = np.array([v for _, v in es], dtype=int)
        w = np.array([self.wg.weights[e] for e in es], dtype=float)
        return us, vs, w


@dataclass(frozen=True)
class SampleBatch:
    spins: np.ndarray
    seed: int = 0
    sampler_tag: str = "exact"

    def __post_init__(self):
        x = np.asarray(self.spins, dtype=np.int8)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValueError("spins must be an n x d matrix with n >= 1")
        if not np.all(np.abs(x) == 1):
            raise ValueError("spins must be +1 or -1")
        x.setflags(write=False)
        object.__setattr__(self, "spins", x)

    @property
    def n(self) -> int:
        return self.spins.shape[0]

    @property
    def d(self) -> int:
        return self.spins.shape[1]


@dataclass(frozen=True)
class StateCounts:
    """n i.i.d. draws stored as counts over the 2^d enumerated states.

    The empirical correlation matrix depends on the data only through these
    counts, so this is an exact, compact stand-in for a SampleBatch."""
    d: int
    counts: np.ndarray
    seed: int = 0
    sampler_tag: str = "exact"

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def to_batch(self) -> SampleBatch:
        idx = np.repeat(np.arange(self.counts.size), self.counts)
        return SampleBatch(index_to_spins(idx, self.d), self.seed, self.sampler_tag)


# ------------------------------------------------------------ enumeration

def index_to_spins(idx: np.ndarray, d: int) -> np.ndarray:
    """State index -> spin rows; bit j set means x_j = -1."""
    bits = (np.asarray(idx)[:, None] >> np.arange(d)) & 1
    return (1 - 2 * bits).astype(np.int8)


def log_weight(model: IsingModel, x) -> float:
    x = np.asarray(x)
    if x.shape != (model.d,):
        raise ValueError(f"expected {model.d} spins, got shape {x.shape}")
    us, vs, w = model.edge_arrays()
    return float(model.theta * np.sum(w * x[us] * x[vs]))


def _half_chunks(d: int):
    # states with x_{d-1} = +1; the other half are their global flips
    half = 1 << (d - 1)
    for start in range(0, half, _CHUNK):
        yield index_to_spins(np.arange(start, min(half, start + _CHUNK)), d)


def _log_weights(model: IsingModel, x: np.ndarray) -> np.ndarray:
    us, vs, w = model.edge_arrays()
    if us.size == 0:
        return np.zeros(x.shape[0])
    xf = x.astype(float)
    return model.theta * ((xf[:, us] * xf[:, vs]) @ w)


def _guard(d: int, limit: int):
    if d > limit:
        raise ValueError(f"enumeration refused: d={d} exceeds the guard {limit}")


def partition_function(model: IsingModel) -> float:
    """log Z by log-sum-exp over all 2^d states."""
    _guard(model.d, ENUM_GUARD)
    parts = [logsumexp(_log_weights(model, x)) for x in _half_chunks(model.d)]
    return math.log(2.0) + float(logsumexp(parts))


def exact_correlation_matrix(model: IsingModel) -> np.ndarray:
    _guard(model.d, ENUM_GUARD)
    log_z = partition_function(model)
    acc = np.zeros((model.d, model.d))
    for x in _half_chunks(model.d):
        p = np.exp(_log_weights(model, x) - log_z)
        xf = x.astype(float)
        # a state and its flip contribute identically to x_u x_v
        acc += 2.0 * (xf * p[:, None]).T @ xf
    acc = (acc + acc.T) / 2
    np.fill_diagonal(acc, 1.0)
    return np.clip(acc, -1.0, 1.0)


def exact_pair_correlation(model: IsingModel, u: int, v: int) -> float:
    _guard(model.d, ENUM_GUARD)
    if u == v:
        return 1.0
    log_z = partition_function(model)
    total = 0.0
    for x in _half_chunks(model.d):
        p = np.exp(_log_weights(model, x) - log_z)
        total += 2.0 * float(np.sum(p * x[:, u] * x[:, v]))
    return min(1.0, max(-1.0, total))


def exact_single_spin_means(model: IsingModel) -> np.ndarray:
    """Means over the full state space, pairing each state with its flip."""
    _guard(model.d, ENUM_GUARD)
    log_z = partition_function(model)
    acc = np.zeros(model.d)
    for x in _half_chunks(model.d):
        p = np.exp(_log_weights(model, x) - log_z)
        s = (x.astype(float) * p[:, None]).sum(0)
        acc += s + (-s)
    return acc


def state_probabilities(model: IsingModel) -> np.ndarray:
    """Probabilities of all 2^d states in index order."""
    _guard(model.d, SAMPLE_GUARD)
    x = index_to_spins(np.arange(1 << model.d), model.d)
    lw = _log_weights(model, x)
    p = np.exp(lw - logsumexp(lw))
    return p / p.sum()


# --------------------------------------------------------- closed forms

def path_correlation_formula(theta: float, weights) -> float:
    w = np.asarray(list(weights), dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    return float(np.prod(np.tanh(theta * w)))


def forest_correlations(model: IsingModel) -> np.ndarray:
    """Pair correlations of a forest model: product of tanh(theta w) along
    the unique path, 0 across trees."""
    g = model.graph
    if not is_forest(g):
        raise ValueError("model graph has a cycle")
    d = g.d
    m = np.eye(d)
    for u in range(d):
        for v in range(u + 1, d):
            path = forest_path(g, u, v)
            if path is None:
                continue
            val = path_correlation_formula(model.theta, [model.wg.weights[e] for e in path])
            m[u, v] = m[v, u] = val
    return m


def curie_weiss_log_partition(m: int, theta: float) -> float:
    """log of sum_k C(m,k) exp(theta((m-2k)^2 - m)/2)."""
    k = np.arange(m + 1)
    logc = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
    return float(logsumexp(logc + theta * ((m - 2 * k) ** 2 - m) / 2))


def _cw_by_magnetization(m: int, theta: float) -> float:
    k = np.arange(m + 1)
    logc = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
    pairs = ((m - 2 * k) ** 2 - m) / 2.0      # sum of x_u x_v over the clique
    lw = logc + theta * pairs
    p = np.exp(lw - logsumexp(lw))
    # C(m,2) - pairs = 2k(m-k): written as a deficit from 1 so that values
    # near 1 keep their relative precision
    return float(1.0 - np.sum(p * (4.0 * k * (m - k))) / (m * (m - 1)))


def curie_weiss_log_r(m: int, theta: float, nodes: int = GH_NODES) -> float:
    """log of e^{2 theta} E cosh^{m-2}(sqrt(theta) Z + 2 theta) / E cosh^{m-2}(sqrt(theta) Z)
    by Gauss-Hermite quadrature, Z standard normal."""
    z, wts = hermegauss(nodes)
    logw = np.log(wts)

    def log_lcosh(a):
        return np.logaddexp(a, -a) - math.log(2.0)

    a = math.sqrt(theta) * z
    num = logsumexp(logw + (m - 2) * log_lcosh(a + 2 * theta))
    den = logsumexp(logw + (m - 2) * log_lcosh(a))
    return float(2 * theta + num - den)


def curie_weiss_edge_correlation(m: int, theta: float, check: bool = True) -> float:
    """Edge correlation of the uniform-theta ferromagnet on an m-clique.

    The magnetization sum is the returned value. For m <= GH_CHECK_MAX_M it
    is cross-checked against (r - 1)/(r + 1) from the quadrature formula."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if m == 2:
        return math.tanh(theta)
    value = _cw_by_magnetization(m, theta)
    if check and m <= GH_CHECK_MAX_M:
        alt = curie_weiss_edge_correlation_quadrature(m, theta)
        if abs(alt - value) > 1e-8:
            raise ConsistencyError(
                f"m={m} theta={theta}: magnetization sum {value!r} vs quadrature {alt!r}")
    return value


def curie_weiss_edge_correlation_quadrature(m: int, theta: float, nodes: int = GH_NODES) -> float:
    # (r - 1)/(r + 1) = tanh(log(r)/2)
    return math.tanh(curie_weiss_log_r(m, theta, nodes) / 2)


# ---------------------------------------------------------------- samplers

def make_rng(seed: int, *stream) -> np.random.Generator:
    """Generator for the stream obtained by hashing (seed, *stream)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def exact_counts(model: IsingModel, n: int, seed: int, stream: tuple = ()) -> StateCounts:
    if n < 1:
        raise ValueError("n must be positive")
    p = state_probabilities(model)
    counts = make_rng(seed, *stream).multinomial(n, p)
    return StateCounts(model.d, counts, seed, "exact")


def exact_sample(model: IsingModel, n: int, seed: int, stream: tuple = ()) -> SampleBatch:
    """n i.i.d. exact draws by inverse CDF over the enumerated states."""
    if n < 1:
        raise ValueError("n must be positive")
    p = state_probabilities(model)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    u = make_rng(seed, *stream).random(n)
    idx = np.searchsorted(cdf, u, side="right")
    return SampleBatch(index_to_spins(idx, model.d), seed, "exact")


def gibbs_sample(model: IsingModel, n: int, seed: int, burn_in: int | None = None,
                 thin: int = 10, independent_chains: bool = False,
                 stream: tuple = ()) -> SampleBatch:
    """Systematic-scan single-site Gibbs sampling.

    Long-chain mode keeps one sample every `thin` sweeps after `burn_in`
    sweeps. With independent_chains=True, n chains run side by side from
    independent uniform starts and each contributes its state after
    burn_in + thin sweeps.
    """
    if n < 1:
        raise ValueError("n must be positive")
    d = model.d
    if burn_in is None:
        burn_in = 100 * d
    if burn_in < 0 or thin < 0:
        raise ValueError("burn_in and thin must be nonnegative")
    rng = make_rng(seed, *stream)
    coupling = 2.0 * model.theta * model.wg.weight_matrix()
    if independent_chains:
        x = rng.choice(np.array([-1.0, 1.0]), size=(n, d))
        for _ in range(burn_in + max(thin, 1)):
            u = rng.random((n, d))
            for i in range(d):
                field_i = x @ coupling[i]
                x[:, i] = np.where(2 * u[:, i] < 1 + np.tanh(field_i / 2), 1.0, -1.0)
        return SampleBatch(x.astype(np.int8), seed, "gibbs")
    x = rng.choice(np.array([-1.0, 1.0]), size=d)
    out = np.empty((n, d), dtype=np.int8)
    step = max(thin, 1)
    rows = [coupling[i] for i in range(d)]
    for sweep in range(burn_in + n * step):
        u = rng.random(d)
        for i in range(d):
            h = float(rows[i] @ x)
            x[i] = 1.0 if 2 * u[i] < 1 + math.tanh(h / 2) else -1.0
        k = sweep - burn_in
        if k >= 0 and (k + 1) % step == 0:
            out[k // step] = x
    return SampleBatch(out, seed, "gibbs")


# -------------------------------------------------------- empirical side

def empirical_correlations(data) -> np.ndarray:
    """M_uv = (1/n) sum_i x_u x_v with unit diagonal. Accepts a SampleBatch,
    StateCounts or a raw spin matrix."""
    if isinstance(data, StateCounts):
        nz = np.nonzero(data.counts)[0]
        x = index_to_spins(nz, data.d).astype(float)
        m = (x * data.counts[nz, None]).T @ x / data.n
    else:
        x = data.spins if isinstance(data, SampleBatch) else np.asarray(data)
        x = x.astype(float)
        m = x.T @ x / x.shape[0]
    np.fill_diagonal(m, 1.0)
    return m


def format_batch(batch: SampleBatch) -> str:
    head = f"n={batch.n} d={batch.d} seed={batch.seed} sampler={batch.sampler_tag}"
    body = "\n".join(" ".join("+1" if s > 0 else "-1" for s in row) for row in batch.spins)
    return head + "\n" + body + "\n"


def parse_batch(text: str) -> SampleBatch:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = dict(tok.split("=", 1) for tok in lines[0].split())
    n, d = int(head["n"]), int(head["d"])
    spins = np.array([[int(t) for t in ln.split()] for ln in lines[1:]], dtype=np.int8)
    if spins.shape != (n, d):
        raise ValueError(f"header says {n}x{d}, body is {spins.shape}")
    return SampleBatch(spins, int(head.get("seed", 0)), head.get("sampler", "exact"))


def read_batch(path) -> SampleBatch:
    with open(path) as fh:
        return parse_batch(fh.read())


def write_batch(batch: SampleBatch, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_batch(batch))
