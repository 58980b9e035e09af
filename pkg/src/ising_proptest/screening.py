"""Correlation screening tests for ferromagnets.

Each test builds the empirical correlation matrix M, finds a witness
subgraph whose smallest M entry is as large as possible, and rejects when
that smallest entry exceeds a lower bound on the correlations forced by the
alternative, minus the uniform deviation radius tau.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph_core import (Edge, first_cycle_by_weight, first_m_clique_by_weight,
                    max_weight_spanning_forest)
from .ising_core import SampleBatch, curie_weiss_edge_correlation, empirical_correlations


def tau(n: int, d: int, delta: float) -> float:
    if n < 1 or d < 2 or not 0 < delta <= 1:
        raise ValueError("need n >= 1, d >= 2 and delta in (0, 1]")
    return math.sqrt((4 * math.log(d) + math.log(1 / delta)) / n)


def universal_T_lower(theta: float) -> float:
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return math.tanh(theta)


def R_ratio(s: int, Theta: float) -> float:
    a = 2 * s * math.exp(-2 * (s - 1) * Theta)
    return (math.cosh(2 * s * Theta) + a * math.cosh(2 * (s - 1) * Theta)) / (a * math.cosh(2 * Theta) + 1)


def Q_upper_lowtemp(s: int, Theta: float) -> float:
    """Upper bound on the correlation between non-adjacent vertices of a
    ferromagnet with maximum degree s and couplings at most Theta."""
    if s < 1:
        raise ValueError("s must be at least 1")
    if s == 1:
        return 0.0
    if s == 2:
        c = math.cosh(4 * Theta)
        return (c - 1) / (c + 3)
    r = R_ratio(s, Theta)
    return (r - 1) / (r + 1)


def Q_upper_hightemp(s: int, Theta: float) -> float:
    t = math.tanh(Theta)
    if not (s - 1) * t < 1:
        raise ValueError("high-temperature condition fails: (s-1) tanh(Theta) >= 1")
    return s * t * t / (1 - (s - 1) * t)


def clique_T(m: int, theta: float) -> float:
    """Smallest edge correlation forced by an m-clique of couplings >= theta."""
    return curie_weiss_edge_correlation(m, theta)


@dataclass
class TestReport:
    psi: int
    threshold_used: float
    witness: list
    min_witness_correlation: float
    tau: float
    conditions: dict = field(default_factory=dict)

    def as_text(self) -> str:
        rows = [f"psi={self.psi}",
                f"threshold_used={self.threshold_used:.17g}",
                f"tau={self.tau:.17g}",
                f"min_witness_correlation={self.min_witness_correlation:.17g}",
                "witness=" + ";".join(f"{u + 1}-{v + 1}" for u, v in self.witness)]
        rows += [f"{k}={v}" for k, v in self.conditions.items()]
        return "\n".join(rows) + "\n"


def data_dims(data) -> tuple[int, int]:
    if isinstance(data, tuple):        # (M, n) pre-computed
        m, n = data
        return n, np.asarray(m).shape[0]
    return data.n, data.d


def data_matrix(data) -> np.ndarray:
    if isinstance(data, tuple):
        return np.asarray(data[0], dtype=float)
    return empirical_correlations(data)


def correlation_screening_test(data, delta: float,
                               witness_finder: Callable[[np.ndarray], list[Edge]],
                               underline_T: float) -> TestReport:
    """Reject iff min_{e in witness} M_e > underline_T - tau (strict)."""
    if not 0 < underline_T <= 1:
        raise ValueError("underline_T must lie in (0, 1]")
    n, d = data_dims(data)
    m = data_matrix(data)
    witness = witness_finder(m)
    low = min(m[u, v] for u, v in witness)
    t = tau(n, d, delta)
    psi = int(low > underline_T - t)
    return TestReport(psi, underline_T, list(witness), float(low), t)


def mst_witness(m: np.ndarray) -> list[Edge]:
    return max_weight_spanning_forest(m, skip_zero=False).sorted_edges()


def cycle_witness(m: np.ndarray) -> list[Edge]:
    return first_cycle_by_weight(m)


def clique_witness(size: int):
    def find(m: np.ndarray) -> list[Edge]:
        vs = first_m_clique_by_weight(m, size)
        return [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]
    return find


def connectivity_condition(theta: float, tau_value: float) -> bool:
    return math.tanh(theta) > 2 * tau_value


def cycle_condition(theta: float, Theta: float, tau_value: float) -> bool:
    return math.tanh(theta) - math.tanh(Theta) ** 2 > 2 * tau_value


def clique_condition(theta: float, m: int, s: int, Theta: float, tau_value: float) -> bool:
    """Either no-edge bound leaves a gap of 2 tau below the clique threshold."""
    gap = clique_T(m, theta) - 2 * tau_value
    if Q_upper_lowtemp(s, Theta) <= gap:
        return True
    try:
        return Q_upper_hightemp(s, Theta) <= gap
    except ValueError:
        return False


def connectivity_test(data, theta: float, delta: float) -> TestReport:
    if theta <= 0:
        raise ValueError("theta must be positive")
    rep = correlation_screening_test(data, delta, mst_witness, math.tanh(theta))
    rep.conditions["sufficient_condition"] = connectivity_condition(theta, rep.tau)
    return rep


def cycle_test(data, theta: float, Theta: float, delta: float) -> TestReport:
    if theta <= 0:
        raise ValueError("theta must be positive")
    if Theta < theta:
        raise ValueError("Theta must be at least theta")
    n, d = data_dims(data)
    if d < 3:
        raise ValueError("cycle test needs d >= 3")
    rep = correlation_screening_test(data, delta, cycle_witness, math.tanh(theta))
    rep.conditions["sufficient_condition"] = cycle_condition(theta, Theta, rep.tau)
    return rep


def clique_size_test(data, theta: float, m: int, delta: float,
                     s: int | None = None, Theta: float | None = None) -> TestReport:
    """Reject when some m-clique of M has all entries above the Curie-Weiss
    edge correlation minus tau. With s and Theta given, the report also
    says whether either no-edge bound leaves a 2 tau gap."""
    if m < 3:
        raise ValueError("clique size must be at least 3 (m = 2 is a single edge)")
    if theta <= 0:
        raise ValueError("theta must be positive")
    rep = correlation_screening_test(data, delta, clique_witness(m), clique_T(m, theta))
    if s is not None and Theta is not None:
        rep.conditions["sufficient_condition"] = clique_condition(theta, m, s, Theta, rep.tau)
    return rep


def perfect_alignment_test(batch: SampleBatch) -> int:
    """1 iff every sample has all spins equal."""
    x = batch.spins
    return int(np.all(np.all(x == x[:, :1], axis=1)))
