"""Closed-form necessary and sufficient signal-strength conditions, and two
computable correlation bounds (Dobrushin series, self-avoiding walks).

Natural logarithms throughout. Every asymptotic statement is materialized
with an explicit slack constant kappa (default 2) so a verdict is always a
plain numeric comparison.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

from .graph_core import Edge, Graph, max_degree

NA = float("nan")


@dataclass
class RegimeVerdict:
    bound_name: str
    condition_holds: bool
    lhs: float
    rhs: float
    note: str = ""
    details: dict = field(default_factory=dict)

    def csv_row(self) -> str:
        return f"{self.bound_name},{self.lhs:.17g},{self.rhs:.17g},{str(self.condition_holds).lower()}"


@dataclass
class BoundValue:
    value: float
    condition_holds: bool


def _atanh_checked(x: float) -> float:
    if x >= 1:
        raise ValueError("argument of atanh must be below 1 (log-ratio exceeds n)")
    return math.atanh(x)


# --------------------------------------------------------- lower bounds

def packing_radius(card: int, c: float = math.exp(-2), eps: float = 0.5) -> float:
    return (1 / -math.log(c) + eps) * math.log(math.log(card))


def generic_lb_theta(packing_log: float, n: int, maxdeg_G0: int,
                     c: float = math.exp(-2), eps: float = 0.5) -> float:
    """Below this theta no test beats random guessing asymptotically, given
    the log size of a packing of the divider set."""
    if packing_log < 0 or not 0 < c < 1 or not 0 < eps < 1 or n < 1:
        raise ValueError("need packing_log >= 0, n >= 1, c and eps in (0, 1)")
    return min((1 - eps) * math.sqrt(packing_log / n), math.atanh(c / (maxdeg_G0 + 1)))


def monotone_lb_theta(n: int, d: int, m: int) -> float:
    """atanh(sqrt(log floor(d/m) / n)) for a motif on m vertices."""
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    k = d // m
    if k < 1:
        raise ValueError("d must be at least m")
    return _atanh_checked(math.sqrt(math.log(k) / n))


# --------------------------------------------------------- upper bounds

@dataclass
class MonotoneUpper:
    threshold: float
    side_l: float
    side_r: float

    @property
    def binding(self) -> float:
        return max(self.threshold, self.side_l, self.side_r)

    def verdict(self, theta: float) -> RegimeVerdict:
        return RegimeVerdict("monotone_upper", theta >= self.binding, theta, self.binding,
                             "testing impossible at or above rhs")


def monotone_ub_theta(l: int, r: int, n: int, d: int, kappa: float = 2.0) -> MonotoneUpper:
    """Above this theta an l x r biclique motif makes testing impossible."""
    if l < 1 or r < 2 or kappa <= 1:
        raise ValueError("need l >= 1, r >= 2, kappa > 1")
    k = d // (l + r)
    if k < 2:
        raise ValueError("need floor(d/(l+r)) >= 2")
    thr = math.log(2 * kappa * n * r / math.log(k)) / l
    side_r = 3 / (r - 2) if r > 2 else math.log(2)
    return MonotoneUpper(thr, 2 / l, side_r)


def detection_impossibility(n: int, d: int, s: int, eps: float) -> RegimeVerdict:
    if eps <= 0 or n < 1 or s < 2:
        raise ValueError("need eps > 0, n >= 1, s >= 2")
    lhs1 = s * math.log(d / s ** 2) / n
    lhs2 = s * math.log(d / (2 * s)) / (n * math.log(math.sqrt(2 * s)))
    c1, c2 = lhs1 > 2 + eps, lhs2 >= 1 + eps
    sparse_warn = s * s >= d
    if sparse_warn:
        warnings.warn("s^2 >= d: outside the sparse regime s = o(sqrt(d))")
    return RegimeVerdict("detection_impossible", c1 and c2, lhs1, 2 + eps,
                         "both conditions must hold",
                         {"cond1": c1, "lhs2": lhs2, "rhs2": 1 + eps, "cond2": c2,
                          "sparse_warning": sparse_warn})


def antiferro_connectivity_ub(theta: float, s: int, n: int, d: int, kappa: float = 2.0) -> RegimeVerdict:
    """Connectivity testing over signed models fails above this theta."""
    if s <= 16:
        return RegimeVerdict("antiferro_connectivity_upper", False, theta, NA, "not-applicable: s <= 16")
    if kappa <= 1:
        raise ValueError("kappa must exceed 1")
    rhs = 2 * math.log(kappa * s * n / math.log(d * s)) / (s - 16)
    side = 3 / (2 * (s // 4) - 2)
    return RegimeVerdict("antiferro_connectivity_upper", theta > rhs and theta >= side, theta, rhs,
                         "testing impossible above rhs", {"side": side, "side_holds": theta >= side})


def example_bounds(kind: str, n: int, d: int, theta: float, kappa: float = 2.0,
                   s: int | None = None, m: int | None = None,
                   constant: float = 1.0) -> list[RegimeVerdict]:
    """Lower and upper signal-strength verdicts for the three worked
    properties. A true verdict means testing is impossible at this theta."""
    out = []
    if kind == "connectivity":
        second = math.atanh(1 / (3 * math.e ** 2))
        rhs = min(kappa * math.sqrt(math.log(d) / n), second)
        out.append(RegimeVerdict("connectivity_lower", theta < rhs, theta, rhs,
                                 "impossible below rhs", {"second_term": second}))
        big = constant * math.log(d) >= n
        out.append(RegimeVerdict("connectivity_large_d", big and math.tanh(theta) < 1,
                                 constant * math.log(d), n,
                                 "log d >~ n (constant as given) and tanh(theta) < 1"))
    elif kind == "cycle":
        lo = monotone_lb_theta(n, d, 3)
        out.append(RegimeVerdict("cycle_lower", theta < lo, theta, lo, "impossible below rhs"))
        up = max(2.0, math.log(4 * kappa * n / math.log(d // 3)))
        out.append(RegimeVerdict("cycle_upper", theta >= up, theta, up, "impossible at or above rhs"))
    elif kind == "clique":
        if s is None or m is None:
            raise ValueError("clique bounds need s and m")
        lo = monotone_lb_theta(n, d, m)
        out.append(RegimeVerdict("clique_lower", theta < lo, theta, lo, "impossible below rhs"))
        second = math.log(kappa * n * s / math.log((2 * d) // s)) / ((s - 1) / 4)
        note = "up to an unstated constant (given as input)"
        if s > 9:
            up = constant * max(12 / (s - 9), second)
        else:
            up = constant * second
            note += "; first term not-applicable for s <= 9"
        out.append(RegimeVerdict("clique_upper", theta >= up, theta, up, note,
                                 {"first_term": 12 / (s - 9) if s > 9 else NA}))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return out


# ------------------------------------------------ correlation bounds

def biclique_lowtemp_bound(l: int, r: int, theta: float) -> BoundValue:
    """Lower bound on the correlation of two vertices on the r-side of an
    l x r biclique."""
    if l < 1 or r < 2:
        raise ValueError("need l >= 1 and r >= 2")
    ok = theta >= 2 / l and (theta >= 3 / (r - 2) if r > 2 else theta >= math.log(2))
    val = 1 - 2 * (r - 1) / (math.exp(theta * l) + r - 1)
    return BoundValue(val, ok)


def biclique_pair_correlation(l: int, r: int, theta: float) -> float:
    """Exact correlation of two r-side vertices of the uniform l x r
    biclique, from the ratio P(aligned)/P(opposed) of binomial sums."""
    j = np.arange(r - 1)
    w = comb(r - 2, j)
    logc_plus = l * np.log(np.cosh(theta * (r - 2 * j)))
    logc_minus = l * np.log(np.cosh(theta * (r - 2 * j - 2)))
    top = np.max(logc_plus)
    ratio = np.sum(w * np.exp(logc_plus - top)) / np.sum(w * np.exp(logc_minus - top))
    return float((ratio - 1) / (ratio + 1))


def dobrushin_series_bound(g: Graph, theta: float, e: Edge, pair: Edge, L: int) -> float:
    """Bound on |E_G X_k X_l - E_{G-e} X_k X_l|, with G = g containing e.

    Series 2 sum_{j<=L} t^{j+1} ([A^j]_{uk} + [A^j]_{vk} + [A^j]_{ul} + [A^j]_{vl})
    plus the geometric tail 8 t (t D)^{L+1} / (1 - t D), t = tanh(theta),
    D = max degree (entries of A^j never exceed D^j)."""
    if L < 1:
        raise ValueError("L must be at least 1")
    if e not in g:
        raise ValueError("the removed edge must belong to g")
    t = math.tanh(theta)
    deg = max_degree(g)
    if not deg * t < 1:
        raise ValueError("Dobrushin condition fails: maxdeg * tanh(theta) >= 1")
    a = g.adjacency()
    u, v = e
    k, ell = pair
    power = np.eye(g.d)
    total = 0.0
    for j in range(L + 1):
        total += 2 * t ** (j + 1) * (power[u, k] + power[v, k] + power[u, ell] + power[v, ell])
        power = power @ a
    tail = 8 * t * (t * deg) ** (L + 1) / (1 - t * deg)
    return total + tail


def count_self_avoiding_walks(g: Graph, u: int, v: int, max_len: int) -> list[int]:
    """N[k] = number of self-avoiding u -> v walks of length k, k <= max_len."""
    if g.d > 12:
        raise ValueError("walk counting limited to d <= 12")
    nbr = [sorted(x) for x in g.neighbors()]
    counts = [0] * (max_len + 1)
    seen = [False] * g.d

    def walk(x: int, length: int):
        if x == v:
            counts[length] += 1
            return
        if length == max_len:
            return
        seen[x] = True
        for y in nbr[x]:
            if not seen[y]:
                walk(y, length + 1)
        seen[x] = False

    if u == v:
        counts[0] = 1
        return counts
    walk(u, 0)
    return counts


def fisher_saw_bound(g: Graph, theta: float, u: int, v: int, max_len: int | None = None) -> float:
    """sum_k tanh(theta)^k N_uv(k). Walks longer than max_len are covered by
    N_uv(k) <= D (D-1)^(k-2), summed up to the longest possible length d-1."""
    longest = g.d - 1
    if max_len is None or max_len > longest:
        max_len = longest
    t = math.tanh(theta)
    counts = count_self_avoiding_walks(g, u, v, max_len)
    total = sum(t ** k * c for k, c in enumerate(counts))
    deg = max_degree(g)
    for k in range(max_len + 1, longest + 1):
        total += t if k == 1 else t ** k * deg * max(deg - 1, 0) ** (k - 2)
    return total
