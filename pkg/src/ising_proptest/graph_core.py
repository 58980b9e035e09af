"""Simple graphs, greedy weight-ordered searches and the constructions used
by the lower-bound arguments.

Vertices are 0-based everywhere in code; the text formats are 1-based.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    d: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.d and 0 <= v < self.d):
                raise ValueError(f"edge ({u}, {v}) out of range for d={self.d}")
            clean.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, d: int, edges: Iterable[Edge]) -> "Graph":
        return cls(d, frozenset(edges))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def neighbors(self) -> list[set[int]]:
        nbr: list[set[int]] = [set() for _ in range(self.d)]
        for u, v in self.edges:
            nbr[u].add(v)
            nbr[v].add(u)
        return nbr

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.d, self.d))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def add_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.d, self.edges | {_norm(u, v)})

    def remove_edge(self, u: int, v: int) -> "Graph":
        e = _norm(u, v)
        if e not in self.edges:
            raise ValueError(f"edge {e} not in graph")
        return Graph(self.d, self.edges - {e})

    def __contains__(self, e) -> bool:
        return _norm(*e) in self.edges


@dataclass(frozen=True)
class WeightedGraph:
    """Graph plus a real weight per edge; a zero weight means no edge."""
    graph: Graph
    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        w = {_norm(*e): float(x) for e, x in self.weights.items()}
        if set(w) != set(self.graph.edges):
            raise ValueError("weights must be defined exactly on the graph's edges")
        if any(x == 0.0 for x in w.values()):
            raise ValueError("zero weight: drop the edge instead")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, g: Graph, w: float = 1.0) -> "WeightedGraph":
        return cls(g, {e: w for e in g.edges})

    @classmethod
    def from_dict(cls, d: int, weights: dict) -> "WeightedGraph":
        weights = {_norm(*e): x for e, x in weights.items() if x != 0}
        return cls(Graph(d, frozenset(weights)), weights)

    @property
    def d(self) -> int:
        return self.graph.d

    @property
    def is_ferromagnetic(self) -> bool:
        return all(x > 0 for x in self.weights.values())

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.d, self.d))
        for (u, v), x in self.weights.items():
            w[u, v] = w[v, u] = x
        return w


@dataclass(frozen=True)
class EdgePair:
    e: Edge
    e_prime: Edge


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True


# ----------------------------------------------------------------- basics

def max_degree(g: Graph) -> int:
    deg = [0] * g.d
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    return max(deg)


def bfs_distances(g: Graph, source: int) -> list[float]:
    nbr = g.neighbors()
    dist = [math.inf] * g.d
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in nbr[x]:
            if dist[y] == math.inf:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def edge_geodesic_predistance(g: Graph, p: EdgePair) -> float:
    """Smallest geodesic distance between an endpoint of e and one of e'."""
    for x in (*p.e, *p.e_prime):
        if not 0 <= x < g.d:
            raise ValueError(f"vertex {x} out of range for d={g.d}")
    best = math.inf
    for u in p.e:
        dist = bfs_distances(g, u)
        best = min(best, *(dist[v] for v in p.e_prime))
    return best if best == math.inf else int(best)


def _conflicts(g: Graph, candidates: Sequence[Edge], r: float) -> list[set[int]]:
    dist = [bfs_distances(g, x) for x in range(g.d)]
    k = len(candidates)
    bad: list[set[int]] = [set() for _ in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        a, b = candidates[i], candidates[j]
        if min(dist[u][v] for u in a for v in b) < r:
            bad[i].add(j)
            bad[j].add(i)
    return bad


def is_packing(g: Graph, edges: Sequence[Edge], r: float) -> bool:
    return all(not c for c in _conflicts(g, list(edges), r))


def greedy_packing(g: Graph, candidates: Sequence[Edge], r: float) -> list[Edge]:
    """Scan candidates in order, keeping each one at pre-distance >= r from
    everything kept so far."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    candidates = list(candidates)
    bad = _conflicts(g, candidates, r)
    kept: list[int] = []
    for i in range(len(candidates)):
        if not any(j in bad[i] for j in kept):
            kept.append(i)
    out = [candidates[i] for i in kept]
    assert is_packing(g, out, r)
    return out


def exact_max_packing(g: Graph, candidates: Sequence[Edge], r: float) -> list[Edge]:
    """Largest r-packing among at most 20 candidates (branch and bound)."""
    candidates = list(candidates)
    if len(candidates) > 20:
        raise ValueError("exact packing is limited to 20 candidates")
    bad = _conflicts(g, candidates, r)
    best: list[int] = []

    def grow(chosen: list[int], rest: list[int]):
        nonlocal best
        if len(chosen) + len(rest) <= len(best):
            return
        if not rest:
            best = list(chosen)
            return
        i, tail = rest[0], rest[1:]
        grow(chosen + [i], [j for j in tail if j not in bad[i]])
        grow(chosen, tail)

    grow([], list(range(len(candidates))))
    return [candidates[i] for i in best]


def components(g: Graph) -> list[list[int]]:
    uf = UnionFind(g.d)
    for u, v in g.edges:
        uf.union(u, v)
    groups: dict[int, list[int]] = {}
    for x in range(g.d):
        groups.setdefault(uf.find(x), []).append(x)
    return sorted(groups.values())


def is_connected(g: Graph) -> bool:
    return len(components(g)) == 1


def is_forest(g: Graph) -> bool:
    uf = UnionFind(g.d)
    return all(uf.union(u, v) for u, v in g.sorted_edges())


def _extend_clique(clique: list[int], pool: list[int], need: int, nbr) -> list[int] | None:
    # depth-first search for `need` more vertices from pool, all mutually adjacent
    if need == 0:
        return clique
    for i, x in enumerate(pool):
        if len(pool) - i < need:
            break
        found = _extend_clique(clique + [x], [y for y in pool[i + 1:] if y in nbr[x]],
                               need - 1, nbr)
        if found is not None:
            return found
    return None


def has_m_clique(g: Graph, m: int) -> bool:
    if m < 2:
        raise ValueError("m must be at least 2")
    nbr = g.neighbors()
    for u, v in g.sorted_edges():
        common = sorted(nbr[u] & nbr[v])
        if _extend_clique([u, v], common, m - 2, nbr) is not None:
            return True
    return False


def simple_path_vertices(g: Graph, u: int, v: int) -> set[int]:
    """Vertices lying on at least one simple u-v path (DFS; small graphs)."""
    nbr = g.neighbors()
    on_path: set[int] = set()
    stack = [u]

    def walk(x: int):
        if x == v:
            on_path.update(stack)
            return
        for y in nbr[x]:
            if y not in stack:
                stack.append(y)
                walk(y)
                stack.pop()

    walk(u)
    return on_path


def induced_subgraph_edges(g: Graph, keep: set[int]) -> list[Edge]:
    return [(a, b) for a, b in g.sorted_edges() if a in keep and b in keep]


# ------------------------------------------ weight-ordered greedy searches

def _insertion_order(m: np.ndarray, skip_zero: bool = False) -> list[Edge]:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("weight matrix must be square")
    if not np.array_equal(m, m.T):
        raise ValueError("weight matrix must be symmetric")
    d = m.shape[0]
    iu, iv = np.triu_indices(d, 1)
    w = m[iu, iv]
    if skip_zero:
        nz = w != 0
        iu, iv, w = iu[nz], iv[nz], w[nz]
    # descending weight, then lexicographic (u, v)
    order = np.lexsort((iv, iu, -w))
    return [(int(iu[k]), int(iv[k])) for k in order]


def max_weight_spanning_forest(m: np.ndarray, skip_zero: bool = True) -> Graph:
    """Kruskal on descending weights, ties broken by smaller (u, v) first.

    With skip_zero=True only nonzero entries are candidate edges, so the
    result spans each component of the nonzero support. With skip_zero=False
    every pair is a candidate and the result is a spanning tree.
    """
    d = np.asarray(m).shape[0]
    uf = UnionFind(d)
    tree = [e for e in _insertion_order(m, skip_zero) if uf.union(*e)]
    return Graph(d, frozenset(tree))


def first_cycle_by_weight(m: np.ndarray) -> list[Edge]:
    """Insert pairs by descending weight until one closes a cycle; return the
    edges of that cycle."""
    d = np.asarray(m).shape[0]
    if d < 3:
        raise ValueError("no cycle: fewer than 3 vertices")
    uf = UnionFind(d)
    tree: list[Edge] = []
    for u, v in _insertion_order(m):
        if uf.union(u, v):
            tree.append((u, v))
            continue
        path = forest_path(Graph(d, frozenset(tree)), u, v)
        return sorted(path + [(u, v)])
    raise ValueError("no cycle")


def first_m_clique_by_weight(m: np.ndarray, m_size: int) -> list[int]:
    """Insert pairs by descending weight until an m_size-clique appears."""
    d = np.asarray(m).shape[0]
    if m_size < 3:
        raise ValueError("clique size must be at least 3")
    if d < m_size:
        raise ValueError("clique size exceeds dimension")
    nbr: list[set[int]] = [set() for _ in range(d)]
    for u, v in _insertion_order(m):
        nbr[u].add(v)
        nbr[v].add(u)
        common = sorted(nbr[u] & nbr[v])
        # the lexicographically smallest completion is the first DFS hit
        rest = _extend_clique([], common, m_size - 2, nbr)
        if rest is not None:
            return sorted([u, v] + rest)
    raise ValueError("no clique")


def forest_path(t: Graph, u: int, v: int) -> list[Edge] | None:
    """Edges on the unique u-v path of a forest; [] when u == v, None when
    u and v lie in different trees."""
    if not is_forest(t):
        raise ValueError("input has a cycle")
    if u == v:
        return []
    nbr = t.neighbors()
    parent = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            break
        for y in sorted(nbr[x]):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    if v not in parent:
        return None
    path = []
    x = v
    while parent[x] is not None:
        path.append(_norm(parent[x], x))
        x = parent[x]
    return path[::-1]


# ------------------------------------------------------------- generators

def path_graph(d: int) -> Graph:
    return Graph(d, frozenset((i, i + 1) for i in range(d - 1)))


def cycle_graph(d: int) -> Graph:
    if d < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(d, frozenset([(i, i + 1) for i in range(d - 1)] + [(0, d - 1)]))


def star_graph(d: int) -> Graph:
    return Graph(d, frozenset((0, i) for i in range(1, d)))


def empty_graph(d: int) -> Graph:
    return Graph(d)


def clique_graph(vertices: Iterable[int], d: int | None = None) -> Graph:
    vs = sorted(set(vertices))
    if d is None:
        d = max(vs) + 1
    return Graph(d, frozenset(itertools.combinations(vs, 2)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    for g in graphs:
        edges += [(u + offset, v + offset) for u, v in g.edges]
        offset += g.d
    return Graph(offset, frozenset(edges))


def pad(g: Graph, d: int) -> Graph:
    if d < g.d:
        raise ValueError("cannot pad to a smaller dimension")
    return Graph(d, g.edges)


def two_cycles_with_rungs(d: int) -> tuple[Graph, list[Edge]]:
    """Two cycles on h = d // 2 vertices each (0..h-1 and h..2h-1) and the
    rungs (j, h + j) as the candidate alternative edges."""
    h = d // 2
    if h < 3:
        raise ValueError("need d >= 6")
    ring = [(i, (i + 1) % h) for i in range(h)]
    edges = [(a, b) for a, b in ring] + [(a + h, b + h) for a, b in ring]
    return Graph(d, frozenset(edges)), [(j, h + j) for j in range(h)]


def repeated_motif(h0: Graph, d: int, extra_edge: Edge | None = None, block: int = 0) -> Graph:
    """floor(d / |V(h0)|) disjoint copies of h0, leftover vertices isolated.
    extra_edge (in h0's labels) is added to copy number `block`."""
    k = d // h0.d
    if k < 1:
        raise ValueError("motif larger than d")
    edges = [(u + j * h0.d, v + j * h0.d) for j in range(k) for u, v in h0.edges]
    if extra_edge is not None:
        if not 0 <= block < k:
            raise ValueError("block index out of range")
        u, v = extra_edge
        if _norm(u, v) in h0.edges:
            raise ValueError("extra edge already in motif")
        edges.append((u + block * h0.d, v + block * h0.d))
    return Graph(d, frozenset(edges))


def turan_groups(s: int, m: int) -> list[list[int]]:
    if m < 3 or m > s + 1:
        raise ValueError("need 3 <= m <= s + 1")
    q = (s - 1) // (m - 2)
    sizes = [q] * (m - 2) + [q + 1]
    groups, start = [], 0
    for size in sizes:
        groups.append(list(range(start, start + size)))
        start += size
    return groups


def turan_h0(s: int, m: int) -> tuple[Graph, Edge]:
    """Complete (m-1)-partite graph on floor((s-1)/(m-2))(m-1)+1 vertices,
    last group one larger. Returns the graph and the edge inside the larger
    group whose addition creates an m-clique."""
    groups = turan_groups(s, m)
    where = {x: i for i, grp in enumerate(groups) for x in grp}
    n = len(where)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if where[u] != where[v]]
    last = groups[-1]
    return Graph(n, frozenset(edges)), (last[0], last[1])


def clique_chain_with_path(d: int, s: int) -> Graph:
    """s-cliques on blocks {sj+1..s(j+1)} (1-based) for j = 0..floor(d/s)-2,
    chained by the edges (sj, sj+1), plus a separate path on the remaining
    vertices s(floor(d/s)-1)+1..d."""
    if s < 2 or d < 3 * s:
        raise ValueError("need s >= 2 and d >= 3s")
    k = d // s
    edges = []
    for j in range(k - 1):
        edges += itertools.combinations(range(s * j, s * (j + 1)), 2)
    for j in range(1, k - 1):
        edges.append((s * j - 1, s * j))
    edges += [(x, x + 1) for x in range(s * (k - 1), d - 1)]
    return Graph(d, frozenset(edges))


def biclique(l: int, r: int) -> Graph:
    """Complete bipartite graph with sides {0..l-1} and {l..l+r-1}."""
    if l < 1 or r < 1:
        raise ValueError("sides must be nonempty")
    return Graph(l + r, frozenset((a, l + b) for a in range(l) for b in range(r)))


# ---------------------------------------------------------------- file I/O

def format_graph(g: Graph | WeightedGraph) -> str:
    lines = [f"d={g.d}"]
    if isinstance(g, WeightedGraph):
        for u, v in g.graph.sorted_edges():
            lines.append(f"{u + 1} {v + 1} {g.weights[(u, v)]:.17g}")
    else:
        lines += [f"{u + 1} {v + 1}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph | WeightedGraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or not rows[0][0].startswith("d="):
        raise ValueError("missing 'd=<int>' header")
    d = int(rows[0][0][2:])
    body = rows[1:]
    if body and all(len(r) == 3 for r in body):
        return WeightedGraph.from_dict(
            d, {(int(a) - 1, int(b) - 1): float(w) for a, b, w in body})
    if any(len(r) != 2 for r in body):
        raise ValueError("edge lines must have 2 or 3 columns")
    return Graph(d, frozenset((int(a) - 1, int(b) - 1) for a, b in body))


def read_graph(path) -> Graph | WeightedGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph | WeightedGraph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_graph(g))
