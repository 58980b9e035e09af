"""Correlation screening on small ferromagnets.

We build a model on a graph, look at its exact pair correlations, draw a
sample, and ask each screening test whether the graph has the property.
"""
import math

import numpy as np

from ising_proptest import graph_core as gc
from ising_proptest.ising_core import IsingModel, exact_correlation_matrix, exact_sample
from ising_proptest.screening import (clique_size_test, clique_T, connectivity_test, cycle_test,
                                      tau)

theta, n, d = 0.5, 4000, 8
np.set_printoptions(precision=3, suppress=True)

# A path and the same path closed into a cycle. Adjacent spins correlate at
# least tanh(theta); spins two steps apart only at about tanh(theta)^2.
path = IsingModel.simple(gc.path_graph(d), theta)
ring = IsingModel.simple(gc.cycle_graph(d), theta)
print("exact correlations along the path, first row:")
print(exact_correlation_matrix(path)[0])
print(f"tanh(theta) = {math.tanh(theta):.3f}, tanh(theta)^2 = {math.tanh(theta) ** 2:.3f}")
print(f"tau at n={n}, d={d}: {tau(n, d, 0.05):.4f}\n")

for name, model in [("path", path), ("cycle", ring)]:
    batch = exact_sample(model, n, seed=7)
    conn = connectivity_test(batch, theta, 0.05)
    cyc = cycle_test(batch, theta, theta, 0.05)
    print(f"{name:5s}: connected? psi={conn.psi}  has a cycle? psi={cyc.psi} "
          f"(weakest cycle edge {cyc.min_witness_correlation:.3f} vs cut "
          f"{cyc.threshold_used - cyc.tau:.3f})")

# Two halves with no edge between them: the maximum spanning tree has to use
# one near-zero correlation, so connectivity is rejected.
split = IsingModel.simple(gc.disjoint_union(gc.path_graph(4), gc.path_graph(4)), theta)
rep = connectivity_test(exact_sample(split, n, seed=8), theta, 0.05)
print(f"\ntwo disjoint paths: psi={rep.psi}, weakest tree edge {rep.min_witness_correlation:.3f}")

# Cliques: an m-clique's edges correlate at the Curie-Weiss value, well above
# anything a clique-free graph of bounded degree produces.
print(f"\n4-clique edge correlation at theta=0.3: {clique_T(4, 0.3):.4f}")
k4 = IsingModel.simple(gc.pad(gc.clique_graph(range(4)), d), 0.3)
h0, _ = gc.turan_h0(3, 4)
no_k4 = IsingModel.simple(gc.pad(h0, d), 0.3)
for name, model in [("planted K4", k4), ("K4 minus an edge", no_k4)]:
    rep = clique_size_test(exact_sample(model, n, seed=9), 0.3, 4, 0.05, s=3)
    print(f"{name:17s}: psi={rep.psi}, weakest edge of the best candidate {rep.min_witness_correlation:.3f}")
print("\nfull report for the last test:")
print(rep.as_text())
