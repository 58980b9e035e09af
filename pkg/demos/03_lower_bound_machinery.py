"""Exact checks behind the impossibility arguments.

Lower bounds compare a null model with a mixture of alternatives through the
chi-square divergence. For small models everything can be enumerated, so the
identities can be checked to machine precision.
"""
import math

from ising_proptest import graph_core as gc
from ising_proptest.bounds import example_bounds
from ising_proptest.graph_core import Graph
from ising_proptest.ising_core import IsingModel, exact_correlation_matrix
from ising_proptest.oracle import (CliquePairSpec, chi2_mixture, chi2_mixture_direct,
                                   edge_addition_factor, ratio, ratio_limit)

theta = 0.5

# Adding one edge to an empty pair: E_0[(P_1/P_0)^2] = 1 + tanh(theta)^2.
f = edge_addition_factor(gc.empty_graph(2), (0, 1), (0, 1), theta)
print(f"single edge factor: enumerated {f.enumerated:.15f}, identity {f.closed_form:.15f}, "
      f"1 + tanh^2 = {1 + math.tanh(theta) ** 2:.15f}")

# Three two-edge paths; alternative j closes the triangle in block j. Only the
# diagonal terms of the mixture differ from 1, so the divergence is
# (factor^n - 1) / 3.
motif = Graph(3, frozenset({(0, 1), (1, 2)}))
p0 = IsingModel.simple(gc.repeated_motif(motif, 9), theta)
alts = [IsingModel.simple(gc.repeated_motif(motif, 9, (0, 2), j), theta) for j in range(3)]
e0 = exact_correlation_matrix(p0)[0, 2]
ej = exact_correlation_matrix(alts[0])[0, 2]
factor = 1 + (ej - e0) / (e0 + 1 / math.tanh(theta))
print(f"\nmixture of 3 closed triangles, d=9: factor {factor:.6f} "
      f"(tanh form {1 + math.tanh(theta) * (ej - e0):.6f} is an upper bound)")
for n in (1, 2):
    print(f"  n={n}: enumerated over 2^{9 * n} states {chi2_mixture_direct(alts, p0, n):.12f}, "
          f"formula {(factor ** n - 1) / 3:.12f}")
for n in (10, 100):
    print(f"  n={n}: pairwise sum {chi2_mixture(alts, p0, n):.6g}, formula {(factor ** n - 1) / 3:.6g}")

# Antiferromagnetic cliques: the overlap ratio grows with theta towards a
# closed-form limit that never exceeds sqrt(2s).
s, j = 6, 4
print(f"\nclique pair s={s}, overlap {j}:")
for th in (0.0, 0.5, 1.0, 2.0, 5.0, 20.0):
    print(f"  theta={th:5.1f}: ratio {ratio(CliquePairSpec(s, j, th)):.6f}")
print(f"  limit {ratio_limit(s, j):.6f}, sqrt(2s) = {math.sqrt(2 * s):.6f}")

# Regime verdicts for cycle testing at a desk-scale and a large configuration.
print("\nbound_name,lhs,rhs,holds")
for n, d in [(4000, 10), (10 ** 6, 10 ** 4)]:
    for v in example_bounds("cycle", n, d, 1.0):
        print(v.csv_row())
