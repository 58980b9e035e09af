"""Graph property testing for zero-field Ising models: exact inference and
sampling, correlation screening and score tests, signal-strength bounds, a
brute-force oracle and a Monte Carlo harness."""
from .graph_core import Graph, WeightedGraph
from .ising_core import IsingModel, SampleBatch, StateCounts

__all__ = ["Graph", "WeightedGraph", "IsingModel", "SampleBatch", "StateCounts"]
__version__ = "0.1.0"
