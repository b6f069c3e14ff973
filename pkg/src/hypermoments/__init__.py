"""Limiting spectral moments of sparse random weighted uniform hypergraphs.

Three independent routes to the same numbers:

* :mod:`hypermoments.recurrence` -- exact recurrences for the limiting moments;
* :mod:`hypermoments.walks` -- brute-force enumeration of walk classes, both in
  the limit and exactly at finite ``N``;
* :mod:`hypermoments.simulation` -- Monte Carlo sampling of adjacency matrices.
"""

from .params import ModelParams, ParameterError, WeightMomentSeq
from .recurrence import carleman_diagnostic, k_count, limiting_moments, ms_r_crosscheck, s_value
from .simulation import (
    SimConfig,
    SimRun,
    assemble_adjacency,
    correlator_decay_study,
    eigen_histogram,
    empirical_moments,
    run_trials,
    sample_hypergraph,
)
from .walks import (
    MinimalWalkClass,
    class_from_walk,
    enumerate_classes,
    exact_finite_moment,
    is_essential,
    oracle_k_count,
    oracle_moment,
    oracle_s_table,
)
from .weights import Constant, Gaussian, Sign, TwoPoint, WeightDistribution, parse_distribution

__version__ = "0.1.0"
