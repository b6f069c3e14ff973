"""
Limiting moments from the recurrence
====================================

The limiting spectral moments of sparse weighted q-uniform hypergraph
adjacency matrices, computed exactly and checked against walk enumeration.
"""

# %%
# Exact moments for the graph case (q = 2, p = 1, unit weights).
# These are the moments of the sparse Erdos-Renyi spectral density.
from fractions import Fraction

from hypermoments import ModelParams, WeightMomentSeq, limiting_moments, oracle_moment

X = WeightMomentSeq.constant(1, 10)
print("q=2:", [str(m) for m in limiting_moments(10, ModelParams(1, 2), X)])

# %%
# Moving to 3-uniform hyperedges makes odd moments nonzero: a walk can
# go around a triangle inside one hyperedge.
print("q=3:", [str(m) for m in limiting_moments(10, ModelParams(1, 3), X)])

# %%
# Weights enter only through their moments X_1, X_2, ...  A two-point law
# with a nonzero mean is as easy as a symmetric one.
from hypermoments import parse_distribution

law = parse_distribution("twopoint:2,-1,1/3")
P = ModelParams(Fraction(3, 2), 3)
m = limiting_moments(8, P, law.moments(8))
for k, v in enumerate(m):
    print(f"m_{k} = {v}  ({float(v):.6g})")

# %%
# The brute-force walk enumeration gives the same rationals.
print(all(oracle_moment(k, P, law.moments(8)) == m[k] for k in range(9)))

# %%
# Growth of the even moments: (m_2k)^(1/2k) grows slowly, so the moments
# pin down the limiting density.
from hypermoments import carleman_diagnostic

for q in (2, 3, 4):
    m = limiting_moments(16, ModelParams(1, q), WeightMomentSeq.constant(1, 16))
    print(q, [f"{r:.3f}" for _, r in carleman_diagnostic(m)])
