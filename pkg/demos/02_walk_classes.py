"""
Walk classes and the exact finite-N moment
==========================================

Closed walks grouped into classes, the hypertree (essential) ones that
survive as N grows, and the exact expectation of Tr(A^k)/N at finite N.
"""

# %%
from hypermoments import ModelParams, enumerate_classes, exact_finite_moment, is_essential, oracle_moment
from hypermoments.weights import Sign

# %%
# The six essential classes of length 4 once hyperedges have at least four vertices.
for w in enumerate_classes(4, 4):
    print(w.steps, "edges:", w.edge_vertices)

# %%
# Essential and all classes, by length, for q = 3.
for k in range(7):
    everything = list(enumerate_classes(k, 3, essential_only=False))
    print(k, len(list(enumerate_classes(k, 3))), len(everything),
          sum(is_essential(w, 3) for w in everything))

# %%
# Exact finite-N moments approach the limit like 1/N.
P = ModelParams(2, 3)
X = Sign().moments(6)
for k in (2, 4, 6):
    limit = oracle_moment(k, P, X)
    print(f"k={k} limit {float(limit):g}")
    for N in (25, 50, 100, 200, 400):
        ex = exact_finite_moment(N, k, P, X)
        print(f"   N={N:4d}  exact {float(ex):.6f}   N*(exact-limit) {float(N * (ex - limit)):+.4f}")
