"""
Decay of moment correlators
===========================

The covariance between M_k and M_m across samples shrinks like 1/N.
"""

# %%
from hypermoments import SimConfig, correlator_decay_study
from hypermoments.weights import Sign

cfg = SimConfig(N=50, q=3, p=2, dist=Sign(), trials=500, k_max=4, seed=5, workers=4)
study = correlator_decay_study(cfg, [50, 100, 200, 400], k=2, m=2, n_boot=300)

# %%
for N, C, se in zip(study.N_grid, study.correlators, study.correlator_se):
    print(f"N={N:4d}  C_22 = {C:.5f} +- {se:.5f}   N*C = {N * C:.3f}")
print("log-log slope", study.slope, "95% CI", study.slope_ci)

# %%
# M_1 is identically zero, so its correlators vanish exactly.
print(correlator_decay_study(cfg, [50, 100, 200, 400], k=1, m=2, n_boot=10).correlators)
