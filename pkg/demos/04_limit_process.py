"""
The Gaussian limit and a finite-dimensional comparison
======================================================
"""

# %%
from assocemp.empirical import custom_grid, empirical_process_matrix
from assocemp.limit import fdd_distance, limit_covariance_matrix, sample_limit_process
from assocemp.sequence_gen import build_gaussian_linear_model, sample_paths, uniform01

grid = custom_grid([0.1, 0.3, 0.5, 0.7, 0.9])
model = build_gaussian_linear_model("power_law", alpha=3)
iid = build_gaussian_linear_model("iid")
gamma = limit_covariance_matrix(model, grid, tail_tol=1e-6)
bridge = limit_covariance_matrix(iid, grid)
print(f"lags used: {gamma.K_max}, certified tail: {gamma.tail_bound:.2e}")
print("variance at 1/2, dependent vs bridge:", gamma.matrix[2, 2], bridge.matrix[2, 2])

# %%
# G_n from dependent data matches the dependent limit, not the Brownian bridge.
G = empirical_process_matrix(sample_paths(model, uniform01(), 8192, 1000, seed=11), grid)
for name, cov in (("dependent limit", gamma), ("brownian bridge", bridge)):
    lim = sample_limit_process(cov, 1000, seed=12).values
    rep = fdd_distance(G, lim, permutations=499, seed=13)
    print(f"{name:16s} p={rep.pvalue:.3f}  max KS={rep.ks_max:.3f}")
