"""
The empirical process and its increments
========================================
"""

# %%
import numpy as np

from assocemp.empirical import (
    compute_empirical_process,
    dyadic_grid,
    dyadic_modulus,
    fit_bound_constant,
    sup_norm_statistic,
)
from assocemp.sequence_gen import build_gaussian_linear_model, sample_paths, uniform01

model = build_gaussian_linear_model("power_law", alpha=3)
ens = sample_paths(model, uniform01(), n=4096, replicates=200, seed=3)
sample = compute_empirical_process(ens.path(0), dyadic_grid(8))
print("sup |G_n| on the first path:", sup_norm_statistic(sample))
for k in (2, 4, 6, 8):
    print(f"dyadic modulus at scale 2^-{k}: {dyadic_modulus(sample, k).M_k:.4f}")

# %%
# Fit the constant in the increment moment bound and see whether it drifts with n.
pairs = [(0.5 - 2.0**-j / 2, 0.5 + 2.0**-j / 2) for j in range(1, 7)]
ensembles = [sample_paths(model, uniform01(), n, 200, seed=4, stream_prefix=(i,))
             for i, n in enumerate((256, 1024, 4096))]
fit = fit_bound_constant(ensembles, pairs, p=4.5, nu=0.1, alpha=3.0)
print("K_hat overall:", fit.K_hat)
print("K_hat by n:", {n: round(v, 4) for n, v in fit.k_hat_by_n().items()})
print("largest ratio row:", max(fit.rows, key=lambda r: r["ratio"]))
print("mean E|increment|^p at delta=1/2:", np.mean([r["estimate"] for r in fit.rows if r["t"] - r["s"] == 0.5]))
