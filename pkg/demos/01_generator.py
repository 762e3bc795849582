"""
Generating associated sequences
===============================

A Gaussian moving average with nonnegative weights is associated, and
pushing it through the normal CDF gives uniform marginals.
"""

# %%
# Build two models and look at how fast the latent correlation dies out.
import numpy as np

from assocemp.sequence_gen import (
    build_gaussian_linear_model,
    minimal_decay_constant,
    sample_paths,
    uniform01,
    uniform_pair_covariance,
)

ar = build_gaussian_linear_model("ar1", phi=0.5)
pl = build_gaussian_linear_model("power_law", alpha=3)
for k in (1, 2, 4, 8, 16, 32):
    print(f"k={k:3d}  ar1 rho={ar.rho(k):.3e}  power_law rho={pl.rho(k):.3e}")

# %%
# Covariance of the uniforms is arcsin(rho/2)/(2 pi); k^3 times it stays bounded.
k = np.arange(1, 257)
cov = uniform_pair_covariance(pl.rho(k))
print("k^3 cov at k=16, 64, 256:", (cov * k**3.0)[[15, 63, 255]])
print("smallest C with cov <= C k^-3:", minimal_decay_constant(pl, 3.0, 256))

# %%
# Sample paths. The same seed always gives the same array.
ens = sample_paths(pl, uniform01(), n=10_000, replicates=4, seed=2024)
print("replicate means:", ens.values.mean(axis=1))
lag1 = np.mean((ens.values[:, :-1] - 0.5) * (ens.values[:, 1:] - 0.5))
print(f"lag-1 covariance {lag1:.4f} vs exact {uniform_pair_covariance(pl.rho(1)):.4f}")
