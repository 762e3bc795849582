"""
Exponent bookkeeping for the moment and chaining bounds
=======================================================
"""

# %%
from assocemp.bounds import (
    ALPHA_THRESHOLD,
    admissible_p_interval,
    chaining_schedule,
    chaining_tail_value,
    exponent_table,
    increment_cov_sum_bound,
)

print(f"decay threshold: {ALPHA_THRESHOLD:.6f}")
for alpha in (2.2, 2.5, 3.0, 4.0):
    iv = admissible_p_interval(alpha)
    print(f"alpha={alpha}: p in ({iv.lower:.4f}, {iv.upper:.4f}), empty={iv.empty}")

# %%
for row in exponent_table(3.0, 0.05):
    print(row)

# %%
n, p, nu = 2**20, 4.5, 0.05
s = chaining_schedule(n, nu, p, alpha=3.0)
print("m_n =", s.m_n, " r =", s.r)
for d in range(0, s.m_n + 1, 2):
    print(f"d={d:2d}  tail sum {chaining_tail_value(d, s.m_n, n, p, nu, 3.0, 1.0, 1.0, s.r):.4e}")

# %%
for j in (1, 4, 8, 16):
    res = increment_cov_sum_bound(2.0**-j, 1.0, 3.0)
    print(f"delta=2^-{j:<2d} sum bound {res.value:.4e}  normalised {res.A1:.4f}")
