"""
Product lines at v_L = 0.75, v_H = 1, c = 2
===========================================

First best, full commitment and limited commitment side by side.
"""
import numpy as np

from productline import (
    ModelParams,
    commitment_revenue,
    commitment_schedule,
    first_best_schedule,
    limited_schedule,
    solve_pooling_interval,
)
from productline.commitment import first_best_surplus
from productline.surplus import schedule_virtual_value

params = ModelParams.create(0.75, 1.0, 2.0)
print("mu_bar =", params.mu_bar)

# %%
# The pooled cell and its quality
pool = solve_pooling_interval(params)
print(f"pooled types: [{pool.m_lo:.7f}, {pool.m_hi:.7f}]  mean {pool.mean:.3f}")

# %%
# Quality on a coarse type grid
theta = np.linspace(0, 1, 11)
rows = {
    "first best": first_best_schedule(params).quality(theta),
    "commitment": commitment_schedule(params).quality(theta),
    "limited": limited_schedule(params).quality(theta),
}
print("theta      " + " ".join(f"{t:5.2f}" for t in theta))
for name, q in rows.items():
    print(f"{name:10s} " + " ".join(f"{v:5.3f}" for v in q))

# %%
# Revenues
print("first-best surplus ", first_best_surplus(params))
print("commitment revenue ", commitment_revenue(params))
print("limited revenue    ", schedule_virtual_value(limited_schedule(params)))
