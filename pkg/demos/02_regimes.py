"""
How the limited-commitment schedule changes with mu_bar
=======================================================
"""
import numpy as np

from productline import ModelParams, classify, limited_schedule

c = 1.0
for mu in (0.2, 0.35, 0.45, 0.55, 0.7, 0.9):
    params = ModelParams.create(mu, 1.0, c)
    s = limited_schedule(params)
    cells = ", ".join(f"{seg.kind.value}[{seg.lo:.3f},{seg.hi:.3f}) p2={seg.price2:g}"
                      for seg in s.segments)
    print(f"mu={mu:4.2f} {classify(params).value:16s} {cells}")

# %%
# Exclusion widens to [0, 2 mu) once mu passes 1/4
for mu in np.linspace(0.26, 0.49, 5):
    s = limited_schedule(ModelParams.create(mu, 1.0, c))
    print(f"mu={mu:.3f} exclusion ends at {s.segments[0].hi:.3f}")
