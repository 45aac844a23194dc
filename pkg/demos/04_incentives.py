"""
Is the relaxed solution implementable?
======================================

Brute-force IC on a 2001 x 2001 grid next to the U' monotonicity test.
"""
from productline import ModelParams, Regime, limited_schedule, monotonicity_check
from productline.verifier import ic_check, sequential_rationality_check

for mu, c in [(0.3, 1.0), (0.6, 2.0), (0.75, 2.0), (0.75, 0.5), (0.9, 0.5)]:
    params = ModelParams.create(mu, 1.0, c)
    s = limited_schedule(params)
    mono = monotonicity_check(params)
    # the two closed-form conditions only speak to the top-pool regime
    conds = ""
    if mono.regime is Regime.MU_ABOVE_L:
        conds = f" stated={mono.stated_condition_ok} derived={mono.derived_condition_ok}"
    print(f"mu={mu:.2f} c={c:.1f} {mono.regime.value:16s} ic={ic_check(s):.2e} "
          f"monotone={mono.numeric_ok}{conds} seqrat={bool(sequential_rationality_check(s))}")
