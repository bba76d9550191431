"""
Coverage of the biased-centre interval
======================================

On the equal-MSE frontier the bias and spread of the biased estimator are
``s1 sin t`` and ``s1 cos t``.  The interval ``theta2_hat +/- z s1`` then has
coverage ``cp_t(t, z)``.  This script tabulates the curves (the data behind a
coverage-vs-angle plot) and the worst case over ``t``.
"""

# %%
import numpy as np

from biasedci.coverage import HALF_PI, coverage_threshold_level, cp_t, worst_case_cp
from biasedci.normal import std_normal_quantile

t = np.linspace(0.0, HALF_PI, 9)
print("t      " + "  ".join(f"{x:6.3f}" for x in t))
for level in (0.99, 0.95, 0.90, 0.68):
    z = std_normal_quantile((1 + level) / 2)
    print(f"{level:<6} " + "  ".join(f"{v:6.4f}" for v in cp_t(t, z)))

# %%
# At high levels the minimum sits at zero bias; at 90% it dips just below.
for level in (0.99, 0.95, 0.90, 0.68):
    wc = worst_case_cp(std_normal_quantile((1 + level) / 2))
    print(f"level {level}: min CP {wc.cp_min:.6f} at t = {wc.t_min:.4f}")

# %%
# The level above which the worst case never falls short of nominal.
print(f"threshold level: {coverage_threshold_level(1e-6):.5f}")
