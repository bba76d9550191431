"""
Bootstrap pipeline on an OLS versus ridge slope
===============================================

The unbiased estimator is the OLS slope of ``Y = 1 + 2 X + U``; the biased
one is a ridge slope with penalty ``4/sqrt(n)``.  Each replication
bootstraps the two standard errors and their correlation and then builds
every interval.  The defaults here are small so the script runs quickly;
the acceptance suite uses 500 replications and 399 bootstrap draws.
"""

# %%
from biasedci.montecarlo import demo_dgp, ols_slope, pairs_bootstrap, ridge_slope, run_study

data, theta = demo_dgp(200, seed=3)
print(f"OLS {ols_slope(data):.4f}  ridge {ridge_slope(data):.4f}  truth {theta}")
print(pairs_bootstrap(data, ols_slope, ridge_slope, 399, seed=3, vectorized=True))

# %%
rows = run_study([(100, 0.95), (200, 0.95)], sim_reps=100, n_boot=199, master_seed=1)
for r in rows:
    print(f"n={r['n']}")
    for k in ("CI1", "CI2", "CI5", "CI6S", "CI6"):
        print(f"  {k:5s} CP {r[k + '_CP']:.3f}  median length {r[k + '_median_length']:.5f}")
    print(f"  clip rate {r['clip_rate']:.3f}")
