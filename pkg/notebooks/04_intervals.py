"""
Building intervals
==================

Each constructor returns an `Interval` carrying its kind and the
calibration used, ready for JSON output.
"""

# %%
from biasedci.errors import AssumptionViolation
from biasedci.intervals import Kind, build

theta1, theta2, s1, s2, rho = 1.20, 1.05, 0.30, 0.18, 0.6
for kind in Kind:
    iv = build(kind, theta1, theta2, s1, s2, rho, 0.95)
    print(f"{kind.value:5s} [{iv.lower:.4f}, {iv.upper:.4f}] length {iv.length:.4f}")

# %%
print(build("CI6S", theta1, theta2, s1, s2, rho, 0.95).to_json())

# %%
# A spread estimate that contradicts the MSE ordering is an error unless clipped.
try:
    build("CI5", theta1, theta2, s1, 0.35, rho, 0.95)
except AssumptionViolation as exc:
    print("refused:", exc)
print(build("CI5", theta1, theta2, s1, 0.35, rho, 0.95, clip=True).diagnostics)
