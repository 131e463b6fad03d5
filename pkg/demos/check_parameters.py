"""
Checking solver parameters
==========================

The relaxed inertial solver only carries its convergence guarantee when the
inertia, correction and relaxation weights satisfy a handful of
inequalities. This script evaluates them for the default parameters and for
a correction weight that is too small.
"""

from mvipc.solver import (ParameterError, check_conditions, delta_lower_bounds,
                          validate_params, xi_value)

# xi combines the relaxation and contraction weights
xi = xi_value(theta=0.4, gamma=1.5)
print(f"xi = {xi:.6f}")

# delta must clear two lower bounds
first, second = delta_lower_bounds(alpha=0.5, sigma=1.5, xi=xi)
print(f"delta must exceed {first:.4f} and {second:.4f}")

for name, ok, detail in check_conditions(0.5, 0.9, 0.4, 1.5, 1.5):
    print(f"  {'ok  ' if ok else 'FAIL'} {name:<22} {detail}")

# a correction weight below the first bound is rejected with a named error
try:
    validate_params(alpha=0.5, delta=0.5, theta=0.4, gamma=1.5, sigma=1.5)
except ParameterError as exc:
    print("rejected:", exc.condition)

# with no inertia any delta in (0, 1) is admissible
print(validate_params(alpha=0.0, delta=0.05, theta=0.4, gamma=1.5))
