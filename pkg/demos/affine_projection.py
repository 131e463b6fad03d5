"""
Projecting onto an affine preimage of a box
===========================================

ex1 constrains x in R^3 through M x + d in [0, 1]^2. The projection onto
that set is computed exactly by trying every active-set pattern of the two
rows. The solver then runs on ex1, whose solution is not known in closed
form, so convergence is judged by the fixed-point residual.
"""

import numpy as np

from mvipc.bench import random_starts
from mvipc.problems import EX1_D, EX1_M, make_ex1
from mvipc.prox import project_affine_box
from mvipc.solver import default_params, solve

u = np.array([1.0, 1.0, 1.0])
x = project_affine_box(u, EX1_M, EX1_D, 0.0, 1.0)
print("projection of (1, 1, 1):", x)
print("M x + d =", EX1_M @ x + EX1_D)
# the displacement is a combination of the active rows of M
print("x - u   =", x - u)

prob = make_ex1()
x0, x_prev, w_prev = random_starts(3, 3)
res = solve(prob, default_params(), x0, x_prev, w_prev)
print(f"ex1: {res.iterations} iterations, x = {res.x}")
print(f"fixed-point residual {prob.fixed_point_residual(res.x):.2e}")
