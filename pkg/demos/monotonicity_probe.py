"""
A g-pseudomonotone operator that is not pseudomonotone
======================================================

T(u) = 4 - u with g(u) = u^2 on [3, 5]. Adding g to both sides of the
pseudomonotonicity implication repairs it everywhere on the interval,
while the plain implication fails at u = 3, v = 5.
"""

from mvipc.problems import probe_pseudomonotonicity

rep = probe_pseudomonotonicity(points=201)
print(f"{rep.samples} grid pairs checked, {rep.violations} violations")

u, v, lhs, rhs = rep.counterexample
print(f"u={u}, v={v}: <T u, v - u> = {lhs} but <T v, v - u> = {rhs}")
