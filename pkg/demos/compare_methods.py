"""
Comparing iteration counts
==========================

Every method starts from the same seeded points and stops on the same rule,
||x_{n+1} - x_n|| < 1e-6. The table gives median iteration counts over ten
seeds for each problem family.
"""

import numpy as np

from mvipc.bench import METHODS, make_problem, random_starts, run_method

for family, dim in [("ex1", 3), ("ex2", 2), ("ex3", 20)]:
    counts = {m: [] for m in METHODS}
    for seed in range(1, 11):
        prob = make_problem(family, dim, seed)
        starts = random_starts(seed, prob.dim)
        for m in METHODS:
            counts[m].append(run_method(m, prob, starts, 1e-6, 10_000).iterations)
    row = "  ".join(f"{m} {int(np.median(c)):5d}" for m, c in counts.items())
    print(f"{family}: {row}")
