"""
Running an experiment from a config file
========================================

The benchmark runner reads an INI file with one section per experiment and
writes one trace CSV per run plus a summary table.
"""

import csv
import tempfile
from pathlib import Path

from mvipc.bench import main

out = Path(tempfile.mkdtemp())
config = out / "experiment.ini"
config.write_text("""
[ex3_n20]
problem = ex3
dim = 20
seeds = 1-3
methods = ripcm, pcm_he, ppa_mainge
monitor = true
""")

status = main(["run", str(config), "--output-dir", str(out / "results")])
print("exit status", status)

with open(out / "results" / "ex3_n20" / "summary.csv") as fh:
    for row in csv.DictReader(fh):
        print(row["method"], row["seed"], row["iters"], row["final_dist"])

trace = out / "results" / "ex3_n20" / "traces" / "ex3_ripcm_seed1.csv"
print(trace.read_text().splitlines()[:3])
