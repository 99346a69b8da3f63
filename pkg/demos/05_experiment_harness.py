"""A small end-to-end comparison experiment through the harness API.

Equivalent to the CLI call

    histarch run --suite 2d --algos hr,cmaes,cnrga_lru --budget 2000 \
        --runs 5 --seed 0 --out <dir>

but driven from Python, with the rank/mark table printed at the end.
Desk-scale disclaimer: the suite is a set of classic test functions, not
the official CEC benchmark data.
"""

import tempfile
from pathlib import Path

from histarch import ExperimentConfig, run_experiment

out = Path(tempfile.mkdtemp(prefix="histarch_demo_"))
config = ExperimentConfig(
    algorithms=["hr", "cmaes", "cnrga_lru"],
    dim=2,
    budget=2000,
    runs=5,
    base_seed=0,
    out_dir=str(out),
    problems=["sphere", "rastrigin", "griewank", "schwefel"],
)
result = run_experiment(config)

table = result.table
print(f"reference algorithm for the +/- marks: {table.reference}\n")
header = f"{'problem':12s}" + "".join(f"{a:>14s}" for a in table.algorithms)
print(header)
for prob in table.problems:
    row = f"{prob:12s}"
    for algo in table.algorithms:
        rank = table.ranks[(prob, algo)]
        mark = table.marks[(prob, algo)]
        suffix = f" ({mark})" if mark != "." and algo != table.reference else ""
        row += f"{rank:>10.1f}{suffix:>4s}"
    print(row)

print(f"\nmedian final errors:")
for prob in table.problems:
    row = f"{prob:12s}"
    for algo in table.algorithms:
        row += f"{table.cells[(prob, algo)].median:>14.3e}"
    print(row)

print(f"\nwritten to {out}:")
for path in sorted(out.iterdir()):
    print(f"  {path.name}")
