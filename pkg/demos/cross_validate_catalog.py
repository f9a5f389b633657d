"""Compare closed-form verdicts with dyadic-window verdicts over a small radial catalog."""

import itertools
import time

from embedkit.criteria import catalog_grid, cross_validate
from embedkit.weights import RadialPower

exps = [-0.5, 0.0, 0.5]
pairs = [(RadialPower(1, a0, b0), RadialPower(1, a1, b1)) for a0, b0, a1, b1 in itertools.product(exps, repeat=4)]
queries = catalog_grid(pairs, [0.0, 0.5, 1.0, 1.5], [1.5, 2.0, 4.0], band=0.05)

t0 = time.perf_counter()
report = cross_validate(queries)
print(f"{len(queries)} queries in {time.perf_counter() - t0:.1f}s")
print(report.summary())
for row in report.rows[:5]:
    print(row.index, row.closed.outcome.value, row.window.outcome.value, row.agree)
