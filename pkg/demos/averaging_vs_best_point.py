"""Why average the samples instead of keeping the best one?

Random search remembers only the single best point it has seen.  The softmin
average uses *every* evaluation: points are weighted by exp(-alpha f) / q and
averaged, so samples near the minimum all pull the estimate toward it and
their errors partially cancel.  On a smooth objective this earns a visibly
faster convergence rate for the same evaluation budget.

Run:  python3 demos/averaging_vs_best_point.py
"""

import numpy as np

from lisopt import (
    IsotropicGaussian,
    StaticConfig,
    benchmark,
    run_liso,
    run_random_search,
)

d = 4
budget = 50_000
q0 = IsotropicGaussian(mean=np.full(d, d**-0.5), variance=1.0 / d)

traces = {}
for name, driver in (("softmin average", run_liso), ("best point", run_random_search)):
    objective = benchmark("sphere", d)
    config = StaticConfig(budget=budget, alpha0=1.0, q0=q0, seed=7)
    _, trace = driver(objective, config)
    traces[name] = trace

print(f"sphere, d={d}, one run, shared sample stream (seed 7)\n")
print(f"{'n':>8}  {'softmin average':>16}  {'best point':>12}")
cps = traces["best point"].checkpoints
for j in range(0, cps.size, 4):
    row = [traces[m].squared_errors[j] for m in ("softmin average", "best point")]
    print(f"{cps[j]:>8}  {row[0]:>16.3e}  {row[1]:>12.3e}")

final = {m: t.squared_errors[-1] for m, t in traces.items()}
print(f"\nfinal squared error: averaging is "
      f"{final['best point'] / final['softmin average']:.1f}x closer "
      f"(on this seed)")
