"""Optimizing a black box that lives in another process.

Real tuning targets are rarely Python functions.  The external objective
speaks a one-line-per-evaluation protocol over stdin/stdout: the optimizer
writes a space-separated point, the child answers with one float.  Any
language can implement the child side; here it is a short Python one-liner
standing in for, say, a simulator binary.

Run:  python3 demos/external_objective.py
"""

import sys

import numpy as np

from lisopt import (
    AdaptiveConfig,
    IsotropicGaussian,
    external_objective,
    run_adaptive_liso,
)

CHILD = (
    "import sys\n"
    "for line in sys.stdin:\n"
    "    x = [float(v) for v in line.split()]\n"
    "    print(sum((v - 1.5) ** 2 for v in x))\n"
    "    sys.stdout.flush()\n"
)

d = 3
objective = external_objective([sys.executable, "-u", "-c", CHILD], d)
with objective:
    estimate, _ = run_adaptive_liso(
        objective,
        AdaptiveConfig(
            budget=6_000, alpha0=1.0,
            q0=IsotropicGaussian(mean=np.zeros(d), variance=1.0),
            seed=1, sigma2=1.0 / d, batch_size=300,
        ),
    )

print("child process computes f(x) = sum((x_i - 1.5)^2), minimum at (1.5, 1.5, 1.5)")
print("estimate after 6000 evaluations:", np.round(estimate, 4))
print("evaluations actually spent:     ", objective.eval_count)
