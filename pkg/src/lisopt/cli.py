"""Command-line entry point.

Subcommands:
  optimize  run one method on one objective and print the estimate
  bench     run an experiment spec from a YAML config, emit CSV + SVG
  oracle    quadrature mean / concentration gap of the tempered measure
  slope     log-log slope fit on an emitted CSV

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .distributions import IsotropicGaussian
from .harness import (
    ConfigError,
    ExperimentSpec,
    emit_csv,
    emit_svg_plot,
    fit_loglog_slope,
    parse_csv,
    run_experiment,
)
from .objectives import benchmark, benchmark_names, external_objective, format_float
from .optimizers import (
    METHOD_NAMES,
    AdaptiveConfig,
    StaticConfig,
    run_adaptive_liso,
    run_adaptive_random_search,
    run_isotropic_es,
    run_liso,
    run_random_search,
)
from .oracle import (
    CUBIC_DOMAIN,
    QuadratureSpec,
    cubic_perturbed_quadratic,
    gibbs_mean,
    laplace_gap,
)

_DRIVERS = {
    "liso": (run_liso, True),
    "random_search": (run_random_search, True),
    "adaptive_liso": (run_adaptive_liso, False),
    "adaptive_random_search": (run_adaptive_random_search, False),
    "isotropic_es": (run_isotropic_es, False),
}

_ORACLE_FUNCTIONS = {
    "quad-cubic": (cubic_perturbed_quadratic, CUBIC_DOMAIN, np.zeros(1)),
    "quadratic": (lambda x: float(np.sum(np.asarray(x) ** 2)), ((-8.0, 8.0),), np.zeros(1)),
}


def _parse_vector(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def _cmd_optimize(args) -> int:
    d = args.d
    if args.external:
        objective = external_objective(args.external, d)
    else:
        objective = benchmark(args.fn, d)
    center = _parse_vector(args.q0_center) if args.q0_center else np.zeros(d)
    if center.size != d:
        raise SystemExit2("q0-center length must equal --d")
    q0 = IsotropicGaussian(mean=center, variance=args.q0_var)
    driver, is_static = _DRIVERS[args.method]
    if is_static:
        config = StaticConfig(budget=args.n, alpha0=args.alpha0, q0=q0, seed=args.seed)
    else:
        config = AdaptiveConfig(
            budget=args.n, alpha0=args.alpha0, q0=q0, seed=args.seed,
            sigma2=args.sigma2 if args.sigma2 is not None else 1.0 / d,
            mixture_weight=args.mixture_weight, batch_size=args.batch_size,
        )
    estimate, _ = driver(objective, config)
    value = objective._batch(estimate[None, :])[0] if not args.external else None
    print("estimate:", " ".join(format_float(v) for v in estimate))
    if value is not None:
        print("objective value:", format_float(float(value)))
    if args.external:
        objective.close()
    return 0


def _cmd_bench(args) -> int:
    spec = ExperimentSpec.from_yaml(args.config)
    if args.trials is not None:
        spec.trials = args.trials
    report = run_experiment(spec)
    csv_path = args.csv_out or spec.csv_out or "report.csv"
    svg_path = args.svg_out or spec.svg_out or "report.svg"
    emit_csv(report, csv_path)
    emit_svg_plot(report, svg_path, title=spec.title)
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def _cmd_oracle(args) -> int:
    f, domain, minimizer = _ORACLE_FUNCTIONS[args.fn]
    if args.alphas:
        alphas = [float(a) for a in args.alphas.split(",")]
        gaps = laplace_gap(f, minimizer, domain, alphas, grid_points=args.grid)
        for a, g in zip(alphas, gaps):
            print(f"alpha={format_float(a)} gap={format_float(float(g))}")
    else:
        spec = QuadratureSpec(domain=domain, grid_points=args.grid, alpha=args.alpha)
        mean = gibbs_mean(f, spec)
        print("tempered mean:", " ".join(format_float(v) for v in mean))
    return 0


def _cmd_slope(args) -> int:
    report = parse_csv(args.csv)
    n_range = None
    if args.min_n is not None or args.max_n is not None:
        n_range = (args.min_n or 1.0, args.max_n or float("inf"))
    slope, intercept, r2 = fit_loglog_slope(report, args.method, n_range)
    print(f"slope={format_float(slope)} intercept={format_float(intercept)} "
          f"r2={format_float(r2)}")
    return 0


class SystemExit2(Exception):
    """Usage error diagnosed after argparse."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lisopt")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run one method on one objective")
    p.add_argument("--fn", choices=benchmark_names(), default="sphere")
    p.add_argument("--external", metavar="COMMAND",
                   help="shell command for an external line-protocol objective")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--method", choices=METHOD_NAMES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--q0-center", help="comma-separated d-vector (default: origin)")
    p.add_argument("--q0-var", type=float, default=1.0)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--mixture-weight", type=float, default=0.0)
    p.add_argument("--batch-size", type=int, default=300)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("bench", help="run an experiment spec from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=int, help="override the config's trial count")
    p.add_argument("--csv-out")
    p.add_argument("--svg-out")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("oracle", help="quadrature statistics of the tempered measure")
    p.add_argument("--fn", choices=sorted(_ORACLE_FUNCTIONS), required=True)
    p.add_argument("--alpha", type=float, default=16.0)
    p.add_argument("--alphas", help="comma-separated increasing list: report gaps")
    p.add_argument("--grid", type=int, default=1601)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("slope", help="log-log slope fit on an emitted CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--min-n", type=float)
    p.add_argument("--max-n", type=float)
    p.set_defaults(func=_cmd_slope)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already; normalize others.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, SystemExit2, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
