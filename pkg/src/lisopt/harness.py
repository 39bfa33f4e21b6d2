"""Multi-trial benchmark harness: experiment specs, statistics, CSV and SVG.

An experiment runs one or more methods on one objective for ``trials``
independent trials, records the squared error of the anytime estimate at a
shared checkpoint grid, and aggregates mean / std / normal 95% confidence
half-width per checkpoint.  Everything downstream of a (spec, seed) pair is
byte-deterministic.

Trials may execute in parallel; the worker count comes from the
``LISOPT_WORKERS`` environment variable (default: the processor count).
Aggregation folds results in trial order, so completion order never matters.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from .distributions import IsotropicGaussian, derive_seed
from .objectives import Objective, benchmark, benchmark_names, format_float
from .optimizers import (
    METHOD_NAMES,
    AdaptiveConfig,
    StaticConfig,
    default_checkpoints,
    run_adaptive_liso,
    run_adaptive_random_search,
    run_isotropic_es,
    run_liso,
    run_random_search,
)

Array = np.ndarray

CSV_HEADER = "method,n_evals,mean_mse,std,ci_half_width,trials"

_STATIC_METHODS = ("liso", "random_search")


class ConfigError(ValueError):
    """An experiment spec is malformed."""


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one experiment."""

    objective: str
    dimension: int
    methods: List[str]
    budget: int
    seed: int
    alpha0: float
    q0_center: List[float]
    q0_variance: float
    trials: int = 100
    batch_size: int = 300
    mixture_weight: float = 0.0
    sigma2: Optional[float] = None
    checkpoint_start: int = 100
    checkpoint_count: int = 30
    title: str = ""
    csv_out: Optional[str] = None
    svg_out: Optional[str] = None

    def __post_init__(self):
        if self.objective not in benchmark_names():
            raise ConfigError(f"unknown objective {self.objective!r}")
        if self.dimension < 1:
            raise ConfigError("dimension must be >= 1")
        if not self.methods:
            raise ConfigError("method list must be nonempty")
        for m in self.methods:
            if m not in METHOD_NAMES:
                raise ConfigError(f"unknown method {m!r}; choose from {METHOD_NAMES}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if len(self.q0_center) != self.dimension:
            raise ConfigError("q0_center length must equal dimension")
        if not self.q0_variance > 0:
            raise ConfigError("q0_variance must be positive")
        if self.sigma2 is None:
            self.sigma2 = 1.0 / self.dimension

    @classmethod
    def from_yaml(cls, path: str) -> "ExperimentSpec":
        """Load a flat YAML mapping; unknown keys are errors, not warnings."""
        with open(path, "r") as fh:
            raw = yaml.safe_load(fh)
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a YAML mapping of keys to values")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"{path}: unknown keys {unknown} (silent typos corrupt experiments)")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    def to_yaml(self, path: str) -> None:
        data = asdict(self)
        data = {k: v for k, v in data.items() if v is not None}
        with open(path, "w") as fh:
            yaml.safe_dump(data, fh, sort_keys=False)


@dataclass
class MethodStats:
    """Aggregated per-checkpoint statistics for one method."""

    checkpoints: Array
    mean_mse: Array
    std: Array
    ci_half_width: Array
    trials: int

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MethodStats)
            and self.trials == other.trials
            and np.array_equal(self.checkpoints, other.checkpoints)
            and np.array_equal(self.mean_mse, other.mean_mse)
            and np.array_equal(self.std, other.std)
            and np.array_equal(self.ci_half_width, other.ci_half_width)
        )


@dataclass
class ExperimentReport:
    methods: Dict[str, MethodStats]
    metadata: Dict[str, object] = field(default_factory=dict)
    single_trial: bool = False  # std undefined at 1 trial, reported as 0

    def __eq__(self, other) -> bool:
        return isinstance(other, ExperimentReport) and self.methods == other.methods


def _build_objective(spec: ExperimentSpec) -> Objective:
    return benchmark(spec.objective, spec.dimension)


def _run_one_trial(spec: ExperimentSpec, method: str, trial: int) -> Array:
    """Run one (method, trial) pair; returns squared errors per checkpoint."""
    objective = _build_objective(spec)
    seed = derive_seed(spec.seed, trial)
    checkpoints = default_checkpoints(
        spec.budget, count=spec.checkpoint_count, start=spec.checkpoint_start
    )
    q0 = IsotropicGaussian(mean=np.asarray(spec.q0_center, dtype=float),
                           variance=spec.q0_variance)
    if method in _STATIC_METHODS:
        config = StaticConfig(
            budget=spec.budget, alpha0=spec.alpha0, q0=q0, seed=seed,
            checkpoints=checkpoints,
        )
        driver = run_liso if method == "liso" else run_random_search
    else:
        config = AdaptiveConfig(
            budget=spec.budget, alpha0=spec.alpha0, q0=q0, seed=seed,
            sigma2=spec.sigma2, mixture_weight=spec.mixture_weight,
            batch_size=spec.batch_size, checkpoints=checkpoints,
        )
        driver = {
            "adaptive_liso": run_adaptive_liso,
            "adaptive_random_search": run_adaptive_random_search,
            "isotropic_es": run_isotropic_es,
        }[method]
    _, trace = driver(objective, config)
    if objective.eval_count != spec.budget:
        raise RuntimeError(
            f"{method} trial {trial}: spent {objective.eval_count} evaluations "
            f"instead of {spec.budget}"
        )
    return trace.squared_errors


def _worker_count() -> int:
    env = os.environ.get("LISOPT_WORKERS")
    if env is not None:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Run all (method, trial) pairs and aggregate the traces.

    Any trial failure aborts the experiment; the error names the derived
    seed so the failing trial can be replayed in isolation.
    """
    t0 = time.monotonic()
    checkpoints = default_checkpoints(
        spec.budget, count=spec.checkpoint_count, start=spec.checkpoint_start
    )
    tasks = [(method, trial) for method in spec.methods for trial in range(spec.trials)]
    workers = _worker_count()
    results: Dict[Tuple[str, int], Array] = {}
    try:
        if workers == 1 or len(tasks) == 1:
            for method, trial in tasks:
                results[(method, trial)] = _run_one_trial(spec, method, trial)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {
                    (method, trial): pool.submit(_run_one_trial, spec, method, trial)
                    for method, trial in tasks
                }
                for key, fut in futures.items():
                    results[key] = fut.result()
    except Exception as exc:
        failing = next(
            (k for k in tasks if k not in results or _failed(results.get(k))), None
        )
        trial = failing[1] if failing else -1
        raise RuntimeError(
            f"experiment aborted; replay with derived seed "
            f"{derive_seed(spec.seed, trial)} (trial {trial}): {exc}"
        ) from exc

    methods: Dict[str, MethodStats] = {}
    for method in spec.methods:
        # Deterministic reduction: fold in trial-index order.
        errors = np.stack([results[(method, t)] for t in range(spec.trials)])
        mean = errors.mean(axis=0)
        if spec.trials > 1:
            std = errors.std(axis=0, ddof=1)
        else:
            std = np.zeros_like(mean)
        ci = 1.96 * std / math.sqrt(spec.trials)
        methods[method] = MethodStats(
            checkpoints=checkpoints.copy(),
            mean_mse=mean,
            std=std,
            ci_half_width=ci,
            trials=spec.trials,
        )
    metadata = {
        "objective": spec.objective,
        "dimension": spec.dimension,
        "seed": spec.seed,
        "budget": spec.budget,
        "trials": spec.trials,
        "title": spec.title,
        "wall_clock_s": time.monotonic() - t0,
    }
    return ExperimentReport(
        methods=methods, metadata=metadata, single_trial=(spec.trials == 1)
    )


def _failed(value) -> bool:
    return value is None


# ----------------------------------------------------------------------
# Slope fitting
# ----------------------------------------------------------------------

def fit_loglog_slope(
    report: ExperimentReport,
    method: str,
    n_range: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float, float]:
    """OLS fit of log(mean MSE) against log(n) over a checkpoint range.

    Returns (slope, intercept, r_squared).  Requires at least 5 checkpoints
    with strictly positive mean MSE inside the range.
    """
    try:
        stats = report.methods[method]
    except KeyError:
        raise ValueError(f"method {method!r} not in report") from None
    n = stats.checkpoints.astype(float)
    mse = stats.mean_mse
    mask = np.ones(n.size, dtype=bool)
    if n_range is not None:
        mask &= (n >= n_range[0]) & (n <= n_range[1])
    if np.any(mse[mask] <= 0):
        raise ValueError("mean MSE must be positive throughout the fit range")
    if np.count_nonzero(mask) < 5:
        raise ValueError("need at least 5 checkpoints in the fit range")
    x = np.log(n[mask])
    y = np.log(mse[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


# ----------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------

def csv_string(report: ExperimentReport) -> str:
    """Bit-exact CSV serialization; floats in shortest round-trip decimal."""
    lines = [CSV_HEADER]
    for method in sorted(report.methods):
        stats = report.methods[method]
        for i, n in enumerate(stats.checkpoints):
            lines.append(
                ",".join(
                    [
                        method,
                        str(int(n)),
                        format_float(stats.mean_mse[i]),
                        format_float(stats.std[i]),
                        format_float(stats.ci_half_width[i]),
                        str(stats.trials),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def emit_csv(report: ExperimentReport, path: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(csv_string(report))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def parse_csv(path: str) -> ExperimentReport:
    """Inverse of emit_csv for all numeric fields."""
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or malformed header")
    rows: Dict[str, List[Tuple[int, float, float, float, int]]] = {}
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ValueError(f"{path}: malformed row {line!r}")
        method, n, mean, std, ci, trials = parts
        rows.setdefault(method, []).append(
            (int(n), float(mean), float(std), float(ci), int(trials))
        )
    methods = {}
    for method, entries in rows.items():
        entries.sort(key=lambda e: e[0])
        arr = np.array(entries, dtype=float)
        methods[method] = MethodStats(
            checkpoints=arr[:, 0].astype(int),
            mean_mse=arr[:, 1],
            std=arr[:, 2],
            ci_half_width=arr[:, 3],
            trials=int(entries[0][4]),
        )
    return ExperimentReport(methods=methods)


# ----------------------------------------------------------------------
# SVG
# ----------------------------------------------------------------------

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f",
)

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _svg_coords(xs: Array, ys: Array, xlim, ylim) -> str:
    lx0, lx1 = math.log10(xlim[0]), math.log10(xlim[1])
    ly0, ly1 = math.log10(ylim[0]), math.log10(ylim[1])
    px = _ML + (np.log10(xs) - lx0) / (lx1 - lx0) * (_W - _ML - _MR)
    py = _H - _MB - (np.log10(ys) - ly0) / (ly1 - ly0) * (_H - _MT - _MB)
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))


def svg_string(report: ExperimentReport, title: str = "") -> str:
    """Self-contained log-log SVG plot: mean polyline + CI band per method.

    Deterministic: identical reports yield byte-identical output.
    Checkpoints with nonpositive mean MSE are dropped with a warning
    annotation.
    """
    if not report.methods:
        raise ValueError("report has no methods to plot")
    if not title:
        title = str(report.metadata.get("title", "") or "mean squared error vs evaluations")

    series = {}
    dropped = []
    for method in sorted(report.methods):
        s = report.methods[method]
        keep = s.mean_mse > 0
        if not np.all(keep):
            dropped.append((method, int(np.count_nonzero(~keep))))
        if np.count_nonzero(keep) == 0:
            continue
        series[method] = (
            s.checkpoints[keep].astype(float),
            s.mean_mse[keep],
            s.ci_half_width[keep],
        )
    if not series:
        raise ValueError("no positive mean MSE values to plot")

    floors = min(v[1].min() for v in series.values())
    all_x = np.concatenate([v[0] for v in series.values()])
    uppers = np.concatenate([v[1] + v[2] for v in series.values()])
    lowers = np.concatenate([np.maximum(v[1] - v[2], floors * 0.5) for v in series.values()])
    xlim = (all_x.min(), max(all_x.max(), all_x.min() * 1.0001))
    ylim = (lowers.min() * 0.8, uppers.max() * 1.25)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]
    for method, annotation in dropped:
        out.append(f"<!-- warning: dropped {annotation} nonpositive points for {method} -->")

    # Axes frame and decade ticks.
    out.append(
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>'
    )
    for decade in range(math.ceil(math.log10(xlim[0])), math.floor(math.log10(xlim[1])) + 1):
        x = 10.0**decade
        px = _ML + (math.log10(x) - math.log10(xlim[0])) / (
            math.log10(xlim[1]) - math.log10(xlim[0])
        ) * (_W - _ML - _MR)
        out.append(
            f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" y2="{_H - _MB + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{_H - _MB + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">1e{decade}</text>'
        )
    for decade in range(math.ceil(math.log10(ylim[0])), math.floor(math.log10(ylim[1])) + 1):
        y = 10.0**decade
        py = _H - _MB - (math.log10(y) - math.log10(ylim[0])) / (
            math.log10(ylim[1]) - math.log10(ylim[0])
        ) * (_H - _MT - _MB)
        out.append(
            f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" y2="{py:.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_ML - 10}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">1e{decade}</text>'
        )
    out.append(
        f'<text x="{_W / 2:.0f}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">evaluations n</text>'
    )

    # CI bands first (under the lines), then means, then legend.
    for idx, (method, (xs, mean, ci)) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        upper = mean + ci
        lower = np.maximum(mean - ci, floors * 0.5)
        band = _svg_coords(
            np.concatenate([xs, xs[::-1]]),
            np.concatenate([upper, lower[::-1]]),
            xlim, ylim,
        )
        out.append(f'<polygon points="{band}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
    for idx, (method, (xs, mean, _)) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        out.append(
            f'<polyline points="{_svg_coords(xs, mean, xlim, ylim)}" '
            f'fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
    for idx, method in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        ly = _MT + 16 + 18 * idx
        out.append(
            f'<line x1="{_W - _MR - 150}" y1="{ly}" x2="{_W - _MR - 120}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        out.append(
            f'<text x="{_W - _MR - 114}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="12">{method}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_plot(report: ExperimentReport, path: str, title: str = "") -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(svg_string(report, title=title))
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc
