import copy

import numpy as np
import pytest

from lisopt import (
    ExperimentReport,
    ExperimentSpec,
    MethodStats,
    emit_csv,
    emit_svg_plot,
    fit_loglog_slope,
    parse_csv,
    run_experiment,
)
from lisopt.harness import ConfigError, csv_string, svg_string


def small_spec(**overrides):
    kw = dict(
        objective="sphere",
        dimension=2,
        methods=["liso", "random_search"],
        budget=400,
        seed=7,
        alpha0=1.0,
        q0_center=[0.7, 0.7],
        q0_variance=0.5,
        trials=4,
        checkpoint_start=50,
        checkpoint_count=8,
    )
    kw.update(overrides)
    return ExperimentSpec(**kw)


def synthetic_report(power=-0.5, scale=2.0, methods=("m",)):
    cps = np.unique(np.geomspace(100, 10**4, 12).astype(int))
    out = {}
    for m in methods:
        mse = scale * cps.astype(float) ** power
        out[m] = MethodStats(
            checkpoints=cps,
            mean_mse=mse,
            std=mse / 10,
            ci_half_width=mse / 20,
            trials=10,
        )
    return ExperimentReport(methods=out)


# ----------------------------------------------------------------------
# Spec validation and config files
# ----------------------------------------------------------------------

def test_spec_validation_errors():
    with pytest.raises(ConfigError):
        small_spec(objective="nope")
    with pytest.raises(ConfigError):
        small_spec(methods=[])
    with pytest.raises(ConfigError):
        small_spec(methods=["gradient_descent"])
    with pytest.raises(ConfigError):
        small_spec(q0_center=[0.7])
    with pytest.raises(ConfigError):
        small_spec(trials=0)


def test_yaml_round_trip_and_unknown_key_rejection(tmp_path):
    spec = small_spec()
    path = tmp_path / "spec.yaml"
    spec.to_yaml(str(path))
    loaded = ExperimentSpec.from_yaml(str(path))
    assert loaded == spec

    path.write_text(path.read_text() + "tpyo_key: 3\n")
    with pytest.raises(ConfigError, match="tpyo_key"):
        ExperimentSpec.from_yaml(str(path))


def test_sigma2_defaults_to_inverse_dimension():
    assert small_spec(dimension=2, q0_center=[0.0, 0.0]).sigma2 == 0.5


# ----------------------------------------------------------------------
# run_experiment
# ----------------------------------------------------------------------

def test_single_trial_statistics_are_degenerate(monkeypatch):
    monkeypatch.setenv("LISOPT_WORKERS", "1")
    report = run_experiment(small_spec(trials=1))
    assert report.single_trial
    for stats in report.methods.values():
        assert np.all(stats.ci_half_width == 0)
        assert np.all(stats.std == 0)
        assert np.all(stats.mean_mse >= 0)


def test_experiment_is_seed_deterministic(monkeypatch):
    monkeypatch.setenv("LISOPT_WORKERS", "1")
    r1 = run_experiment(small_spec())
    r2 = run_experiment(small_spec())
    assert r1 == r2
    assert csv_string(r1) == csv_string(r2)
    assert svg_string(r1) == svg_string(r2)


def test_worker_pool_matches_sequential(monkeypatch):
    monkeypatch.setenv("LISOPT_WORKERS", "1")
    sequential = run_experiment(small_spec())
    monkeypatch.setenv("LISOPT_WORKERS", "2")
    parallel = run_experiment(small_spec())
    assert sequential == parallel


def test_methods_share_checkpoints(monkeypatch):
    monkeypatch.setenv("LISOPT_WORKERS", "1")
    report = run_experiment(small_spec())
    cps = [s.checkpoints.tolist() for s in report.methods.values()]
    assert cps[0] == cps[1]


# ----------------------------------------------------------------------
# Slope fitting
# ----------------------------------------------------------------------

def test_slope_exact_power_law():
    slope, _, r2 = fit_loglog_slope(synthetic_report(power=-2.0 / 3.0), "m")
    assert slope == pytest.approx(-2.0 / 3.0, abs=1e-9)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_slope_and_intercept():
    slope, intercept, _ = fit_loglog_slope(synthetic_report(power=-0.5, scale=2.0), "m")
    assert slope == pytest.approx(-0.5, abs=1e-9)
    assert intercept == pytest.approx(np.log(2.0), abs=1e-9)


def test_slope_error_cases():
    report = synthetic_report()
    with pytest.raises(ValueError):
        fit_loglog_slope(report, "missing")
    with pytest.raises(ValueError):
        fit_loglog_slope(report, "m", n_range=(100, 150))  # too few points
    bad = synthetic_report()
    bad.methods["m"].mean_mse[3] = 0.0
    with pytest.raises(ValueError):
        fit_loglog_slope(bad, "m")


# ----------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------

def test_csv_header_only_for_empty_report():
    assert csv_string(ExperimentReport(methods={})) == (
        "method,n_evals,mean_mse,std,ci_half_width,trials\n"
    )


def test_csv_one_method_one_checkpoint():
    r = ExperimentReport(methods={
        "m": MethodStats(
            checkpoints=np.array([10]),
            mean_mse=np.array([0.5]),
            std=np.array([0.1]),
            ci_half_width=np.array([0.05]),
            trials=3,
        )
    })
    assert csv_string(r) == (
        "method,n_evals,mean_mse,std,ci_half_width,trials\n"
        "m,10,0.5,0.1,0.05,3\n"
    )


def test_csv_round_trip_identity(tmp_path):
    report = synthetic_report(methods=("b", "a"))
    # perturb with awkward floats that need full round-trip precision
    report.methods["a"].mean_mse[0] = 0.1 + 0.2
    report.methods["b"].std[2] = 1e-17
    path = tmp_path / "r.csv"
    emit_csv(report, str(path))
    assert parse_csv(str(path)) == report
    emit_csv(report, str(path))  # second emission is byte-identical
    assert parse_csv(str(path)) == report


def test_csv_rows_sorted_by_method_then_n(tmp_path):
    report = synthetic_report(methods=("zeta", "alpha"))
    lines = csv_string(report).splitlines()[1:]
    methods = [l.split(",")[0] for l in lines]
    assert methods == sorted(methods)


def test_parse_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nope\n")
    with pytest.raises(ValueError):
        parse_csv(str(path))


# ----------------------------------------------------------------------
# SVG
# ----------------------------------------------------------------------

def test_svg_structure_single_method():
    svg = svg_string(synthetic_report(methods=("only",)))
    assert svg.count("<polyline") == 1
    assert svg.count("<polygon") == 1
    assert "only" in svg
    assert svg.startswith("<svg ") and svg.rstrip().endswith("</svg>")


def test_svg_byte_determinism():
    a = svg_string(synthetic_report(methods=("x", "y")))
    b = svg_string(copy.deepcopy(synthetic_report(methods=("x", "y"))))
    assert a == b


def test_svg_drops_nonpositive_points_with_warning():
    report = synthetic_report(methods=("m",))
    report.methods["m"].mean_mse[0] = 0.0
    svg = svg_string(report)
    assert "warning: dropped 1 nonpositive points for m" in svg


def test_svg_empty_report_raises():
    with pytest.raises(ValueError):
        svg_string(ExperimentReport(methods={}))


def test_svg_emit_writes_file(tmp_path):
    path = tmp_path / "plot.svg"
    emit_svg_plot(synthetic_report(), str(path))
    assert path.read_text().startswith("<svg ")
