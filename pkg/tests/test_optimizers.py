import math

import numpy as np
import pytest

from lisopt import (
    AdaptiveConfig,
    IsotropicGaussian,
    Objective,
    StaticConfig,
    alpha_schedule,
    benchmark,
    bootstrap_stderr,
    default_checkpoints,
    derive_seed,
    isotropic_es_recombination_weights,
    laplace_log_weights,
    make_rng,
    run_adaptive_liso,
    run_adaptive_random_search,
    run_isotropic_es,
    run_liso,
    run_random_search,
)
from lisopt.optimizers import _recombine

D4_NEAR = IsotropicGaussian(mean=np.full(4, 0.5), variance=0.25)


def shifted_sphere(shift, d):
    return Objective(
        d,
        lambda P: np.sum(P * P, axis=1) + shift,
        known_minimizer=np.zeros(d),
    )


# ----------------------------------------------------------------------
# Temperature schedule
# ----------------------------------------------------------------------

def test_alpha_schedule_spot_values():
    assert alpha_schedule(1.0, 16, 2) == pytest.approx(4.0)
    assert alpha_schedule(1.0, 1, 7) == pytest.approx(1.0)
    assert alpha_schedule(0.05, 10**4, 4) == pytest.approx(1.077217, abs=1e-6)
    with pytest.raises(ValueError):
        alpha_schedule(0.0, 10, 2)
    with pytest.raises(ValueError):
        alpha_schedule(1.0, 0, 2)


def test_default_checkpoints_grid():
    cps = default_checkpoints(10**5)
    assert cps[0] == 100 and cps[-1] == 10**5
    assert np.all(np.diff(cps) > 0)
    assert default_checkpoints(50)[-1] == 50


# ----------------------------------------------------------------------
# Static drivers
# ----------------------------------------------------------------------

def test_liso_single_sample_is_the_sample():
    obj = benchmark("sphere", 2)
    q0 = IsotropicGaussian(mean=np.zeros(2), variance=1.0)
    est, trace = run_liso(obj, StaticConfig(budget=1, alpha0=1.0, q0=q0, seed=5))
    sample = q0.sample(make_rng(5), 1)[0]
    assert np.array_equal(est, sample)
    assert trace.checkpoints.tolist() == [1]


def test_liso_objective_shift_invariance():
    q0 = IsotropicGaussian(mean=np.zeros(2), variance=1.0)
    cfg = StaticConfig(budget=500, alpha0=1.0, q0=q0, seed=9)
    base, _ = run_liso(shifted_sphere(0.0, 2), cfg)
    shifted, _ = run_liso(shifted_sphere(1e6, 2), cfg)
    assert np.linalg.norm(base - shifted) < 1e-10


def test_liso_recovers_gaussian_center_within_bootstrap_error():
    # With a quadratic objective and a proposal centered at the optimum, the
    # tempered measure is an exact Gaussian at c; check 3 bootstrap SEs.
    c = np.array([1.5, -0.5])
    obj = Objective(2, lambda P: np.sum((P - c) ** 2, axis=1), known_minimizer=c)
    q0 = IsotropicGaussian(mean=c, variance=1.0)
    cfg = StaticConfig(budget=10**5, alpha0=1.0, q0=q0, seed=17, fixed_alpha=50.0)
    est, _ = run_liso(obj, cfg)
    pts = q0.sample(make_rng(17), 10**5)
    lw = laplace_log_weights(
        50.0, np.sum((pts - c) ** 2, axis=1), q0.log_density_batch(pts)
    )
    se = bootstrap_stderr(pts, lw, make_rng(18), resamples=200)
    assert np.all(np.abs(est - c) < 3 * se)


def test_random_search_basics():
    obj = benchmark("sphere", 2)
    q0 = IsotropicGaussian(mean=np.zeros(2), variance=1.0)
    est, _ = run_random_search(obj, StaticConfig(budget=1, alpha0=1.0, q0=q0, seed=5))
    assert np.array_equal(est, q0.sample(make_rng(5), 1)[0])

    # argmin returns the exact best sample
    obj2 = benchmark("sphere", 2)
    n = 200
    est2, _ = run_random_search(obj2, StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=6))
    pts = q0.sample(make_rng(6), n)
    vals = np.sum(pts * pts, axis=1)
    assert np.array_equal(est2, pts[np.argmin(vals)])


def test_random_search_tie_break_lowest_index():
    obj = Objective(1, lambda P: np.array([3.0, 1.0, 1.0])[: P.shape[0]])
    q0 = IsotropicGaussian(mean=np.zeros(1), variance=1.0)
    est, _ = run_random_search(obj, StaticConfig(budget=3, alpha0=1.0, q0=q0, seed=2))
    pts = q0.sample(make_rng(2), 3)
    assert np.array_equal(est, pts[1])


def test_random_search_best_value_nonincreasing_along_trace():
    obj = benchmark("ackley", 3)
    q0 = IsotropicGaussian(mean=np.ones(3), variance=1.0)
    _, trace = run_random_search(
        obj, StaticConfig(budget=3000, alpha0=1.0, q0=q0, seed=8)
    )
    best_vals = [obj._batch(e[None, :])[0] for e in trace.estimates]
    assert np.all(np.diff(best_vals) <= 0)


# ----------------------------------------------------------------------
# Adaptive drivers
# ----------------------------------------------------------------------

def adaptive_cfg(budget, seed, d=2, lam=0.0, B=100, q0=None, **kw):
    if q0 is None:
        q0 = IsotropicGaussian(mean=np.ones(d), variance=0.5)
    return AdaptiveConfig(
        budget=budget, alpha0=1.0, q0=q0, seed=seed,
        sigma2=0.5, mixture_weight=lam, batch_size=B, **kw,
    )


def test_adaptive_single_batch_equals_static():
    n = 1500
    q0 = IsotropicGaussian(mean=np.ones(2), variance=0.5)
    static, st_trace = run_liso(
        benchmark("sphere", 2), StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=3)
    )
    adaptive, ad_trace = run_adaptive_liso(
        benchmark("sphere", 2), adaptive_cfg(n, 3, B=n, lam=0.7)
    )
    assert np.array_equal(static, adaptive)
    assert np.array_equal(st_trace.estimates, ad_trace.estimates)

    rs, _ = run_random_search(
        benchmark("sphere", 2), StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=3)
    )
    ars, _ = run_adaptive_random_search(
        benchmark("sphere", 2), adaptive_cfg(n, 3, B=n)
    )
    assert np.array_equal(rs, ars)


def test_adaptive_mixture_weight_one_reduces_to_static():
    n = 1200
    q0 = IsotropicGaussian(mean=np.ones(2), variance=0.5)
    static, _ = run_liso(
        benchmark("sphere", 2), StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=4)
    )
    adaptive, _ = run_adaptive_liso(
        benchmark("sphere", 2), adaptive_cfg(n, 4, B=200, lam=1.0)
    )
    assert np.linalg.norm(static - adaptive) < 1e-10


def test_adaptive_constant_objective_random_search_keeps_first_sample():
    obj = Objective(2, lambda P: np.zeros(P.shape[0]))
    est, _ = run_adaptive_random_search(obj, adaptive_cfg(300, 7, B=50))
    q0 = IsotropicGaussian(mean=np.ones(2), variance=0.5)
    assert np.array_equal(est, q0.sample(make_rng(7), 50)[0])


def test_adaptive_shift_invariance():
    cfg = adaptive_cfg(900, 11, B=150)
    base, _ = run_adaptive_liso(shifted_sphere(0.0, 2), cfg)
    shifted, _ = run_adaptive_liso(shifted_sphere(1e6, 2), cfg)
    assert np.linalg.norm(base - shifted) < 1e-10


def test_adaptive_projection_box_clamps_the_mean():
    lo, hi = np.array([2.0, 2.0]), np.array([3.0, 3.0])
    cfg = adaptive_cfg(600, 13, B=100, projection_box=(lo, hi))
    est, trace = run_adaptive_liso(benchmark("sphere", 2), cfg)
    assert np.all(est >= lo) and np.all(est <= hi)
    assert np.all(trace.estimates >= lo) and np.all(trace.estimates <= hi)


def test_adaptive_liso_beats_static_from_far_start():
    # Paired comparison over 20 seeds: adaptation must reduce the final MSE
    # relative to a static run from the same poor initial policy.
    d = 4
    q0 = IsotropicGaussian(mean=np.full(d, 4.0 / math.sqrt(d)), variance=1.0 / d)
    n = 9 * 10**4
    static_mse, adaptive_mse = [], []
    for seed in range(20):
        s = derive_seed(101, seed)
        _, tr_s = run_liso(
            benchmark("sphere", d), StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=s)
        )
        _, tr_a = run_adaptive_liso(
            benchmark("sphere", d),
            AdaptiveConfig(budget=n, alpha0=1.0, q0=q0, seed=s,
                           sigma2=1.0 / d, batch_size=300),
        )
        static_mse.append(tr_s.squared_errors[-1])
        adaptive_mse.append(tr_a.squared_errors[-1])
    assert np.mean(adaptive_mse) < np.mean(static_mse)


def test_adaptive_liso_beats_adaptive_random_search_from_far_start():
    d = 4
    q0 = IsotropicGaussian(mean=np.full(d, 4.0 / math.sqrt(d)), variance=1.0 / d)
    n = 9 * 10**4
    liso_mse, rs_mse = [], []
    for seed in range(20):
        s = derive_seed(202, seed)
        cfg = AdaptiveConfig(budget=n, alpha0=1.0, q0=q0, seed=s,
                             sigma2=1.0 / d, batch_size=300)
        _, tr_l = run_adaptive_liso(benchmark("sphere", d), cfg)
        _, tr_r = run_adaptive_random_search(benchmark("sphere", d), cfg)
        liso_mse.append(tr_l.squared_errors[-1])
        rs_mse.append(tr_r.squared_errors[-1])
    assert np.mean(rs_mse) > 0
    assert np.mean(liso_mse) < np.mean(rs_mse)


# ----------------------------------------------------------------------
# Isotropic evolution strategy
# ----------------------------------------------------------------------

def test_es_recombination_weights_spot_values():
    count, w = isotropic_es_recombination_weights(4)
    assert count == 2
    assert w == pytest.approx([0.916291, 0.223144], abs=1e-6)

    count, w = isotropic_es_recombination_weights(2)
    assert count == 1
    assert w == pytest.approx([math.log(1.5)], abs=1e-6)

    count, w = isotropic_es_recombination_weights(300)
    assert count == 150
    assert w[0] == pytest.approx(math.log(150.5), abs=1e-6)
    assert w[-1] == pytest.approx(math.log(150.5 / 150.0), abs=1e-6)
    assert np.all(w > 0)

    with pytest.raises(ValueError):
        isotropic_es_recombination_weights(1)


def test_es_identical_batch_collapses_to_the_point():
    pts = np.tile(np.array([1.0, -2.0]), (6, 1))
    vals = np.full(6, 3.0)
    assert np.allclose(_recombine(pts, vals, True), pts[0])


def test_es_batch_of_two_returns_the_better_point():
    pts = np.array([[5.0], [1.0]])
    vals = np.array([25.0, 1.0])
    assert np.array_equal(_recombine(pts, vals, True), pts[1])


def test_es_recombination_is_permutation_invariant():
    rng = make_rng(21)
    pts = rng.standard_normal((20, 3))
    vals = rng.standard_normal(20)
    base = _recombine(pts, vals, True)
    perm = rng.permutation(20)
    assert np.allclose(_recombine(pts[perm], vals[perm], True), base, atol=1e-12)


def test_es_runs_and_respects_budget():
    obj = benchmark("sphere", 3)
    cfg = AdaptiveConfig(budget=1050, alpha0=1.0,
                         q0=IsotropicGaussian(mean=np.ones(3), variance=1.0),
                         seed=1, sigma2=0.3, batch_size=100)
    est, trace = run_isotropic_es(obj, cfg)
    assert obj.eval_count == 1050
    assert trace.squared_errors[-1] < trace.squared_errors[0]
    with pytest.raises(ValueError):
        run_isotropic_es(benchmark("sphere", 3),
                         AdaptiveConfig(budget=10, alpha0=1.0, q0=cfg.q0,
                                        seed=1, sigma2=0.3, batch_size=1))


# ----------------------------------------------------------------------
# Cross-driver contracts
# ----------------------------------------------------------------------

ALL_DRIVERS = [
    ("liso", run_liso, True),
    ("random_search", run_random_search, True),
    ("adaptive_liso", run_adaptive_liso, False),
    ("adaptive_random_search", run_adaptive_random_search, False),
    ("isotropic_es", run_isotropic_es, False),
]


@pytest.mark.parametrize("name,driver,is_static", ALL_DRIVERS)
def test_budget_exactness_and_determinism(name, driver, is_static):
    n = 730
    q0 = IsotropicGaussian(mean=np.ones(3), variance=1.0)
    if is_static:
        cfg = StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=42)
    else:
        cfg = AdaptiveConfig(budget=n, alpha0=1.0, q0=q0, seed=42,
                             sigma2=0.5, batch_size=100)
    obj1 = benchmark("rastrigin", 3)
    est1, tr1 = driver(obj1, cfg)
    obj2 = benchmark("rastrigin", 3)
    est2, tr2 = driver(obj2, cfg)
    assert obj1.eval_count == n == obj2.eval_count
    assert np.array_equal(est1, est2)
    assert np.array_equal(tr1.estimates, tr2.estimates)
    assert np.array_equal(tr1.checkpoints, tr2.checkpoints)


@pytest.mark.parametrize("name,driver,is_static", ALL_DRIVERS)
def test_estimates_lie_in_sample_hull(name, driver, is_static):
    n = 600
    q0 = IsotropicGaussian(mean=np.ones(2), variance=1.0)
    if is_static:
        cfg = StaticConfig(budget=n, alpha0=1.0, q0=q0, seed=33)
    else:
        cfg = AdaptiveConfig(budget=n, alpha0=1.0, q0=q0, seed=33,
                             sigma2=0.5, batch_size=100)
    seen = []
    obj = Objective(
        2,
        lambda P: (seen.append(P.copy()), np.sum(P * P, axis=1))[1],
        known_minimizer=np.zeros(2),
    )
    est, trace = driver(obj, cfg)
    pts = np.vstack(seen)
    assert np.all(est >= pts.min(axis=0) - 1e-12)
    assert np.all(est <= pts.max(axis=0) + 1e-12)
    assert np.all(trace.estimates >= pts.min(axis=0) - 1e-12)
    assert np.all(trace.estimates <= pts.max(axis=0) + 1e-12)
