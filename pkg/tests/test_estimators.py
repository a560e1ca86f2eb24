import numpy as np
import pytest

from bsppa import get_kernel, make_poisson_instance, make_quadratic_instance
from bsppa.errors import DomainViolation, InvalidConfig, MissingReference
from bsppa.estimators import make_estimator
from bsppa.theory import sigma_sq_diagnostic, sigma_sq_smoothness_bound
from bsppa.verify import check_sigma_recursion, check_unbiasedness

BURG = get_kernel("burg")
EUCLID = get_kernel("euclidean")


def _make(variant, problem, x0, **kw):
    kw.setdefault("eps_rng", np.random.default_rng(1))
    kw.setdefault("xi_rng", np.random.default_rng(2))
    return make_estimator(variant, problem, x0, **kw)


def test_vanilla_is_zero(poisson_small):
    est = _make("none", poisson_small, np.ones(poisson_small.d))
    for i in range(poisson_small.n):
        assert np.array_equal(est.compute_e(poisson_small, i, np.ones(poisson_small.d)),
                              np.zeros(poisson_small.d))


@pytest.mark.parametrize("variant", ["saga", "lsvrg", "svrp"])
def test_initial_e_is_centered_gradient(variant, poisson_small):
    x0 = np.ones(poisson_small.d)
    est = _make(variant, poisson_small, x0, lsvrg_p=0.5, svrp_m=4)
    full = poisson_small.full_grad(x0)
    for i in range(poisson_small.n):
        expected = poisson_small.component_grad(i, x0) - full
        np.testing.assert_allclose(est.compute_e(poisson_small, i, x0), expected, atol=1e-12)


@pytest.mark.parametrize("variant", ["none", "saga", "lsvrg", "svrp"])
def test_enumeration_mean_is_zero(variant, poisson_small, rng):
    x = rng.uniform(0.5, 2.0, poisson_small.d)
    est = _make(variant, poisson_small, np.ones(poisson_small.d), lsvrg_p=0.5, svrp_m=4)
    for _ in range(7):
        i = int(rng.integers(poisson_small.n))
        est.update(poisson_small, i, rng.uniform(0.5, 2.0, poisson_small.d))
    mean = np.mean([est.compute_e(poisson_small, i, x) for i in range(poisson_small.n)], axis=0)
    assert np.max(np.abs(mean)) < 1e-12


def test_saga_update_idempotent(poisson_small):
    est = _make("saga", poisson_small, np.ones(poisson_small.d))
    x = np.full(poisson_small.d, 1.3)
    est.update(poisson_small, 2, x)
    table1, mean1 = est.table.copy(), est.mean.copy()
    est.update(poisson_small, 2, x)
    assert np.array_equal(est.table, table1)
    np.testing.assert_allclose(est.mean, mean1, atol=5e-16)


def test_saga_incremental_mean_after_1000_updates(rng):
    prob = make_poisson_instance(25, 6, "interpolation", seed=25)
    est = _make("saga", prob, np.ones(6))
    for _ in range(1000):
        i = int(rng.integers(prob.n))
        est.update(prob, i, rng.uniform(0.5, 2.0, 6))
    recomputed = est.table.mean(axis=0)
    assert np.max(np.abs(est.mean - recomputed)) < 1e-12


def test_saga_stores_pre_update_iterate(poisson_small):
    est = _make("saga", poisson_small, np.ones(poisson_small.d), retain_points=True)
    x_pre = np.full(poisson_small.d, 0.8)
    est.update(poisson_small, 5, x_pre)
    np.testing.assert_array_equal(est.points[5], x_pre)
    np.testing.assert_allclose(est.table[5], poisson_small.component_grad(5, x_pre))


def test_lsvrg_p1_tracks_iterate(poisson_small):
    est = _make("lsvrg", poisson_small, np.ones(poisson_small.d), lsvrg_p=1.0)
    for step in range(5):
        x = np.full(poisson_small.d, 1.0 + 0.1 * step)
        est.update(poisson_small, 0, x)
        np.testing.assert_array_equal(est.anchor, x)


def test_lsvrg_p_validation(poisson_small):
    with pytest.raises(InvalidConfig):
        _make("lsvrg", poisson_small, np.ones(poisson_small.d), lsvrg_p=1.5)


def test_svrp_epoch_anchor_moves(poisson_small):
    est = _make("svrp", poisson_small, np.ones(poisson_small.d), svrp_m=3)
    xs = [np.full(poisson_small.d, 1.0 + 0.1 * t) for t in range(3)]
    for x in xs:
        est.update(poisson_small, 0, x)
    # after one full epoch the anchor is one of the pre-update iterates
    assert any(np.array_equal(est.anchor, x) for x in xs)


def test_svrp_average_mode(poisson_small):
    est = _make("svrp", poisson_small, np.ones(poisson_small.d), svrp_m=3,
                svrp_outer="average")
    xs = [np.full(poisson_small.d, v) for v in (1.0, 2.0, 3.0)]
    for x in xs:
        est.update(poisson_small, 0, x)
    np.testing.assert_allclose(est.anchor, np.full(poisson_small.d, 2.0))


def test_update_requires_interior(poisson_small):
    est = _make("saga", poisson_small, np.ones(poisson_small.d))
    with pytest.raises(DomainViolation):
        est.update(poisson_small, 0, -np.ones(poisson_small.d))


def test_start_point_must_be_interior(poisson_small):
    with pytest.raises(DomainViolation):
        _make("saga", poisson_small, np.zeros(poisson_small.d))


def test_sigma_zero_at_ground_truth(poisson_small):
    xstar = poisson_small.minimizer_xstar
    est = _make("saga", poisson_small, xstar, retain_points=True)
    assert sigma_sq_diagnostic(est, poisson_small, BURG, xstar) == 0.0


def test_sigma_euclidean_specialization(rng):
    prob = make_quadratic_instance(10, 4, seed=10)
    xstar = prob.minimizer_xstar
    est = _make("saga", prob, np.zeros(4), retain_points=True)
    for _ in range(15):
        est.update(prob, int(rng.integers(prob.n)), rng.normal(0, 1, 4))
    got = sigma_sq_diagnostic(est, prob, EUCLID, xstar)
    # direct norm enumeration
    expected = np.mean(
        [np.sum((prob.component_grad(i, est.points[i]) - prob.component_grad(i, xstar)) ** 2)
         for i in range(prob.n)]
    )
    assert abs(got - expected) < 1e-12 * (1.0 + expected)


def test_sigma_bounded_by_component_bregman(rng):
    prob = make_poisson_instance(9, 4, "interpolation", seed=9)
    xstar = prob.minimizer_xstar
    est = _make("saga", prob, np.ones(4), retain_points=True)
    for _ in range(20):
        est.update(prob, int(rng.integers(prob.n)), rng.uniform(0.5, 2.0, 4))
    sigma = sigma_sq_diagnostic(est, prob, BURG, xstar)
    bound = sigma_sq_smoothness_bound(est, prob, xstar)
    assert sigma <= bound + 1e-9


def test_sigma_needs_reference(poisson_small):
    est = _make("saga", poisson_small, np.ones(poisson_small.d), retain_points=True)
    with pytest.raises(MissingReference):
        est.sigma_sq(poisson_small, BURG, None)


def test_sigma_vanilla_rejected(poisson_small):
    est = _make("none", poisson_small, np.ones(poisson_small.d))
    with pytest.raises(InvalidConfig):
        est.sigma_sq(poisson_small, BURG, poisson_small.minimizer_xstar)


def test_unbiasedness_battery():
    res = check_unbiasedness(states=40)
    assert res["passed"], res


def test_sigma_recursion_battery():
    res = check_sigma_recursion(states=16)
    assert res["passed"], res


def test_svrp_sigma_constant_within_epoch(rng):
    # the anchor does not move mid-epoch, so neither does the variance proxy
    prob = make_poisson_instance(6, 3, "interpolation", seed=6)
    est = _make("svrp", prob, np.ones(3), svrp_m=5, retain_points=True)
    xstar = prob.minimizer_xstar
    est.update(prob, 0, np.full(3, 1.1))
    first = est.sigma_sq(prob, BURG, xstar)
    for t in range(3):
        est.update(prob, t % prob.n, np.full(3, 1.2 + 0.1 * t))
        assert est.sigma_sq(prob, BURG, xstar) == first
