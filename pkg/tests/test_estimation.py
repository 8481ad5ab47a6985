import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medmarg import (
    ConditionalFamily,
    EstimationError,
    EstimationProblem,
    PriorSpec,
    estimate,
    simulation_study,
)
from medmarg.estimation import objective_slope, simulate_data

NVAR = ConditionalFamily.normal_var(0.0)
NSD = ConditionalFamily.normal_sd(0.0)
EXPP = PriorSpec.exponential()
UNIF = PriorSpec.uniform()
TOL = 1e-6


def problem(data, prior=EXPP, kind="median_marginal", family=NVAR, bounds=(-5.0, 5.0)):
    return EstimationProblem(tuple(data), family, prior, bounds, kind)


class TestEstimate:
    def test_point_mass_sample_mean(self):
        r = estimate(problem([-1, 0, 1], prior=PriorSpec.point(1.0), kind="mean_marginal"))
        assert r.converged
        assert r.theta_hat == pytest.approx(0.0, abs=1e-7)

    def test_median_objective_exp_on_variance(self):
        r = estimate(problem([-1, 0, 1]))
        assert r.theta_hat == pytest.approx(0.0, abs=1e-7)
        # f~ is the N(theta, ln 2) density
        expect = sum(-0.5 * math.log(2 * math.pi * math.log(2)) - x * x / (2 * math.log(2))
                     for x in (-1, 0, 1))
        assert r.log_objective == pytest.approx(expect, rel=1e-10)

    @pytest.mark.parametrize("kind", ["mean_marginal", "median_marginal"])
    @pytest.mark.parametrize("family", [NVAR, NSD])
    @pytest.mark.parametrize("prior", [EXPP, UNIF])
    def test_single_point(self, kind, family, prior):
        r = estimate(problem([1.3], prior=prior, kind=kind, family=family), tol=TOL)
        assert r.theta_hat == pytest.approx(1.3, abs=2 * TOL)

    def test_median_objective_gives_sample_mean(self):
        data = [-0.4, 0.3, 2.0, 2.2, -1.1]
        for fam in (NVAR, NSD):
            r = estimate(problem(data, family=fam), tol=TOL)
            assert r.theta_hat == pytest.approx(np.mean(data), abs=TOL)

    def test_laplace_mean_objective_gives_sample_median(self):
        # the exp-on-variance mean marginal is Laplace; its MLE is the sample median
        data = [-0.4, 0.3, 2.0, 2.2, -1.1]
        r = estimate(problem(data, kind="mean_marginal"), tol=TOL)
        assert r.theta_hat == pytest.approx(0.3, abs=TOL)

    @pytest.mark.parametrize("family", [NVAR, NSD])
    @pytest.mark.parametrize("prior", [EXPP, UNIF, PriorSpec.point(0.7)])
    def test_gradient_vanishes(self, family, prior):
        p = problem([-0.8, 0.1, 0.5, 1.9], prior=prior, family=family)
        r = estimate(p, tol=TOL)
        assert r.converged
        assert abs(objective_slope(p, r.theta_hat)) <= 10 * TOL

    @pytest.mark.parametrize("kind", ["mean_marginal", "median_marginal"])
    def test_scaling(self, kind):
        data = np.array([-0.8, 0.1, 0.5, 1.9, 0.2])
        c = 3.0
        base = estimate(problem(data, prior=PriorSpec.point(1.0), kind=kind), tol=TOL)
        scaled = estimate(problem(c * data, prior=PriorSpec.point(c * c), kind=kind,
                                  bounds=(-5 * c, 5 * c)), tol=TOL)
        assert scaled.theta_hat == pytest.approx(c * base.theta_hat, abs=2 * c * TOL)

    def test_scaling_median_objective(self):
        # median marginal is N(theta, ln 2): its maximiser is the sample mean at any scale
        data = np.array([-0.8, 0.1, 0.5, 1.9, 0.2])
        for c in (0.1, 3.0, 20.0):
            r = estimate(problem(c * data, bounds=(-5 * c, 5 * c)), tol=TOL * c)
            assert r.theta_hat == pytest.approx(c * data.mean(), abs=2 * c * TOL)

    def test_point_mass_objectives_coincide(self):
        data = [0.3, -1.2, 2.4, 0.9]
        prior = PriorSpec.point(2.0)
        a = estimate(problem(data, prior=prior, kind="mean_marginal"), tol=TOL)
        b = estimate(problem(data, prior=prior, kind="median_marginal"), tol=TOL)
        assert abs(a.theta_hat - b.theta_hat) <= 2 * TOL

    def test_solution_on_bound(self):
        r = estimate(problem([4.0, 4.2], bounds=(-1.0, 1.0)), tol=TOL)
        assert r.theta_hat == pytest.approx(1.0, abs=TOL)

    def test_all_zero_density(self):
        p = problem([0.0, 1000.0], prior=PriorSpec.point(0.01), bounds=(-1.0, 1.0))
        with pytest.raises(EstimationError):
            estimate(p)

    def test_zero_density_points_reported(self):
        p = problem([0.0, 1000.0], prior=PriorSpec.point(0.01), bounds=(-1.0, 1.0))
        assert p.log_objective(0.0) == -math.inf
        assert np.isneginf(p.pointwise_log_density(0.0)).tolist() == [False, True]

    def test_budget_exhausted(self):
        p = problem([0.1, 0.4])
        with pytest.raises(EstimationError):
            estimate(p, tol=1e-14, max_evaluations=50)
        r = estimate(p, tol=1e-14, max_evaluations=50, strict=False)
        assert not r.converged
        assert r.theta_hat == pytest.approx(0.25, abs=0.02)

    @pytest.mark.parametrize("kwargs", [dict(data=()), dict(bounds=(1.0, 1.0)),
                                        dict(bounds=(-math.inf, 1.0)), dict(kind="bogus"),
                                        dict(family=ConditionalFamily.exponential())])
    def test_invalid_problem(self, kwargs):
        args = dict(data=(0.0,), prior=EXPP, kind="median_marginal", family=NVAR, bounds=(-1, 1))
        args.update(kwargs)
        with pytest.raises(ValueError):
            problem(**args)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8))
def test_median_estimate_is_sample_mean(data):
    r = estimate(problem(data), tol=TOL)
    assert r.theta_hat == pytest.approx(float(np.mean(data)), abs=2 * TOL)


class TestSimulationStudy:
    def test_minimum_replications(self):
        with pytest.raises(ValueError):
            simulation_study(0.0, EXPP, N=10, replications=99, seed=0)

    def test_boundary_single_observation(self):
        table = simulation_study(0.0, EXPP, N=1, replications=100, seed=1)
        for name in ("mean_marginal", "median_marginal"):
            row = table.row(name)
            assert row.successes + row.failures == 100
            assert math.isfinite(row.variance) and row.variance > 0.1
        with pytest.raises(KeyError):
            table.row("other")

    def test_bias_small(self):
        table = simulation_study(0.0, EXPP, N=50, replications=200, seed=7)
        for row in table.rows:
            assert abs(row.bias) < 0.05
            assert math.isfinite(row.mse)
            assert row.mse == pytest.approx(row.bias ** 2 + row.variance * 199 / 200, rel=1e-9)

    def test_point_mass_estimators_coincide(self):
        table = simulation_study(0.5, PriorSpec.point(1.0), N=20, replications=100, seed=2, tol=TOL)
        a, b = table.estimates["mean_marginal"], table.estimates["median_marginal"]
        assert np.all(np.abs(a - b) <= 2 * TOL)

    def test_deterministic_and_worker_independent(self):
        a = simulation_study(0.0, EXPP, N=10, replications=100, seed=3)
        b = simulation_study(0.0, EXPP, N=10, replications=100, seed=3, workers=4)
        for k in a.estimates:
            np.testing.assert_array_equal(a.estimates[k], b.estimates[k])

    def test_simulated_data_reproducible(self):
        x1 = simulate_data(NVAR, 2.0, EXPP, 500, 11)
        x2 = simulate_data(NVAR, 2.0, EXPP, 500, 11)
        np.testing.assert_array_equal(x1, x2)
        assert abs(np.mean(x1) - 2.0) < 0.2
