"""Location estimation from marginal likelihoods.

Two objectives over a scalar location ``theta``:

* ``mean_marginal``:   sum_i log f_X(x_i | theta)       (classical MLE)
* ``median_marginal``: sum_i log f~_X(x_i | theta)      (pseudo-MLE)

where the densities are the derivatives of the mean- and median-based
marginal CDFs.  Maximisation is a coarse scan followed by golden-section
refinement inside the best bracket.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import ConditionalFamily, PriorSpec
from .errors import EstimationError, MedmargError
from .marginal import (
    MarginalCdf,
    mean_marginal,
    median_marginal,
    verify_distribution_function,
)
from .montecarlo import substream

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
OBJECTIVES = ("mean_marginal", "median_marginal")


@dataclass(frozen=True)
class EstimationProblem:
    data: tuple
    family: ConditionalFamily
    prior: PriorSpec
    theta_bounds: tuple
    objective_kind: str = "median_marginal"

    def __post_init__(self):
        data = tuple(float(v) for v in np.ravel(self.data))
        object.__setattr__(self, "data", data)
        lo, hi = (float(b) for b in self.theta_bounds)
        object.__setattr__(self, "theta_bounds", (lo, hi))
        if not data:
            raise ValueError("estimation needs at least one observation")
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("theta_bounds must be finite with lo < hi")
        if self.objective_kind not in OBJECTIVES:
            raise ValueError(f"objective_kind must be one of {OBJECTIVES}")
        if not self.family.is_location:
            raise ValueError("estimation needs a family with a location parameter")

    def marginal(self, theta: float) -> MarginalCdf:
        fam = self.family.with_theta(theta)
        if self.objective_kind == "median_marginal":
            return median_marginal(fam, self.prior)
        return mean_marginal(fam, self.prior)

    def pointwise_log_density(self, theta: float) -> np.ndarray:
        dens = np.asarray(self.marginal(theta).pdf(np.asarray(self.data)), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(dens)

    def log_objective(self, theta: float) -> float:
        return float(np.sum(self.pointwise_log_density(theta)))


@dataclass(frozen=True)
class EstimateResult:
    theta_hat: float
    log_objective: float
    evaluations: int
    converged: bool
    zero_density_points: tuple = ()


def estimate(problem: EstimationProblem, tol: float = 1e-8, max_evaluations: int = 500,
             n_scan: int = 41, strict: bool = True) -> EstimateResult:
    """Maximise the problem's log objective over ``theta_bounds``.

    Raises :class:`EstimationError` when every scanned ``theta`` gives zero
    density to some observation, or (``strict``) when the evaluation budget
    runs out before the bracket is narrower than ``tol``.
    """
    lo, hi = problem.theta_bounds
    evals = 0

    def f(t):
        nonlocal evals
        evals += 1
        return problem.log_objective(t)

    scan = np.linspace(lo, hi, n_scan)
    values = np.array([f(t) for t in scan])
    if not np.any(np.isfinite(values)):
        raise EstimationError("all scanned parameters give zero density to some data point",
                              "estimate")
    best = int(np.argmax(values))
    a = scan[max(best - 1, 0)]
    b = scan[min(best + 1, n_scan - 1)]

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol and evals < max_evaluations:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    converged = b - a <= tol
    if not converged and strict:
        raise EstimationError(f"bracket still {b - a:.3g} wide after {evals} evaluations",
                              "estimate")
    theta_hat = 0.5 * (a + b)
    fx = f(theta_hat)
    # the bracket may sit against a bound where the objective is larger
    for edge, fe in ((scan[0], values[0]), (scan[-1], values[-1])):
        if fe > fx:
            theta_hat, fx = float(edge), float(fe)
    logs = problem.pointwise_log_density(theta_hat)
    zeros = tuple(float(x) for x, v in zip(problem.data, logs) if v == -np.inf)
    return EstimateResult(float(theta_hat), float(fx), evals, bool(converged), zeros)


def objective_slope(problem: EstimationProblem, theta: float, h: float = 1e-5) -> float:
    """Central-difference derivative of the log objective."""
    return (problem.log_objective(theta + h) - problem.log_objective(theta - h)) / (2 * h)


@dataclass(frozen=True)
class EstimatorSummary:
    name: str
    bias: float
    variance: float
    mse: float
    successes: int
    failures: int


@dataclass(frozen=True)
class StudyTable:
    true_theta: float
    N: int
    replications: int
    seed: int
    rows: tuple
    estimates: dict  # objective -> array of estimates (nan for failures)

    def row(self, name: str) -> EstimatorSummary:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def _summarise(name, est, truth):
    ok = est[np.isfinite(est)]
    if ok.size == 0:
        return EstimatorSummary(name, math.nan, math.nan, math.nan, 0, int(est.size))
    err = ok - truth
    return EstimatorSummary(name, float(err.mean()), float(ok.var(ddof=1)) if ok.size > 1 else 0.0,
                            float(np.mean(err ** 2)), int(ok.size), int(est.size - ok.size))


def simulate_data(family: ConditionalFamily, true_theta: float, nu_model: PriorSpec,
                  N: int, seed) -> np.ndarray:
    """``N`` draws of ``X`` with a fresh ``nu ~ nu_model`` per observation."""
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    nu = nu_model.sample(N, rng)
    return family.with_theta(true_theta).sample(nu, N, rng)


def simulation_study(true_theta: float, true_nu_model: PriorSpec, N: int,
                     replications: int, seed: int,
                     family: Optional[ConditionalFamily] = None,
                     prior: Optional[PriorSpec] = None,
                     tol: float = 1e-8, workers: int = 1,
                     min_replications: int = 100) -> StudyTable:
    """Bias / variance / MSE of both estimators over simulated data sets.

    Replication ``r`` uses the substream ``(seed, r)`` so results do not
    depend on ``workers``.  Bounds are the data range padded by one unit.
    Failed fits are counted and excluded from the summaries.
    """
    if replications < min_replications:
        raise ValueError(f"replications must be >= {min_replications}")
    family = family or ConditionalFamily.normal_var(0.0)
    prior = prior or true_nu_model

    guard = median_marginal(family.with_theta(true_theta), prior)
    lo_g, hi_g = float(guard.ppf(1e-9)), float(guard.ppf(1 - 1e-9))
    report = verify_distribution_function(
        guard, np.linspace(lo_g, hi_g, 200), (lo_g - 1e3, hi_g + 1e3), tol=1e-6)
    if not report.passed:
        raise EstimationError("median-marginal density is not a proper distribution",
                              "simulation_study")

    def one(r):
        data = simulate_data(family, true_theta, true_nu_model, N, substream(seed, r))
        bounds = (float(data.min()) - 1.0, float(data.max()) + 1.0)
        out = {}
        for kind in OBJECTIVES:
            problem = EstimationProblem(tuple(data), family, prior, bounds, kind)
            try:
                out[kind] = estimate(problem, tol=tol).theta_hat
            except MedmargError:
                out[kind] = math.nan
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(replications)))
    else:
        results = [one(r) for r in range(replications)]

    estimates = {k: np.array([res[k] for res in results]) for k in OBJECTIVES}
    rows = tuple(_summarise(k, estimates[k], true_theta) for k in OBJECTIVES)
    return StudyTable(float(true_theta), N, replications, seed, rows, estimates)
