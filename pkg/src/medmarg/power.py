"""Most powerful tests on marginal densities and their power functions.

A test rejects ``H0: theta = theta0`` on a union of intervals.  For the
simple-vs-simple problem the region is ``{x : f1(x) > k f0(x)}`` with ``k``
calibrated to size ``alpha`` under the null marginal; when the density
ratio is monotone the region is a half-line whose endpoint is a null
quantile.  Power is evaluated under the test's own model re-located at each
``mu`` (or under any other model passed explicitly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .distributions import ConditionalFamily, PriorSpec, norm_ppf
from .errors import CalibrationError
from .marginal import MarginalCdf, mean_marginal, median_marginal
from .montecarlo import substream

INF = math.inf


class Variant(str, Enum):
    MEDIAN_MARGINAL = "median_marginal"
    MEAN_MARGINAL = "mean_marginal"
    KNOWN_SIGMA = "known_sigma"


@dataclass(frozen=True)
class SimpleHypothesisTest:
    theta0: float
    theta1: Optional[float]
    alpha: float
    reject_region: tuple  # ((lo, hi), ...) open intervals
    variant: Variant
    model: MarginalCdf = field(repr=False)
    threshold: Optional[float] = None
    k: Optional[float] = None

    def rejects(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.reject_region:
            out |= (x > lo) & (x < hi)
        return out

    def rejection_probability(self, model: MarginalCdf) -> float:
        total = 0.0
        for lo, hi in self.reject_region:
            f_hi = 1.0 if hi == INF else float(model.cdf(hi))
            f_lo = 0.0 if lo == -INF else float(model.cdf(lo))
            total += f_hi - f_lo
        return min(max(total, 0.0), 1.0)

    def describe(self) -> str:
        parts = []
        for lo, hi in self.reject_region:
            if lo == -INF:
                parts.append(f"x < {hi:.6g}")
            elif hi == INF:
                parts.append(f"x > {lo:.6g}")
            else:
                parts.append(f"{lo:.6g} < x < {hi:.6g}")
        return " or ".join(parts) if parts else "never"


def _left_tail(null_model: MarginalCdf, alpha: float) -> float:
    return float(null_model.ppf(alpha))


def _monotone(r, rtol=1e-9):
    d = np.diff(r)
    slack = rtol * np.max(np.abs(r))
    return bool(np.all(d <= slack)), bool(np.all(d >= -slack))


def mp_test(f0: Callable, f1: Callable, alpha: float, null_model: MarginalCdf,
            theta1: Optional[float] = None,
            variant: Variant = Variant.MEDIAN_MARGINAL,
            n_probe: int = 2000) -> SimpleHypothesisTest:
    """Most powerful size-``alpha`` test of density ``f0`` against ``f1``.

    Rejects when ``f1(x) > k f0(x)``.  With a monotone ratio the region is a
    half-line ending at the ``alpha`` (or ``1 - alpha``) null quantile.
    Otherwise ``k`` is found by bisection on the null mass of the region;
    :class:`CalibrationError` is raised when no ``k`` attains ``alpha``
    without randomisation.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    lo, hi = float(null_model.ppf(1e-6)), float(null_model.ppf(1 - 1e-6))
    xs = np.linspace(lo, hi, n_probe)
    p0 = np.asarray(f0(xs), dtype=float)
    p1 = np.asarray(f1(xs), dtype=float)
    keep = p0 > 0
    ratio = np.full_like(p0, np.inf)
    ratio[keep] = p1[keep] / p0[keep]
    finite = ratio[np.isfinite(ratio)]
    theta0 = float(null_model.theta) if null_model.theta is not None else float("nan")

    non_inc, non_dec = _monotone(finite) if np.all(np.isfinite(ratio)) else (False, False)
    if non_inc:
        c = _left_tail(null_model, alpha)
        k = float(f1(c) / f0(c)) if f0(c) > 0 else INF
        return SimpleHypothesisTest(theta0, theta1, alpha, ((-INF, c),), Variant(variant),
                                    null_model, threshold=c, k=k)
    if non_dec:
        c = float(null_model.ppf(1 - alpha))
        k = float(f1(c) / f0(c)) if f0(c) > 0 else INF
        return SimpleHypothesisTest(theta0, theta1, alpha, ((c, INF),), Variant(variant),
                                    null_model, threshold=c, k=k)
    region, k = _calibrate_ratio_region(xs, ratio, f0, f1, alpha, null_model)
    return SimpleHypothesisTest(theta0, theta1, alpha, region, Variant(variant), null_model,
                                threshold=None, k=k)


def _region_for_k(xs, ratio, f0, f1, k, refine=True):
    above = ratio > k
    runs = []
    i, n = 0, len(xs)

    def edge(a, b):
        ia = int(np.searchsorted(xs, a))
        ra, rb = ratio[ia], ratio[ia + 1]
        guess = a + (b - a) * (k - ra) / (rb - ra) if rb != ra else 0.5 * (a + b)
        if not refine:
            return guess
        g = lambda v: float(f1(v)) - k * float(f0(v))
        try:
            return optimize.brentq(g, a, b, xtol=1e-12)
        except ValueError:
            return guess

    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        left = -INF if i == 0 else edge(xs[i - 1], xs[i])
        right = INF if j == n - 1 else edge(xs[j], xs[j + 1])
        runs.append((left, right))
        i = j + 1
    return tuple(runs)


def _region_mass(region, model):
    total = 0.0
    for lo, hi in region:
        f_hi = 1.0 if hi == INF else float(model.cdf(hi))
        f_lo = 0.0 if lo == -INF else float(model.cdf(lo))
        total += f_hi - f_lo
    return total


def _calibrate_ratio_region(xs, ratio, f0, f1, alpha, null_model, tol=1e-6):
    finite = ratio[np.isfinite(ratio)]
    lo_k, hi_k = 0.0, float(np.max(finite)) if finite.size else 1.0
    # size is non-increasing in k
    for _ in range(100):
        mid = 0.5 * (lo_k + hi_k)
        size = _region_mass(_region_for_k(xs, ratio, f0, f1, mid, refine=False), null_model)
        if size > alpha:
            lo_k = mid
        else:
            hi_k = mid
        if hi_k - lo_k <= 1e-13 * max(1.0, hi_k):
            break
    # polish k against exact region edges
    def excess(k):
        return _region_mass(_region_for_k(xs, ratio, f0, f1, k), null_model) - alpha

    for widen in (1e-6, 1e-4, 1e-2):
        a, b = lo_k * (1 - widen), hi_k * (1 + widen)
        if excess(a) > 0 > excess(b):
            hi_k = optimize.brentq(excess, a, b, xtol=1e-14, rtol=1e-12)
            break
    region = _region_for_k(xs, ratio, f0, f1, hi_k)
    size = _region_mass(region, null_model)
    if abs(size - alpha) > tol:
        raise CalibrationError(
            f"density ratio has a plateau: nearest non-randomised size is {size:.6g} "
            f"for alpha={alpha:.6g}", "mp_test")
    return region, hi_k


def one_sided_test(null_model: MarginalCdf, alpha: float,
                   variant: Variant = Variant.MEDIAN_MARGINAL) -> SimpleHypothesisTest:
    """Size-``alpha`` test of ``theta = theta0`` against ``theta < theta0``: reject ``x < c``."""
    c = _left_tail(null_model, alpha)
    return SimpleHypothesisTest(float(null_model.theta), None, alpha, ((-INF, c),),
                                Variant(variant), null_model, threshold=c)


def ump_known_sigma(sigma: float, alpha: float, theta0: float = 0.0) -> SimpleHypothesisTest:
    """Reject when ``(x - theta0) / sigma < z_alpha``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    model = known_sigma_model(sigma, theta0)
    c = theta0 + sigma * float(norm_ppf(alpha))
    return SimpleHypothesisTest(theta0, None, alpha, ((-INF, c),), Variant.KNOWN_SIGMA, model,
                                threshold=c)


def known_sigma_model(sigma: float, theta: float = 0.0) -> MarginalCdf:
    return median_marginal(ConditionalFamily.normal_sd(theta), PriorSpec.point(sigma))


@dataclass(frozen=True)
class PowerCurve:
    mu_grid: np.ndarray
    power: np.ndarray
    label: str
    evaluation_mode: str
    mc_samples: int = 0

    @property
    def standard_errors(self) -> np.ndarray:
        if self.evaluation_mode != "monte_carlo":
            return np.zeros_like(self.power)
        p = self.power
        return np.sqrt(np.maximum(p * (1 - p), 0.0) / self.mc_samples)


def power_curve(test: SimpleHypothesisTest, mu_grid: Sequence[float], mode: str = "exact",
                mc_samples: int = 100_000, seed: int = 0,
                model: Optional[MarginalCdf] = None,
                label: Optional[str] = None) -> PowerCurve:
    """Rejection probability of ``test`` with the model re-located at each ``mu``.

    ``mode="exact"`` integrates the model CDF over the rejection region;
    ``mode="monte_carlo"`` draws ``mc_samples`` values per grid point from
    a substream keyed on ``(seed, index)``.
    """
    mus = np.asarray(mu_grid, dtype=float)
    if mus.size == 0:
        raise ValueError("mu_grid must not be empty")
    base = test.model if model is None else model
    if mode not in ("exact", "monte_carlo"):
        raise ValueError(f"unknown evaluation mode {mode!r}")
    power = np.empty(mus.size)
    for i, mu in enumerate(mus):
        m = base.with_theta(float(mu))
        if mode == "exact":
            power[i] = test.rejection_probability(m)
        else:
            draws = m.sample(mc_samples, substream(seed, i))
            power[i] = float(np.mean(test.rejects(draws)))
    return PowerCurve(mus, power, label or test.variant.value, mode,
                      mc_samples if mode == "monte_carlo" else 0)


@dataclass(frozen=True)
class DominanceReport:
    differences: np.ndarray
    margin: np.ndarray
    a_better: int
    b_better: int
    verdict: str  # a_dominates | b_dominates | crossing | tie

    @property
    def tie(self) -> bool:
        return self.verdict == "tie"


def compare_power(curve_a: PowerCurve, curve_b: PowerCurve, z: float = 3.0) -> DominanceReport:
    """Pointwise comparison of two power curves on a common grid.

    A point counts for one side only when the difference exceeds ``z``
    combined Monte Carlo standard errors (a 1e-12 floor for exact curves).
    """
    if curve_a.mu_grid.shape != curve_b.mu_grid.shape or not np.allclose(
            curve_a.mu_grid, curve_b.mu_grid, rtol=0, atol=1e-12):
        raise ValueError("power curves are on different grids")
    diff = curve_a.power - curve_b.power
    se = np.sqrt(curve_a.standard_errors ** 2 + curve_b.standard_errors ** 2)
    margin = np.maximum(z * se, 1e-12)
    a_better = int(np.sum(diff > margin))
    b_better = int(np.sum(-diff > margin))
    if a_better and not b_better:
        verdict = "a_dominates"
    elif b_better and not a_better:
        verdict = "b_dominates"
    elif not a_better and not b_better:
        verdict = "tie"
    else:
        verdict = "crossing"
    return DominanceReport(diff, margin, a_better, b_better, verdict)


# ---------------------------------------------------------------------------
# the one-observation normal-mean setting with a prior on the variance or sd

PRIOR_SETTINGS = {
    "uniform-on-variance": ("variance", "uniform"),
    "exp-on-variance": ("variance", "exponential"),
    "uniform-on-sd": ("sd", "uniform"),
    "exp-on-sd": ("sd", "exponential"),
}


def normal_mean_models(setting: str, theta: float = 0.0):
    """``(median_marginal, mean_marginal)`` of ``N(theta, .)`` under a named prior."""
    scale, prior_name = PRIOR_SETTINGS[setting]
    prior = PriorSpec.uniform() if prior_name == "uniform" else PriorSpec.exponential()
    fam = (ConditionalFamily.normal_var(theta) if scale == "variance"
           else ConditionalFamily.normal_sd(theta))
    return median_marginal(fam, prior), mean_marginal(fam, prior)


def normal_mean_tests(setting: str, alpha: float = 0.05):
    """Left-tail tests of ``mu = 0`` vs ``mu < 0`` from both marginals."""
    med, mean = normal_mean_models(setting)
    return (one_sided_test(med, alpha, Variant.MEDIAN_MARGINAL),
            one_sided_test(mean, alpha, Variant.MEAN_MARGINAL))
