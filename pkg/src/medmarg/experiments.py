"""Curves behind the four figures: exact vs Monte Carlo marginals, power functions."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .distributions import ConditionalFamily, PriorSpec
from .marginal import mean_marginal, median_marginal
from .montecarlo import McConfig, grid, run_algorithm
from .power import normal_mean_tests, power_curve, ump_known_sigma

FIG12_GRID = (0.0, 10.0, 201)
FIG34_GRID = (-3.0, 0.0, 61)
KNOWN_SIGMAS = (0.4, 1.0)

EXAMPLE_PRIORS = {1: PriorSpec.uniform(), 2: PriorSpec.exponential()}
FIG_SETTINGS = {
    3: ("uniform-on-variance", "exp-on-variance"),
    4: ("uniform-on-sd", "exp-on-sd"),
}


def marginal_curves(example: int, K: int, seed: int, L: Optional[int] = None,
                    x_grid: Sequence[float] = None, with_m2: bool = False,
                    isotonic: bool = True) -> dict:
    """``{name: values}`` on ``x_grid`` for the exponential-rate family.

    ``example`` picks the prior: 1 is uniform on (0, 1], 2 is Exp(1).

    Names: ``exact_median``, ``exact_mean``, ``m1``, ``b1`` and, with
    ``with_m2``, ``m2``, ``b2``.
    """
    fam = ConditionalFamily.exponential()
    prior = EXAMPLE_PRIORS[example]
    xs = np.asarray(x_grid if x_grid is not None else grid(*FIG12_GRID))
    curves = {
        "exact_median": np.asarray(median_marginal(fam, prior).cdf(xs)),
        "exact_mean": np.asarray(mean_marginal(fam, prior).cdf(xs)),
    }
    algs = ["M1", "B1"] + (["M2", "B2"] if with_m2 else [])
    for alg in algs:
        cfg = McConfig(K=K, L=L, seed=seed, x_grid=tuple(xs), isotonic=isotonic)
        curves[alg.lower()] = run_algorithm(alg, fam, prior, cfg).values
    return curves


def power_columns(setting: str, alpha: float, mu_grid: Sequence[float],
                  mode: str = "exact", mc_samples: int = 100_000, seed: int = 0) -> dict:
    """Power columns for one prior setting of the normal-mean problem."""
    mus = np.asarray(mu_grid, dtype=float)
    med_test, mean_test = normal_mean_tests(setting, alpha)
    cols = {
        "power_median": power_curve(med_test, mus, mode, mc_samples, seed).power,
        "power_mean": power_curve(mean_test, mus, mode, mc_samples, seed + 1).power,
    }
    for j, s in enumerate(KNOWN_SIGMAS):
        t = ump_known_sigma(s, alpha)
        cols[f"power_known_sigma_{s:g}"] = power_curve(t, mus, mode, mc_samples, seed + 2 + j).power
    return cols

