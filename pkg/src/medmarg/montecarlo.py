"""Monte Carlo approximations of the marginal CDFs.

M1 / B1 take the sample median / mean of ``F(x0 | nu_k)`` over prior draws
``nu_1..nu_K``.  M2 / B2 replace the analytic ``F(x0 | nu_k)`` by the
empirical CDF of ``L`` conditional draws of ``X | nu_k``.

Reproducibility: the ``nu`` draws come from ``default_rng(seed)`` and are
shared across the whole grid (unless ``resample_per_x``).  Conditional draws
for ``nu_k`` come from an independent substream keyed on ``(seed, k)``, so
results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .distributions import ConditionalFamily, PriorSpec

# grid points evaluated per block in M1/B1 (bounds the K x G work array)
_BLOCK_CELLS = 4_000_000


class Algorithm(str, Enum):
    M1 = "M1"
    M2 = "M2"
    B1 = "B1"
    B2 = "B2"

    @property
    def uses_median(self) -> bool:
        return self in (Algorithm.M1, Algorithm.M2)

    @property
    def uses_empirical(self) -> bool:
        return self in (Algorithm.M2, Algorithm.B2)


@dataclass(frozen=True)
class McConfig:
    K: int
    x_grid: tuple
    seed: int = 0
    L: Optional[int] = None
    resample_per_x: bool = False
    isotonic: bool = False

    def __post_init__(self):
        grid = tuple(float(v) for v in self.x_grid)
        object.__setattr__(self, "x_grid", grid)
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.L is not None and self.L < 2:
            raise ValueError("L must be at least 2")
        if len(grid) < 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("x_grid must be strictly increasing")

    @property
    def conditional_draws(self) -> int:
        # L defaults to K when unset
        return self.K if self.L is None else self.L


@dataclass(frozen=True)
class ApproxCurve:
    x_grid: np.ndarray
    values: np.ndarray
    algorithm: Algorithm
    config: McConfig = field(repr=False)

    def sup_distance(self, f) -> float:
        """Sup-norm distance on the grid to a reference CDF ``f``."""
        ref = np.asarray(f(self.x_grid), dtype=float)
        return float(np.max(np.abs(self.values - ref)))


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function ``#{samples <= x} / n``."""

    sorted_samples: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalCdf":
        s = np.sort(np.asarray(samples, dtype=float))
        if s.size == 0:
            raise ValueError("empirical CDF needs at least one sample")
        return cls(s)

    def __call__(self, x):
        idx = np.searchsorted(self.sorted_samples, x, side="right")
        out = idx / self.sorted_samples.size
        return float(out) if np.ndim(out) == 0 else out


def sample_median(values) -> float:
    """Middle order statistic; midpoint of the two central ones for even n."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("sample_median of an empty sequence")
    return float(np.median(v))


def isotonic_projection(values, weights=None) -> np.ndarray:
    """Least-squares non-decreasing fit (pool adjacent violators)."""
    y = np.asarray(values, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    means: list[float] = []
    wts: list[float] = []
    sizes: list[int] = []
    for yi, wi in zip(y, w):
        means.append(float(yi))
        wts.append(float(wi))
        sizes.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, w2, n2 = means.pop(), wts.pop(), sizes.pop()
            tot = wts[-1] + w2
            means[-1] = (means[-1] * wts[-1] + m2 * w2) / tot
            wts[-1] = tot
            sizes[-1] += n2
    return np.repeat(means, sizes)


def substream(seed: int, k: int) -> np.random.Generator:
    """Independent generator for the ``k``-th conditional draw set."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))


def _reduce(matrix, use_median: bool):
    # matrix is K x G; reduce over draws
    return np.median(matrix, axis=0) if use_median else np.mean(matrix, axis=0)


def curve_from_nu_draws(family: ConditionalFamily, nu, x_grid, use_median: bool = True):
    """Reduce ``F(x | nu_k)`` over the supplied draws at each grid point."""
    nu = np.asarray(nu, dtype=float)
    grid = np.asarray(x_grid, dtype=float)
    out = np.empty(grid.size)
    block = max(1, _BLOCK_CELLS // max(nu.size, 1))
    for start in range(0, grid.size, block):
        xs = grid[start:start + block]
        vals = family.cdf(xs[None, :], nu[:, None])
        out[start:start + block] = _reduce(vals, use_median)
    return out


def _analytic_curve(family, prior, cfg: McConfig, use_median: bool):
    grid = np.asarray(cfg.x_grid)
    if not cfg.resample_per_x:
        nu = prior.sample(cfg.K, cfg.seed)
        return curve_from_nu_draws(family, nu, grid, use_median)
    rng = np.random.default_rng(cfg.seed)
    out = np.empty(grid.size)
    for i, x0 in enumerate(grid):
        nu = prior.sample(cfg.K, rng)
        vals = family.cdf(x0, nu)
        out[i] = sample_median(vals) if use_median else float(np.mean(vals))
    return out


def empirical_cdf_matrix(family: ConditionalFamily, nu, L: int, seed: int, x_grid):
    """``K x G`` matrix of empirical CDFs of ``L`` draws of ``X | nu_k`` on the grid."""
    grid = np.asarray(x_grid, dtype=float)
    nu = np.asarray(nu, dtype=float)
    out = np.empty((nu.size, grid.size))
    for k, nu_k in enumerate(nu):
        draws = family.sample(nu_k, L, substream(seed, k))
        out[k] = EmpiricalCdf.from_samples(draws)(grid)
    return out


def _empirical_curve(family, prior, cfg: McConfig, use_median: bool):
    grid = np.asarray(cfg.x_grid)
    L = cfg.conditional_draws
    if not cfg.resample_per_x:
        nu = prior.sample(cfg.K, cfg.seed)
        return _reduce(empirical_cdf_matrix(family, nu, L, cfg.seed, grid), use_median)
    rng = np.random.default_rng(cfg.seed)
    out = np.empty(grid.size)
    for i, x0 in enumerate(grid):
        nu = prior.sample(cfg.K, rng)
        col = empirical_cdf_matrix(family, nu, L, cfg.seed + i + 1, [x0])[:, 0]
        out[i] = sample_median(col) if use_median else float(np.mean(col))
    return out


def run_algorithm(algorithm, family: ConditionalFamily, prior: PriorSpec,
                  cfg: McConfig) -> ApproxCurve:
    alg = Algorithm(algorithm)
    if alg.uses_empirical:
        values = _empirical_curve(family, prior, cfg, alg.uses_median)
    else:
        values = _analytic_curve(family, prior, cfg, alg.uses_median)
    if cfg.isotonic:
        values = isotonic_projection(values)
    values = np.clip(values, 0.0, 1.0)
    return ApproxCurve(np.asarray(cfg.x_grid), values, alg, cfg)


def algorithm_m1(family: ConditionalFamily, prior: PriorSpec, cfg: McConfig) -> ApproxCurve:
    """Median of analytic conditional CDFs over ``K`` prior draws."""
    return run_algorithm(Algorithm.M1, family, prior, cfg)


def algorithm_m2(family: ConditionalFamily, prior: PriorSpec, cfg: McConfig) -> ApproxCurve:
    """Median of ``K`` empirical CDFs, each from ``L`` conditional draws."""
    return run_algorithm(Algorithm.M2, family, prior, cfg)


def algorithm_b1(family: ConditionalFamily, prior: PriorSpec, cfg: McConfig) -> ApproxCurve:
    return run_algorithm(Algorithm.B1, family, prior, cfg)


def algorithm_b2(family: ConditionalFamily, prior: PriorSpec, cfg: McConfig) -> ApproxCurve:
    return run_algorithm(Algorithm.B2, family, prior, cfg)


def contaminate(nu, fraction: float, scale: float, seed) -> np.ndarray:
    """Replace a random ``fraction`` of the draws by ``scale`` times themselves."""
    nu = np.array(nu, dtype=float)
    rng = np.random.default_rng(seed)
    n_bad = int(round(fraction * nu.size))
    idx = rng.choice(nu.size, size=n_bad, replace=False)
    nu[idx] *= scale
    return nu


def grid(lo: float, hi: float, points: int) -> tuple:
    if points < 2:
        raise ValueError("a grid needs at least two points")
    return tuple(np.linspace(lo, hi, points))


def sup_errors_over_seeds(algorithm, family, prior, reference, K: int, seeds: Sequence[int],
                          x_grid, L: Optional[int] = None) -> np.ndarray:
    """Sup-norm distance to ``reference`` for each seed."""
    out = []
    for s in seeds:
        cfg = McConfig(K=K, L=L, seed=int(s), x_grid=tuple(x_grid))
        out.append(run_algorithm(algorithm, family, prior, cfg).sup_distance(reference))
    return np.asarray(out)
