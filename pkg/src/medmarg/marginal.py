"""Mean-based and median-based marginal distribution functions.

The mean-based marginal is the prior-weighted average of the conditional
CDF,

    F_X(x) = integral of F(x | nu) pi(nu) d nu,

and the median-based marginal replaces the average by the median of the
random variable ``Y = F(x | nu)`` with ``nu ~ pi``: the smallest ``t`` with
``P(Y <= t) >= 1/2``.

Three routes compute the median marginal:

* ``closed_form`` -- hand-derived formulas for the exponential examples;
* ``monotone_fast_path`` -- when ``F(x | nu)`` is monotone in ``nu`` at
  the given ``x`` the median commutes with it, so the answer is
  ``F(x | median(nu))``;
* ``quantile_solve`` -- bisection on ``t`` where ``P(Y <= t)`` is measured
  in prior-probability space by locating the crossings of
  ``u -> F(x | Q(u)) - t`` (``Q`` the prior quantile).  Works without any
  monotonicity assumption and is used to cross-check the fast path.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .distributions import (
    ConditionalFamily,
    FamilyId,
    Monotonicity,
    PriorId,
    PriorSpec,
    as_rng,
    prior_quantile,
)
from .errors import ConvergenceError, DomainError, UnsupportedFamilyError

log = logging.getLogger(__name__)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-8
    max_subdivisions: int = 2000
    tail_mass_cutoff: float = 1e-10

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not 0 < self.tail_mass_cutoff < 1e-6:
            raise ValueError("tail_mass_cutoff must lie in (0, 1e-6)")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureConfig()


class MarginalKind(str, Enum):
    MEAN = "mean_based"
    MEDIAN = "median_based"


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    MONOTONE_FAST_PATH = "monotone_fast_path"
    QUADRATURE = "quadrature"
    QUANTILE_SOLVE = "quantile_solve"
    MONTE_CARLO_CURVE = "monte_carlo_curve"


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class _ClosedForm:
    cdf: Callable
    pdf: Callable
    ppf: Optional[Callable] = None


def _ex1_mean_cdf(x):
    x = np.asarray(x, dtype=float)
    xp = np.where(x > 0, x, 1.0)
    # 1 + (e^{-x} - 1)/x, written to stay accurate near 0
    val = 1.0 + np.expm1(-xp) / xp
    small = x < 1e-6
    val = np.where(small, x / 2 - x * x / 6, val)
    return np.where(x > 0, val, 0.0)


def _ex1_mean_pdf(x):
    x = np.asarray(x, dtype=float)
    xp = np.where(x > 0, x, 1.0)
    val = (-np.expm1(-xp) - xp * np.exp(-xp)) / (xp * xp)
    small = x < 1e-4
    val = np.where(small, 0.5 - x / 3 + x * x / 8, val)
    return np.where(x > 0, val, 0.0)


def _exp_family_cf(rate):
    return _ClosedForm(
        cdf=lambda x: np.where(np.asarray(x) > 0, -np.expm1(-rate * np.maximum(x, 0.0)), 0.0),
        pdf=lambda x: np.where(np.asarray(x) > 0, rate * np.exp(-rate * np.maximum(x, 0.0)), 0.0),
        ppf=lambda p: -np.log1p(-np.asarray(p, dtype=float)) / rate,
    )


def _laplace_cf(loc, scale):
    def cdf(x):
        z = (np.asarray(x, dtype=float) - loc) / scale
        return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0.0)),
                        1.0 - 0.5 * np.exp(-np.maximum(z, 0.0)))

    def pdf(x):
        z = np.abs(np.asarray(x, dtype=float) - loc) / scale
        return 0.5 * np.exp(-z) / scale

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return np.where(p < 0.5, loc + scale * np.log(2 * np.minimum(p, 0.5)),
                        loc - scale * np.log(2 * (1 - np.maximum(p, 0.5))))

    return _ClosedForm(cdf, pdf, ppf)


def _closed_form(kind: MarginalKind, family: ConditionalFamily,
                 prior: PriorSpec) -> Optional[_ClosedForm]:
    fid, pid = family.family_id, prior.prior_id
    if pid is PriorId.POINT_MASS and fid is not FamilyId.CUSTOM:
        nu0 = prior.params[0]
        ppf = (lambda p: family.ppf(p, nu0))
        return _ClosedForm(lambda x: family.cdf(x, nu0), lambda x: family.pdf(x, nu0), ppf)
    if fid is FamilyId.EXPONENTIAL_RATE and pid is PriorId.UNIFORM_UNIT:
        if kind is MarginalKind.MEDIAN:
            return _exp_family_cf(0.5)                      # 1 - e^{-x/2}
        return _ClosedForm(_ex1_mean_cdf, _ex1_mean_pdf)   # 1 + (e^{-x} - 1)/x
    if fid is FamilyId.EXPONENTIAL_RATE and pid is PriorId.EXPONENTIAL_UNIT:
        if kind is MarginalKind.MEDIAN:
            return _exp_family_cf(LN2)                      # 1 - 2^{-x}
        return _ClosedForm(
            cdf=lambda x: np.where(np.asarray(x) > 0, 1.0 - 1.0 / (np.maximum(x, 0.0) + 1.0), 0.0),
            pdf=lambda x: np.where(np.asarray(x) > 0, 1.0 / (np.maximum(x, 0.0) + 1.0) ** 2, 0.0),
            ppf=lambda p: 1.0 / (1.0 - np.asarray(p, dtype=float)) - 1.0,
        )
    if (fid is FamilyId.NORMAL_MEAN_VAR and pid is PriorId.EXPONENTIAL_UNIT
            and kind is MarginalKind.MEAN):
        # normal scale mixture with Exp(1) variance is Laplace(theta, 1/sqrt 2)
        return _laplace_cf(family.theta, 1.0 / math.sqrt(2.0))
    return None


def has_closed_form(kind, family, prior) -> bool:
    return _closed_form(MarginalKind(kind), family, prior) is not None


def _is_globally_monotone(family: ConditionalFamily) -> bool:
    return family.monotonicity_tag is not Monotonicity.UNKNOWN


# ---------------------------------------------------------------------------
# mean-based marginal


def _quad(func, lo, hi, cfg: QuadratureConfig, operation: str, points=None) -> float:
    out = integrate.quad(func, lo, hi, epsabs=cfg.abs_tol, epsrel=1e-10,
                         limit=cfg.max_subdivisions, points=points, full_output=1)
    if len(out) > 3:
        ier = out[2].get("last", None)
        raise ConvergenceError(f"{operation}: quadrature did not converge "
                               f"({out[3].splitlines()[0]}, last={ier})", operation)
    return float(out[0])


def _nu_breakpoints(family: ConditionalFamily, prior: PriorSpec, lo, hi):
    """Interior points where the integrand changes scale quickly."""
    if prior.prior_id is PriorId.EXPONENTIAL_UNIT:
        pts = [p for p in (1.0, 5.0) if lo < p < hi]
        return pts or None
    return None


def _mean_quadrature(integrand_x, family, prior, x, cfg, operation):
    if prior.is_degenerate:
        return float(integrand_x(x, prior.params[0]))
    lo, hi = prior.support(cfg.tail_mass_cutoff)
    val = _quad(lambda nu: float(integrand_x(x, nu) * prior.pdf(nu)), lo, hi, cfg,
                operation, points=_nu_breakpoints(family, prior, lo, hi))
    return val


def _mean_quadrature_vec(integrand, family, prior, xs, cfg, operation):
    """Vector-valued version of :func:`_mean_quadrature` (one adaptive pass for all ``xs``)."""
    xs = np.asarray(xs, dtype=float)
    if prior.is_degenerate:
        return np.asarray(integrand(xs, prior.params[0]), dtype=float)
    lo, hi = prior.support(cfg.tail_mass_cutoff)
    res = integrate.quad_vec(lambda nu: integrand(xs, nu) * prior.pdf(nu), lo, hi,
                             epsabs=cfg.abs_tol, epsrel=1e-10, norm="max",
                             limit=cfg.max_subdivisions,
                             points=_nu_breakpoints(family, prior, lo, hi), full_output=True)
    if not res[2].success or not np.all(np.isfinite(res[0])):
        raise ConvergenceError(f"{operation}: vector quadrature did not converge", operation)
    return res[0]


def mean_marginal_cdf(family: ConditionalFamily, prior: PriorSpec, x: float,
                      cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Prior-weighted mean of ``F(x | nu)`` by adaptive quadrature.

    Unbounded prior supports are truncated where the remaining prior mass
    drops below ``cfg.tail_mass_cutoff``.  A point-mass prior short-cuts to
    the conditional CDF.
    """
    val = _mean_quadrature(lambda xx, nu: family.cdf(xx, nu), family, prior, x, cfg,
                           "mean_marginal_cdf")
    return min(max(val, 0.0), 1.0)


def mean_marginal_density(family: ConditionalFamily, prior: PriorSpec, x: float,
                          cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Prior-weighted mean of the conditional density (derivative under the integral)."""
    val = _mean_quadrature(lambda xx, nu: family.pdf(xx, nu), family, prior, x, cfg,
                           "mean_marginal_density")
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# median-based marginal


def _prob_y_le(u, g, t, gfun):
    """Prior mass of ``{u : g(u) <= t}`` given ``g`` tabulated on grid ``u``.

    ``u`` covers ``[c, 1 - c]``; the two tails of mass ``c`` take the sign of
    the nearest grid value.  Cells where ``g - t`` changes sign are split at
    the crossing found by Brent's method.  Crossings that begin and end
    inside a single cell are below the grid resolution and are missed.
    """
    h = g - t
    below = h <= 0
    mass = u[0] * below[0] + (1.0 - u[-1]) * below[-1]
    both = below[:-1] & below[1:]
    widths = np.diff(u)
    mass += float(np.sum(widths[both]))
    for i in np.flatnonzero(below[:-1] != below[1:]):
        a, b = u[i], u[i + 1]
        try:
            root = optimize.brentq(lambda v: gfun(v) - t, a, b, xtol=1e-15, rtol=1e-14)
        except ValueError as exc:
            raise UnsupportedFamilyError(
                f"could not resolve the nu-region near u={a:.6g}: {exc}",
                "median_marginal_cdf") from exc
        mass += (root - a) if below[i] else (b - root)
    return mass


def median_by_quantile_solve(family: ConditionalFamily, prior: PriorSpec, x: float,
                             cfg: QuadratureConfig = DEFAULT_QUAD,
                             n_grid: int = 4097, tol: float = 1e-13) -> float:
    """Lower median of ``Y = F(x | nu)`` by bisection on ``t``.

    No monotonicity in ``nu`` is assumed.  ``P(Y <= t)`` is the Lebesgue
    measure of ``{u in (0,1) : F(x | Q(u)) <= t}``.
    """
    c = cfg.tail_mass_cutoff
    u = np.linspace(c, 1.0 - c, n_grid)

    def gfun(v):
        return float(family.cdf(x, prior.ppf(v)))

    g = np.asarray(family.cdf(x, prior.ppf(u)), dtype=float)
    if not np.all(np.isfinite(g)):
        raise UnsupportedFamilyError("conditional CDF is not finite on the prior support",
                                     "median_marginal_cdf")
    lo, hi = 0.0, 1.0
    # the sorted tabulation brackets the median to within a few grid cells
    gs = np.sort(g)
    k = n_grid // 2
    lo_guess = gs[max(k - 3, 0)]
    hi_guess = gs[min(k + 3, n_grid - 1)]
    if _prob_y_le(u, g, lo_guess, gfun) < 0.5:
        lo = lo_guess
    if _prob_y_le(u, g, hi_guess, gfun) >= 0.5:
        hi = hi_guess
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _prob_y_le(u, g, mid, gfun) >= 0.5:
            hi = mid
        else:
            lo = mid
    else:  # pragma: no cover - bisection on [0, 1] halves 200 times
        raise ConvergenceError("median bisection did not converge", "median_marginal_cdf")
    return hi


def median_marginal_cdf(family: ConditionalFamily, prior: PriorSpec, x: float,
                        cfg: QuadratureConfig = DEFAULT_QUAD,
                        method: Optional[str] = None) -> float:
    """Median over the prior of ``F(x | nu)``.

    ``method=None`` dispatches to the monotone fast path whenever the family
    is monotone in ``nu`` at ``x`` (constant counts), otherwise to
    ``quantile_solve``.  Passing ``"quantile_solve"`` forces the bisection.
    """
    if method is not None and Method(method) is Method.QUANTILE_SOLVE:
        return median_by_quantile_solve(family, prior, x, cfg)
    direction = family.direction_at(x)
    if direction is Monotonicity.UNKNOWN:
        if method is not None and Method(method) is Method.MONOTONE_FAST_PATH:
            raise UnsupportedFamilyError(
                "fast path requested but the family is not monotone in nu",
                "median_marginal_cdf")
        return median_by_quantile_solve(family, prior, x, cfg)
    return float(family.cdf(x, prior_quantile(prior, 0.5)))


# ---------------------------------------------------------------------------
# realised marginals


class _ClampCounter:
    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0

    def bump(self):
        with self._lock:
            self.count += 1
            n = self.count
        if n == 1 or n % 1000 == 0:
            log.warning("clamped %d small negative density estimates to 0", n)


NEGATIVE_DENSITY_CLAMPS = _ClampCounter()


def _fd_step(x):
    return max(1e-5, 1e-5 * abs(x))


def _scalar_or_array(fn, x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return float(fn(float(arr)))
    return np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)


@dataclass(frozen=True)
class MarginalCdf:
    """A realised marginal distribution function of ``X``.

    Build one with :func:`mean_marginal` / :func:`median_marginal`, or from a
    Monte Carlo curve with :func:`marginal_from_curve`.
    """

    kind: MarginalKind
    method: Method
    family: ConditionalFamily
    prior: PriorSpec
    cfg: QuadratureConfig = DEFAULT_QUAD
    curve: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def theta(self) -> Optional[float]:
        return self.family.theta

    @property
    def label(self) -> str:
        return f"{self.kind.value}[{self.family.family_id.value}|{self.prior.label}]"

    def with_theta(self, theta: float) -> "MarginalCdf":
        """The same marginal with the family re-located at ``theta``."""
        if self.method is Method.MONTE_CARLO_CURVE:
            raise DomainError("Monte Carlo curves cannot be re-located")
        return replace(self, family=self.family.with_theta(theta))

    @property
    def _nu_median(self) -> float:
        return prior_quantile(self.prior, 0.5)

    def _cf(self):
        return _closed_form(self.kind, self.family, self.prior)

    # -- CDF ---------------------------------------------------------------
    def cdf(self, x):
        m = self.method
        if m is Method.CLOSED_FORM:
            return _as_float(self._cf().cdf(x))
        if m is Method.MONOTONE_FAST_PATH:
            return _as_float(self.family.cdf(x, self._nu_median))
        if m is Method.QUADRATURE:
            if np.ndim(x) == 0:
                return mean_marginal_cdf(self.family, self.prior, float(x), self.cfg)
            vals = _mean_quadrature_vec(lambda xx, nu: self.family.cdf(xx, nu), self.family,
                                        self.prior, np.ravel(x), self.cfg, "mean_marginal_cdf")
            return np.clip(vals, 0.0, 1.0).reshape(np.shape(x))
        if m is Method.QUANTILE_SOLVE:
            return _scalar_or_array(
                lambda v: median_marginal_cdf(self.family, self.prior, v, self.cfg,
                                              method=Method.QUANTILE_SOLVE), x)
        xs, vals = self.curve
        return _as_float(np.interp(x, xs, vals))

    __call__ = cdf

    # -- density -----------------------------------------------------------
    def pdf(self, x, difference: bool = False):
        """Marginal density.

        Closed-form and fast-path marginals differentiate analytically.
        Mean marginals integrate the conditional density over the prior
        unless ``difference=True``.  Everything else uses a central
        difference with step ``max(1e-5, 1e-5 |x|)``.
        """
        m = self.method
        if not difference:
            if m is Method.CLOSED_FORM:
                return _as_float(self._cf().pdf(x))
            if m is Method.MONOTONE_FAST_PATH:
                return _as_float(self.family.pdf(x, self._nu_median))
            if m is Method.QUADRATURE:
                if np.ndim(x) == 0:
                    return mean_marginal_density(self.family, self.prior, float(x), self.cfg)
                vals = _mean_quadrature_vec(lambda xx, nu: self.family.pdf(xx, nu), self.family,
                                            self.prior, np.ravel(x), self.cfg,
                                            "mean_marginal_density")
                return np.maximum(vals, 0.0).reshape(np.shape(x))
        return _scalar_or_array(self._central_difference, x)

    def _central_difference(self, x: float) -> float:
        h = _fd_step(x)
        d = (float(self.cdf(x + h)) - float(self.cdf(x - h))) / (2 * h)
        if d < 0:
            NEGATIVE_DENSITY_CLAMPS.bump()
            d = 0.0
        return d

    # -- quantile ----------------------------------------------------------
    def ppf(self, p):
        """Lower quantile ``inf{x : F(x) >= p}``."""
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr <= 0) | (p_arr >= 1)):
            raise DomainError("quantile level must lie in (0, 1)")
        m = self.method
        if m is Method.MONOTONE_FAST_PATH and self.family.family_id is not FamilyId.CUSTOM:
            return _as_float(self.family.ppf(p, self._nu_median))
        if m is Method.CLOSED_FORM:
            cf = self._cf()
            if cf.ppf is not None:
                return _as_float(cf.ppf(p))
        return _scalar_or_array(self._ppf_solve, p)

    def _ppf_solve(self, p: float) -> float:
        lo, hi = self._bracket(p)
        return float(optimize.brentq(lambda v: float(self.cdf(v)) - p, lo, hi,
                                     xtol=1e-12, rtol=1e-13, maxiter=500))

    def _bracket(self, p):
        if self.method is Method.MONTE_CARLO_CURVE:
            xs = self.curve[0]
            return float(xs[0]), float(xs[-1])
        if self.family.family_id is FamilyId.EXPONENTIAL_RATE:
            center = lo = 0.0
        else:
            center = self.family.theta or 0.0
            lo = self._expand(center, -1.0, lambda v: v >= p)
        hi = self._expand(center, 1.0, lambda v: v < p)
        return lo, hi

    def _expand(self, center, sign, keep_going):
        step = 1.0
        x = center + sign * step
        while keep_going(float(self.cdf(x))):
            step *= 2
            x = center + sign * step
            if step > 1e12:
                raise ConvergenceError("could not bracket the quantile", "marginal_ppf")
        return x

    # -- sampling ----------------------------------------------------------
    def sample(self, n: int, seed=None) -> np.ndarray:
        """Draw ``n`` values of ``X`` from this marginal.

        Mean marginals draw ``nu`` from the prior and then ``X | nu`` (the
        compound model, independent of any quadrature).  Median marginals
        with a monotone family draw from ``F(. | median nu)``; others invert
        a tabulated CDF.
        """
        rng = as_rng(seed)
        if self.kind is MarginalKind.MEAN and self.method is not Method.MONTE_CARLO_CURVE:
            nu = self.prior.sample(n, rng)
            return self.family.sample(nu, n, rng)
        if (self.method in (Method.MONOTONE_FAST_PATH, Method.CLOSED_FORM)
                and self.family.family_id is not FamilyId.CUSTOM):
            return self.family.sample(self._nu_median, n, rng)
        lo, hi = float(self.ppf(1e-7)), float(self.ppf(1 - 1e-7))
        xs = np.linspace(lo, hi, 4001)
        fs = np.maximum.accumulate(np.asarray(self.cdf(xs), dtype=float))
        return np.interp(rng.random(n), fs, xs)


def _as_float(v):
    arr = np.asarray(v, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def mean_marginal(family: ConditionalFamily, prior: PriorSpec,
                  method: Optional[str] = None,
                  cfg: QuadratureConfig = DEFAULT_QUAD) -> MarginalCdf:
    """Mean-based marginal; closed form when one is known, else quadrature."""
    if method is None:
        method = Method.CLOSED_FORM if has_closed_form(MarginalKind.MEAN, family, prior) \
            else Method.QUADRATURE
    method = Method(method)
    if method is Method.CLOSED_FORM and not has_closed_form(MarginalKind.MEAN, family, prior):
        raise UnsupportedFamilyError("no closed form for this pairing", "mean_marginal")
    if method not in (Method.CLOSED_FORM, Method.QUADRATURE):
        raise ValueError(f"method {method.value} does not apply to mean marginals")
    return MarginalCdf(MarginalKind.MEAN, method, family, prior, cfg)


def median_marginal(family: ConditionalFamily, prior: PriorSpec,
                    method: Optional[str] = None,
                    cfg: QuadratureConfig = DEFAULT_QUAD) -> MarginalCdf:
    """Median-based marginal; closed form, else fast path, else quantile solve."""
    if method is None:
        if has_closed_form(MarginalKind.MEDIAN, family, prior):
            method = Method.CLOSED_FORM
        elif _is_globally_monotone(family):
            method = Method.MONOTONE_FAST_PATH
        else:
            method = Method.QUANTILE_SOLVE
    method = Method(method)
    if method is Method.CLOSED_FORM and not has_closed_form(MarginalKind.MEDIAN, family, prior):
        raise UnsupportedFamilyError("no closed form for this pairing", "median_marginal")
    if method is Method.MONOTONE_FAST_PATH and not _is_globally_monotone(family):
        raise UnsupportedFamilyError("family is not monotone in nu", "median_marginal")
    if method not in (Method.CLOSED_FORM, Method.MONOTONE_FAST_PATH, Method.QUANTILE_SOLVE):
        raise ValueError(f"method {method.value} does not apply to median marginals")
    return MarginalCdf(MarginalKind.MEDIAN, method, family, prior, cfg)


def marginal_from_curve(x_grid: Sequence[float], values: Sequence[float],
                        family: ConditionalFamily, prior: PriorSpec,
                        kind: str = MarginalKind.MEDIAN) -> MarginalCdf:
    """Wrap a tabulated curve (linear interpolation, flat outside the grid)."""
    xs = np.asarray(x_grid, dtype=float)
    vals = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    if xs.shape != vals.shape or xs.ndim != 1 or np.any(np.diff(xs) <= 0):
        raise ValueError("curve needs a strictly increasing grid and matching values")
    return MarginalCdf(MarginalKind(kind), Method.MONTE_CARLO_CURVE, family, prior,
                       curve=(xs, vals))


def marginal_pdf(marginal: MarginalCdf, x: float) -> float:
    """Density of a realised marginal at an interior point of its support."""
    if marginal.family.family_id is FamilyId.EXPONENTIAL_RATE and x == 0:
        raise DomainError("density requested at the support boundary x = 0")
    return marginal.pdf(x)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationReport:
    monotone: bool
    bounded: bool
    limits: bool
    worst_violation: float
    lower_limit_value: float
    upper_limit_value: float
    worst_decrease: float
    worst_decrease_at: Optional[float]

    @property
    def passed(self) -> bool:
        return self.monotone and self.bounded and self.limits

    def lines(self) -> list[str]:
        def flag(b):
            return "pass" if b else "FAIL"
        return [
            f"monotone={flag(self.monotone)} worst_decrease={self.worst_decrease:.3g}",
            f"bounded={flag(self.bounded)}",
            f"limits={flag(self.limits)} F(lo)={self.lower_limit_value:.9g} "
            f"F(hi)={self.upper_limit_value:.9g}",
            f"worst_violation={self.worst_violation:.3g}",
        ]


def verify_distribution_function(marginal, probe_grid: Sequence[float],
                                 far_probes: tuple[float, float],
                                 tol: float = 1e-9) -> VerificationReport:
    """Check that ``marginal`` behaves like a distribution function.

    ``marginal`` is anything callable on ``x`` (a :class:`MarginalCdf` or a
    plain function).  Violations are reported, never raised.
    """
    f = marginal.cdf if hasattr(marginal, "cdf") else marginal
    grid = np.asarray(probe_grid, dtype=float)
    vals = np.array([float(f(v)) for v in grid])
    lo_val, hi_val = float(f(far_probes[0])), float(f(far_probes[1]))

    drops = vals[:-1] - vals[1:] if len(vals) > 1 else np.zeros(0)
    worst_drop = float(drops.max()) if drops.size else 0.0
    worst_drop = max(worst_drop, 0.0)
    at = float(grid[int(np.argmax(drops))]) if drops.size and worst_drop > 0 else None

    allv = np.concatenate([vals, [lo_val, hi_val]])
    out_of_range = float(max(0.0, -allv.min(), allv.max() - 1.0))
    limit_err = max(abs(lo_val), abs(1.0 - hi_val))
    return VerificationReport(
        monotone=worst_drop <= tol,
        bounded=out_of_range <= tol,
        limits=limit_err <= tol,
        worst_violation=max(worst_drop, out_of_range, limit_err),
        lower_limit_value=lo_val,
        upper_limit_value=hi_val,
        worst_decrease=worst_drop,
        worst_decrease_at=at,
    )
