"""Conditional families F(x | nu) and priors pi(nu).

Everything here is vectorised over ``x`` and ``nu`` with numpy broadcasting
and immutable after construction.  Samplers take an explicit seed (or a
``numpy.random.Generator``) and hold no state of their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DomainError, InvalidParameterError

SQRT_2PI = math.sqrt(2.0 * math.pi)


def norm_cdf(z):
    """Standard normal CDF (Cephes ``ndtr``, ~1e-16 absolute)."""
    return special.ndtr(z)


def norm_ppf(p):
    """Standard normal quantile (Cephes ``ndtri``)."""
    return special.ndtri(p)


def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z) / SQRT_2PI


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class FamilyId(str, Enum):
    EXPONENTIAL_RATE = "exponential_rate"
    NORMAL_MEAN_VAR = "normal_mean_var"
    NORMAL_MEAN_SD = "normal_mean_sd"
    CUSTOM = "custom"


class Monotonicity(str, Enum):
    INCREASING = "increasing_in_nu"
    DECREASING = "decreasing_in_nu"
    SIGN_SWITCHING = "sign_switching_at_theta"
    UNKNOWN = "unknown"
    # only returned by ConditionalFamily.direction_at
    CONSTANT = "constant_in_nu"


@dataclass(frozen=True)
class ConditionalFamily:
    """A parametric family ``F(x | nu)``, optionally located at ``theta``.

    ``exponential_rate``: ``F = 1 - exp(-nu x)`` for ``x > 0``.
    ``normal_mean_var``: ``N(theta, nu)``; ``nu`` is the variance.
    ``normal_mean_sd``: ``N(theta, nu**2)``; ``nu`` is the standard deviation.

    ``custom`` families supply ``cdf_fn(x, nu)``, ``pdf_fn(x, nu)`` and
    optionally ``sampler_fn(rng, nu, size)``; their monotonicity in ``nu``
    is ``unknown`` unless ``tag`` says otherwise.
    """

    family_id: FamilyId
    theta: Optional[float] = None
    cdf_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    pdf_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    sampler_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    tag: Optional[Monotonicity] = None

    def __post_init__(self):
        fid = FamilyId(self.family_id)
        object.__setattr__(self, "family_id", fid)
        if fid in (FamilyId.NORMAL_MEAN_VAR, FamilyId.NORMAL_MEAN_SD):
            theta = 0.0 if self.theta is None else float(self.theta)
            if not math.isfinite(theta):
                raise InvalidParameterError(f"theta must be finite, got {self.theta}")
            object.__setattr__(self, "theta", theta)
        elif fid is FamilyId.EXPONENTIAL_RATE:
            if self.theta is not None:
                raise InvalidParameterError("exponential_rate has no location parameter")
        elif self.cdf_fn is None or self.pdf_fn is None:
            raise InvalidParameterError("custom family needs cdf_fn and pdf_fn")

    # -- constructors -----------------------------------------------------
    @classmethod
    def exponential(cls) -> "ConditionalFamily":
        return cls(FamilyId.EXPONENTIAL_RATE)

    @classmethod
    def normal_var(cls, theta: float = 0.0) -> "ConditionalFamily":
        return cls(FamilyId.NORMAL_MEAN_VAR, theta)

    @classmethod
    def normal_sd(cls, theta: float = 0.0) -> "ConditionalFamily":
        return cls(FamilyId.NORMAL_MEAN_SD, theta)

    def with_theta(self, theta: float) -> "ConditionalFamily":
        if not self.is_location:
            raise InvalidParameterError(f"{self.family_id.value} has no location parameter")
        return replace(self, theta=float(theta))

    @property
    def is_location(self) -> bool:
        return self.family_id in (FamilyId.NORMAL_MEAN_VAR, FamilyId.NORMAL_MEAN_SD)

    @property
    def monotonicity_tag(self) -> Monotonicity:
        if self.family_id is FamilyId.EXPONENTIAL_RATE:
            return Monotonicity.INCREASING
        if self.is_location:
            return Monotonicity.SIGN_SWITCHING
        return Monotonicity(self.tag) if self.tag is not None else Monotonicity.UNKNOWN

    def direction_at(self, x: float) -> Monotonicity:
        """Direction in which ``F(x | nu)`` moves as ``nu`` grows, at fixed ``x``."""
        if self.family_id is FamilyId.EXPONENTIAL_RATE:
            return Monotonicity.INCREASING if x > 0 else Monotonicity.CONSTANT
        if self.is_location:
            if x < self.theta:
                return Monotonicity.INCREASING
            if x > self.theta:
                return Monotonicity.DECREASING
            return Monotonicity.CONSTANT
        tag = self.monotonicity_tag
        if tag in (Monotonicity.INCREASING, Monotonicity.DECREASING):
            return tag
        return Monotonicity.UNKNOWN

    # -- evaluation -------------------------------------------------------
    def _check_nu(self, nu):
        nu = np.asarray(nu, dtype=float)
        if self.family_id is not FamilyId.CUSTOM and not np.all(nu > 0):
            raise InvalidParameterError(f"{self.family_id.value} requires nu > 0")
        return nu

    def _scale(self, nu):
        return np.sqrt(nu) if self.family_id is FamilyId.NORMAL_MEAN_VAR else nu

    def cdf(self, x, nu):
        x = np.asarray(x, dtype=float)
        nu = self._check_nu(nu)
        fid = self.family_id
        if fid is FamilyId.EXPONENTIAL_RATE:
            out = -np.expm1(-nu * np.maximum(x, 0.0))
            return np.where(x > 0, out, 0.0)
        if self.is_location:
            return norm_cdf((x - self.theta) / self._scale(nu))
        return np.clip(np.asarray(self.cdf_fn(x, nu), dtype=float), 0.0, 1.0)

    def pdf(self, x, nu):
        x = np.asarray(x, dtype=float)
        nu = self._check_nu(nu)
        fid = self.family_id
        if fid is FamilyId.EXPONENTIAL_RATE:
            return np.where(x >= 0, nu * np.exp(-nu * np.maximum(x, 0.0)), 0.0)
        if self.is_location:
            s = self._scale(nu)
            return norm_pdf((x - self.theta) / s) / s
        return np.asarray(self.pdf_fn(x, nu), dtype=float)

    def ppf(self, p, nu):
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise DomainError("quantile level must lie in (0, 1)")
        nu = self._check_nu(nu)
        if self.family_id is FamilyId.EXPONENTIAL_RATE:
            return -np.log1p(-p) / nu
        if self.is_location:
            return self.theta + self._scale(nu) * norm_ppf(p)
        raise InvalidParameterError("custom families do not expose a quantile")

    def sample(self, nu, size, seed=None):
        """Draw ``size`` values of ``X | nu`` (``nu`` broadcast against ``size``)."""
        rng = as_rng(seed)
        nu = self._check_nu(nu)
        if self.family_id is FamilyId.EXPONENTIAL_RATE:
            return rng.standard_exponential(size) / nu
        if self.is_location:
            return self.theta + self._scale(nu) * rng.standard_normal(size)
        if self.sampler_fn is None:
            raise InvalidParameterError("custom family has no sampler")
        return np.asarray(self.sampler_fn(rng, nu, size), dtype=float)


def cond_cdf(family: ConditionalFamily, x, nu):
    return family.cdf(x, nu)


def cond_pdf(family: ConditionalFamily, x, nu):
    return family.pdf(x, nu)


class PriorId(str, Enum):
    UNIFORM_UNIT = "uniform_unit"
    EXPONENTIAL_UNIT = "exponential_unit"
    POINT_MASS = "point_mass"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PriorSpec:
    """A prior on ``nu``.

    Built-ins: ``uniform_unit`` on (0, 1], ``exponential_unit`` with density
    ``exp(-nu)``, and ``point_mass`` at ``params[0]``.  A ``custom`` prior
    must provide all of ``density``, ``quantile`` and ``sampler``
    (``sampler(rng, n)``); ``cdf`` is optional.
    """

    prior_id: PriorId
    params: tuple = ()
    density: Optional[Callable] = field(default=None, compare=False, repr=False)
    quantile: Optional[Callable] = field(default=None, compare=False, repr=False)
    sampler: Optional[Callable] = field(default=None, compare=False, repr=False)
    cdf_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        pid = PriorId(self.prior_id)
        object.__setattr__(self, "prior_id", pid)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if pid is PriorId.POINT_MASS:
            if len(self.params) != 1 or not math.isfinite(self.params[0]):
                raise InvalidParameterError("point_mass needs exactly one finite location")
        elif pid is PriorId.CUSTOM:
            if self.density is None or self.quantile is None or self.sampler is None:
                raise InvalidParameterError(
                    "custom prior requires density, quantile and sampler callbacks")

    @classmethod
    def uniform(cls) -> "PriorSpec":
        return cls(PriorId.UNIFORM_UNIT)

    @classmethod
    def exponential(cls) -> "PriorSpec":
        return cls(PriorId.EXPONENTIAL_UNIT)

    @classmethod
    def point(cls, location: float) -> "PriorSpec":
        return cls(PriorId.POINT_MASS, (location,))

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.prior_id is PriorId.POINT_MASS:
            return f"point_mass({self.params[0]:g})"
        return self.prior_id.value

    @property
    def is_degenerate(self) -> bool:
        return self.prior_id is PriorId.POINT_MASS

    def pdf(self, nu):
        nu = np.asarray(nu, dtype=float)
        pid = self.prior_id
        if pid is PriorId.UNIFORM_UNIT:
            return np.where((nu > 0) & (nu <= 1), 1.0, 0.0)
        if pid is PriorId.EXPONENTIAL_UNIT:
            return np.where(nu > 0, np.exp(-np.maximum(nu, 0.0)), 0.0)
        if pid is PriorId.CUSTOM:
            return np.asarray(self.density(nu), dtype=float)
        raise InvalidParameterError("point_mass prior has no density")

    def cdf(self, nu):
        nu = np.asarray(nu, dtype=float)
        pid = self.prior_id
        if pid is PriorId.UNIFORM_UNIT:
            return np.clip(nu, 0.0, 1.0)
        if pid is PriorId.EXPONENTIAL_UNIT:
            return np.where(nu > 0, -np.expm1(-np.maximum(nu, 0.0)), 0.0)
        if pid is PriorId.POINT_MASS:
            return np.where(nu >= self.params[0], 1.0, 0.0)
        if self.cdf_fn is None:
            raise InvalidParameterError("custom prior was built without a cdf")
        return np.asarray(self.cdf_fn(nu), dtype=float)

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)) or np.any(np.isnan(p)):
            raise DomainError("prior quantile level must lie in (0, 1)")
        pid = self.prior_id
        if pid is PriorId.UNIFORM_UNIT:
            return p.copy() if p.ndim else p
        if pid is PriorId.EXPONENTIAL_UNIT:
            return -np.log1p(-p)
        if pid is PriorId.POINT_MASS:
            return np.full_like(p, self.params[0])
        return np.asarray(self.quantile(p), dtype=float)

    def sample(self, n: int, seed=None):
        if n < 1:
            raise DomainError("sample size must be >= 1")
        rng = as_rng(seed)
        pid = self.prior_id
        if pid is PriorId.UNIFORM_UNIT:
            # random() is on [0, 1); reflecting gives (0, 1]
            return 1.0 - rng.random(n)
        if pid is PriorId.EXPONENTIAL_UNIT:
            return rng.standard_exponential(n)
        if pid is PriorId.POINT_MASS:
            return np.full(n, self.params[0])
        return np.asarray(self.sampler(rng, n), dtype=float)

    def support(self, tail_mass: float = 1e-10) -> tuple[float, float]:
        """Integration range holding all but ``tail_mass`` of the prior."""
        pid = self.prior_id
        if pid is PriorId.UNIFORM_UNIT:
            return 0.0, 1.0
        if pid is PriorId.EXPONENTIAL_UNIT:
            return 0.0, -math.log(tail_mass)
        if pid is PriorId.POINT_MASS:
            return self.params[0], self.params[0]
        lo, hi = self.ppf(np.array([tail_mass / 2, 1 - tail_mass / 2]))
        return float(lo), float(hi)


def prior_quantile(prior: PriorSpec, p: float) -> float:
    """Smallest ``nu`` with prior CDF at least ``p``."""
    return float(prior.ppf(p))


def prior_sample(prior: PriorSpec, seed, n: int) -> np.ndarray:
    return prior.sample(n, seed)
