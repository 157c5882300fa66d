"""Marginal input distributions and the inverse-CDF transform.

Designs are built in the unit hypercube and pushed into physical space one
coordinate at a time through :func:`inverse_cdf`.  Three families are
supported: uniform, normal and lognormal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from scipy.special import erfc

from .errors import DomainError

__all__ = [
    "Kind",
    "MarginalDistribution",
    "uniform",
    "normal",
    "lognormal",
    "lognormal_from_mean_cov",
    "inverse_cdf",
    "cdf",
    "norm_ppf",
    "norm_cdf",
    "from_dict",
]


class Kind(str, Enum):
    UNIFORM = "uniform"
    NORMAL = "normal"
    LOGNORMAL = "lognormal"


# Acklam's rational approximation to the standard normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def norm_cdf(z):
    """Standard normal CDF, accurate in the lower tail."""
    return 0.5 * erfc(-np.asarray(z, dtype=float) / _SQRT2)


def _lower_quantile(p: np.ndarray) -> np.ndarray:
    # p in (0, 0.5]; result is <= 0.
    x = np.empty_like(p)
    tail = p < _P_LOW
    if tail.any():
        q = np.sqrt(-2.0 * np.log(p[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[tail] = num / den
    mid = ~tail
    if mid.any():
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = num / den
    # One Halley step against the erfc-based CDF.
    e = norm_cdf(x) - p
    u = e * _SQRT2PI * np.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def norm_ppf(p):
    """Standard normal quantile for ``p`` strictly inside (0, 1).

    Works on the lower half only and reflects, so the upper tail keeps full
    precision (``1 - p`` is exact for ``p >= 0.5``).
    """
    arr = np.asarray(p, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    upper = flat > 0.5
    low = np.where(upper, 1.0 - flat, flat)
    x = _lower_quantile(low)
    x = np.where(upper, -x, x)
    return x.reshape(arr.shape) if arr.ndim else float(x[0])


def _check_unit_open(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("probability must lie strictly inside (0, 1)")
    return arr


@dataclass(frozen=True)
class MarginalDistribution:
    """A one-dimensional input law.

    ``params`` holds ``(lower, upper)`` for uniform, ``(mean, std)`` for
    normal and ``(mu_log, sigma_log)`` for lognormal.
    """

    kind: Kind
    params: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        p0, p1 = (float(v) for v in self.params)
        object.__setattr__(self, "params", (p0, p1))
        if not (math.isfinite(p0) and math.isfinite(p1)):
            raise DomainError(f"non-finite parameters for {self.kind.value}")
        if self.kind is Kind.UNIFORM and not p0 < p1:
            raise DomainError("uniform requires lower < upper")
        if self.kind in (Kind.NORMAL, Kind.LOGNORMAL) and not p1 > 0:
            raise DomainError(f"{self.kind.value} requires a positive scale")

    def ppf(self, u):
        arr = _check_unit_open(u)
        a, b = self.params
        if self.kind is Kind.UNIFORM:
            out = a + (b - a) * arr
        elif self.kind is Kind.NORMAL:
            out = a + b * np.asarray(norm_ppf(arr))
        else:
            out = np.exp(a + b * np.asarray(norm_ppf(arr)))
        return float(out) if np.ndim(out) == 0 else out

    def cdf(self, x):
        arr = np.asarray(x, dtype=float)
        a, b = self.params
        if np.any(np.isnan(arr)):
            raise DomainError("cdf undefined at NaN")
        if self.kind is Kind.UNIFORM:
            if np.any((arr < a) | (arr > b)):
                raise DomainError(f"x outside the support [{a}, {b}]")
            out = (arr - a) / (b - a)
        elif self.kind is Kind.NORMAL:
            out = norm_cdf((arr - a) / b)
        else:
            if np.any(arr <= 0):
                raise DomainError("lognormal support is x > 0")
            out = norm_cdf((np.log(arr) - a) / b)
        return float(out) if np.ndim(out) == 0 else out

    def raw_moment(self, k: int) -> float:
        """E[X**k] for integer k >= 0."""
        a, b = self.params
        if k == 0:
            return 1.0
        if self.kind is Kind.UNIFORM:
            return (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))
        if self.kind is Kind.LOGNORMAL:
            return math.exp(k * a + 0.5 * k * k * b * b)
        # normal: sum over even central moments sigma^j (j-1)!!
        total = 0.0
        for j in range(0, k + 1, 2):
            dfact = math.prod(range(j - 1, 0, -2)) if j else 1
            total += math.comb(k, j) * a ** (k - j) * b**j * dfact
        return total

    @property
    def mean(self) -> float:
        return self.raw_moment(1)

    @property
    def variance(self) -> float:
        m = self.raw_moment(1)
        return self.raw_moment(2) - m * m

    def to_dict(self) -> dict[str, Any]:
        a, b = self.params
        if self.kind is Kind.UNIFORM:
            return {"kind": "uniform", "lower": a, "upper": b}
        if self.kind is Kind.NORMAL:
            return {"kind": "normal", "mean": a, "std": b}
        return {"kind": "lognormal", "mu_log": a, "sigma_log": b}

    def label(self) -> str:
        a, b = self.params
        tag = {Kind.UNIFORM: "U", Kind.NORMAL: "N", Kind.LOGNORMAL: "LN"}[self.kind]
        return f"{tag}({a:g},{b:g})"


def uniform(lower: float = 0.0, upper: float = 1.0) -> MarginalDistribution:
    return MarginalDistribution(Kind.UNIFORM, (lower, upper))


def normal(mean: float = 0.0, std: float = 1.0) -> MarginalDistribution:
    return MarginalDistribution(Kind.NORMAL, (mean, std))


def lognormal(mu_log: float = 0.0, sigma_log: float = 1.0) -> MarginalDistribution:
    return MarginalDistribution(Kind.LOGNORMAL, (mu_log, sigma_log))


def lognormal_from_mean_cov(mean: float, cov: float) -> MarginalDistribution:
    """Lognormal law with the given mean and coefficient of variation."""
    if not (mean > 0 and cov > 0):
        raise DomainError("lognormal mean and COV must both be positive")
    s2 = math.log1p(cov * cov)
    return lognormal(math.log(mean) - 0.5 * s2, math.sqrt(s2))


def inverse_cdf(dist: MarginalDistribution, u):
    return dist.ppf(u)


def cdf(dist: MarginalDistribution, x):
    return dist.cdf(x)


def from_dict(data: dict[str, Any]) -> MarginalDistribution:
    """Build a distribution from its config form.

    Lognormal accepts either ``mu_log``/``sigma_log`` or ``mean``/``cov``.
    """
    try:
        kind = Kind(str(data["kind"]).lower())
    except (KeyError, ValueError):
        raise DomainError(f"unknown distribution spec {data!r}") from None
    try:
        if kind is Kind.UNIFORM:
            return uniform(data["lower"], data["upper"])
        if kind is Kind.NORMAL:
            return normal(data["mean"], data["std"])
        if "mu_log" in data:
            return lognormal(data["mu_log"], data["sigma_log"])
        return lognormal_from_mean_cov(data["mean"], data["cov"])
    except KeyError as exc:
        raise DomainError(f"{kind.value} distribution missing field {exc}") from None
