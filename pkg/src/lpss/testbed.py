"""Closed-form benchmark transformations with reference means.

Functions are evaluated row-wise: ``f(x)`` with ``x`` of shape ``(n, dim)``
returns an ``(n,)`` array; a single point may be passed as a 1-D vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .distributions import Kind, MarginalDistribution
from .errors import DomainError

__all__ = [
    "FunctionId",
    "TestFunction",
    "additive",
    "product",
    "quadratic_interaction",
    "polynomial2",
    "rosenbrock",
    "schwefel12",
    "plate_buckling",
    "plate_marginals",
    "PLATE_TABLE",
    "PLATE_NOMINAL",
    "quadratic_marginal",
    "evaluate",
    "true_mean",
    "quadratic_interaction_sobol",
    "from_dict",
]


class FunctionId(str, Enum):
    ADDITIVE = "additive"
    PRODUCT = "product"
    QUADRATIC_INTERACTION = "quadratic_interaction"
    POLYNOMIAL2 = "polynomial2"
    ROSENBROCK = "rosenbrock"
    SCHWEFEL12 = "schwefel12"
    PLATE_BUCKLING = "plate_buckling"


@dataclass(frozen=True)
class TestFunction:
    """A benchmark transformation ``h(x)`` identified by ``id`` plus parameters."""

    __test__ = False  # not a pytest class

    id: FunctionId
    params: tuple[tuple[str, Any], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "id", FunctionId(self.id))
        if isinstance(self.params, dict):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))

    @property
    def p(self) -> dict[str, Any]:
        return dict(self.params)

    @property
    def dim(self) -> int:
        p = self.p
        if self.id in (FunctionId.ADDITIVE, FunctionId.PRODUCT):
            return p["N"]
        if self.id is FunctionId.QUADRATIC_INTERACTION:
            return 2
        if self.id is FunctionId.PLATE_BUCKLING:
            return 6
        return p["K"]

    @property
    def label(self) -> str:
        args = ",".join(f"{k}={_fmt(v)}" for k, v in self.params if not _is_default(self, k, v))
        return f"{self.id.value}({args})" if args else self.id.value

    def __call__(self, x) -> np.ndarray | float:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        rows = np.atleast_2d(arr)
        if rows.shape[-1] != self.dim:
            raise DomainError(f"{self.id.value} takes {self.dim} inputs, got {rows.shape[-1]}")
        y = _EVAL[self.id](rows, self.p)
        return float(y[0]) if single else y

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id.value, "params": {k: _jsonable(v) for k, v in self.params}}


def _fmt(v) -> str:
    return f"{v:g}" if isinstance(v, float) else str(v)


def _jsonable(v):
    return list(v) if isinstance(v, tuple) else v


def _is_default(f: TestFunction, key: str, value) -> bool:
    return f.id is FunctionId.POLYNOMIAL2 and key in ("alpha", "beta", "gamma") and value == 1.0


def _coef(value, count: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    return np.full(count, float(arr)) if arr.ndim == 0 else arr[:count]


def _additive(x, p):
    return 2.0 / p["N"] * x.sum(axis=1)


def _product(x, p):
    return x.prod(axis=1)


def _quadratic(x, p):
    x1, x2 = x[:, 0], x[:, 1]
    return x1 * x1 + x2 * x2 + p["c"] * x1 * x2


def _poly2(x, p):
    kn2, ki, kn1 = p["K_N2"], p["K_I"], p["K_N1"]
    y = np.zeros(x.shape[0])
    if kn2:
        y += (x[:, :kn2] ** 2) @ _coef(p.get("alpha", 1.0), kn2)
    if ki:
        y += (x[:, 0 : 2 * ki : 2] * x[:, 1 : 2 * ki : 2]) @ _coef(p.get("beta", 1.0), ki)
    if kn1:
        y += x[:, :kn1] @ _coef(p.get("gamma", 1.0), kn1)
    return y


def _rosenbrock(x, p):
    a, b = x[:, :-1], x[:, 1:]
    return (100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2).sum(axis=1)


def _schwefel(x, p):
    return (np.cumsum(x, axis=1) ** 2).sum(axis=1)


def _plate(x, p):
    b, t, s0, e, d0, eta = x.T
    if np.any(b <= 0) or np.any(t <= 0) or np.any(s0 <= 0) or np.any(e <= 0):
        raise DomainError("plate width, thickness, yield stress and modulus must be positive")
    lam = b / t * np.sqrt(s0 / e)
    return (2.1 / lam - 0.9 / lam**2) * (1.0 - 0.75 * d0 / lam) * (1.0 - 2.0 * eta * t / b)


_EVAL = {
    FunctionId.ADDITIVE: _additive,
    FunctionId.PRODUCT: _product,
    FunctionId.QUADRATIC_INTERACTION: _quadratic,
    FunctionId.POLYNOMIAL2: _poly2,
    FunctionId.ROSENBROCK: _rosenbrock,
    FunctionId.SCHWEFEL12: _schwefel,
    FunctionId.PLATE_BUCKLING: _plate,
}


def additive(N: int) -> TestFunction:
    """``(2/N) * sum(x)``."""
    return TestFunction(FunctionId.ADDITIVE, {"N": int(N)})


def product(N: int) -> TestFunction:
    return TestFunction(FunctionId.PRODUCT, {"N": int(N)})


def quadratic_interaction(c: float) -> TestFunction:
    """``x1^2 + x2^2 + c x1 x2``."""
    return TestFunction(FunctionId.QUADRATIC_INTERACTION, {"c": float(c)})


def polynomial2(
    K: int = 100, K_N2: int = 100, K_I: int = 0, K_N1: int = 100,
    alpha=1.0, beta=1.0, gamma=1.0,
) -> TestFunction:
    """Second-order polynomial with separate square, pairwise and linear terms.

    Pairwise terms couple ``(x1, x2), (x3, x4), ...`` for the first ``K_I``
    pairs.  Coefficients are scalars or per-term sequences.
    """
    if max(K_N2, 2 * K_I, K_N1) > K:
        raise DomainError(f"polynomial terms need {max(K_N2, 2 * K_I, K_N1)} inputs but K={K}")
    params = {"K": int(K), "K_N2": int(K_N2), "K_I": int(K_I), "K_N1": int(K_N1)}
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        params[name] = float(v) if np.ndim(v) == 0 else tuple(float(c) for c in v)
    return TestFunction(FunctionId.POLYNOMIAL2, params)


def rosenbrock(K: int = 100) -> TestFunction:
    """``sum 100 (x_i^2 - x_{i+1})^2 + (x_i - 1)^2`` over i < K."""
    if K < 2:
        raise DomainError("Rosenbrock needs K >= 2")
    return TestFunction(FunctionId.ROSENBROCK, {"K": int(K)})


def schwefel12(K: int = 100) -> TestFunction:
    """``sum_i (sum_{j<=i} x_j)^2``."""
    return TestFunction(FunctionId.SCHWEFEL12, {"K": int(K)})


def plate_buckling() -> TestFunction:
    """Normalized plate buckling strength; inputs ``(b, t, sigma0, E, delta0, eta)``."""
    return TestFunction(FunctionId.PLATE_BUCKLING, {})


# (nominal, mean multiplier, COV, kind) for b, t, sigma0, E, delta0, eta
PLATE_TABLE = (
    (24.0, 0.992, 0.028, "normal"),
    (0.5, 1.05, 0.044, "lognormal"),
    (34.0, 1.3, 0.1235, "lognormal"),
    (29000.0, 0.987, 0.076, "normal"),
    (0.35, 1.0, 0.05, "normal"),
    (5.25, 1.0, 0.07, "normal"),
)
PLATE_NOMINAL = tuple(row[0] for row in PLATE_TABLE)


def plate_marginals() -> tuple[MarginalDistribution, ...]:
    """Input laws for the plate problem; COV is read as std / mean."""
    from .distributions import lognormal_from_mean_cov, normal

    out = []
    for nominal, mult, cov, kind in PLATE_TABLE:
        mean = nominal * mult
        out.append(normal(mean, cov * mean) if kind == "normal" else lognormal_from_mean_cov(mean, cov))
    return tuple(out)


def evaluate(f: TestFunction, x) -> float:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DomainError("evaluate() takes a single input vector")
    return f(arr)


def true_mean(f: TestFunction, marginals) -> float | None:
    """Exact expectation of ``f`` under independent ``marginals``, if known.

    Computed from raw moments, so it holds for any of the supported families.
    Plate buckling has no closed form and returns None.
    """
    if isinstance(marginals, MarginalDistribution):
        marginals = (marginals,) * f.dim
    ms = list(marginals)
    if len(ms) != f.dim:
        raise DomainError(f"{f.id.value} needs {f.dim} marginals, got {len(ms)}")
    m1 = [m.raw_moment(1) for m in ms]
    m2 = [m.raw_moment(2) for m in ms]
    p = f.p
    if f.id is FunctionId.ADDITIVE:
        return 2.0 / p["N"] * sum(m1)
    if f.id is FunctionId.PRODUCT:
        return math.prod(m1)
    if f.id is FunctionId.QUADRATIC_INTERACTION:
        return m2[0] + m2[1] + p["c"] * m1[0] * m1[1]
    if f.id is FunctionId.POLYNOMIAL2:
        kn2, ki, kn1 = p["K_N2"], p["K_I"], p["K_N1"]
        a = _coef(p.get("alpha", 1.0), kn2)
        b = _coef(p.get("beta", 1.0), ki)
        g = _coef(p.get("gamma", 1.0), kn1)
        return (
            float(np.dot(a, m2[:kn2]))
            + sum(b[k] * m1[2 * k] * m1[2 * k + 1] for k in range(ki))
            + float(np.dot(g, m1[:kn1]))
        )
    if f.id is FunctionId.ROSENBROCK:
        m4 = [m.raw_moment(4) for m in ms]
        total = 0.0
        for i in range(f.dim - 1):
            total += 100.0 * (m4[i] - 2.0 * m2[i] * m1[i + 1] + m2[i + 1])
            total += m2[i] - 2.0 * m1[i] + 1.0
        return total
    if f.id is FunctionId.SCHWEFEL12:
        total, var, mean = 0.0, 0.0, 0.0
        for i in range(f.dim):
            var += m2[i] - m1[i] ** 2
            mean += m1[i]
            total += var + mean * mean
        return total
    return None


def quadratic_interaction_sobol(c: float, marginal: str) -> tuple[float, float]:
    """Closed-form ``(S_main_total, S_12)`` for ``x1^2 + x2^2 + c x1 x2``.

    ``marginal`` is ``"normal01"`` (standard normal inputs) or ``"uniformsym"``
    (uniform on [-sqrt 3, sqrt 3]); both have zero mean and unit variance so the
    interaction variance is ``c^2`` and each square contributes ``Var(X^2)``.
    """
    if c < 0:
        raise DomainError("interaction coefficient must be >= 0")
    key = marginal.lower().replace("_", "")
    if key == "normal01":
        var_sq = 2.0
    elif key == "uniformsym":
        var_sq = 4.0 / 5.0
    else:
        raise DomainError(f"unknown marginal {marginal!r}")
    s12 = c * c / (2.0 * var_sq + c * c)
    return 1.0 - s12, s12


def quadratic_marginal(marginal: str) -> MarginalDistribution:
    from .distributions import normal, uniform

    key = marginal.lower().replace("_", "")
    if key == "normal01":
        return normal(0.0, 1.0)
    if key == "uniformsym":
        return uniform(-math.sqrt(3.0), math.sqrt(3.0))
    raise DomainError(f"unknown marginal {marginal!r}")


def from_dict(data: dict[str, Any]) -> TestFunction:
    try:
        fid = FunctionId(str(data["id"]).lower())
    except (KeyError, ValueError):
        valid = ", ".join(f.value for f in FunctionId)
        raise DomainError(f"unknown function {data.get('id')!r}; expected one of {valid}") from None
    params = dict(data.get("params", {}))
    builders = {
        FunctionId.ADDITIVE: additive,
        FunctionId.PRODUCT: product,
        FunctionId.QUADRATIC_INTERACTION: quadratic_interaction,
        FunctionId.POLYNOMIAL2: polynomial2,
        FunctionId.ROSENBROCK: rosenbrock,
        FunctionId.SCHWEFEL12: schwefel12,
        FunctionId.PLATE_BUCKLING: plate_buckling,
    }
    try:
        return builders[fid](**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {fid.value}: {exc}") from None
