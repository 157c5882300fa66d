"""Named experiment definitions reproducing the benchmark studies."""

from __future__ import annotations

import math

import numpy as np

from .config import Case, DesignEntry, ExperimentConfig
from .distributions import normal, uniform
from .errors import DomainError
from .testbed import (
    additive,
    plate_buckling,
    plate_marginals,
    polynomial2,
    product,
    quadratic_interaction,
    quadratic_marginal,
    rosenbrock,
    schwefel12,
)

__all__ = ["PRESETS", "preset", "preset_names", "describe"]

SEED = 1

_BASIC = (DesignEntry("SRS", "SRS"), DesignEntry("SS", "SS"), DesignEntry("LHS", "LHS"))


def _six() -> tuple[DesignEntry, ...]:
    return (
        DesignEntry("SRS", "SRS"),
        DesignEntry("LHS", "LHS"),
        DesignEntry("PSS", "PSS-2^50", "2^50"),
        DesignEntry("LPSS", "LPSS-2^50", "2^50"),
        DesignEntry("PSS", "PSS-4^25", "4^25"),
        DesignEntry("LPSS", "LPSS-4^25", "4^25"),
    )


def _fig3a() -> ExperimentConfig:
    cases = tuple(Case(additive(N), (uniform(0.0, 1.0),), _BASIC) for N in (2, 5, 10, 20))
    return ExperimentConfig(
        "fig3a", cases, n=1024, replications=2000, seed=SEED,
        description="additive function (2/N) sum x_i, U(0,1) inputs: SRS/SS/LHS variance vs N",
    )


def _fig3b() -> ExperimentConfig:
    m = uniform(-math.sqrt(3.0), math.sqrt(3.0))
    cases = tuple(Case(product(N), (m,), _BASIC) for N in (2, 5, 10, 20))
    return ExperimentConfig(
        "fig3b", cases, n=1024, replications=2000, seed=SEED,
        description="product function, zero-mean unit-variance uniform inputs: variance vs N",
    )


FIG4_C = tuple(float(c) for c in np.logspace(-2, 2, 17))


def _fig4() -> ExperimentConfig:
    cases = tuple(
        Case(quadratic_interaction(c), (quadratic_marginal(m),), which=((1,), (1, 2)))
        for m in ("normal01", "uniformsym")
        for c in FIG4_C
    )
    return ExperimentConfig(
        "fig4", cases, kind="sobol", budget=100_000, seed=SEED,
        description="Sobol indices of x1^2 + x2^2 + c x1 x2 as c sweeps 1e-2..1e2",
    )


FIG5_S12 = (1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999)


def fig5_coefficient(s12: float, marginal: str) -> float:
    """Interaction coefficient c giving the requested closed interaction index."""
    var_sq = 2.0 if marginal == "normal01" else 0.8
    return math.sqrt(2.0 * var_sq * s12 / (1.0 - s12))


def _fig5() -> ExperimentConfig:
    cases = tuple(
        Case(quadratic_interaction(fig5_coefficient(s, m)), (quadratic_marginal(m),), _BASIC)
        for m in ("normal01", "uniformsym")
        for s in FIG5_S12
    )
    return ExperimentConfig(
        "fig5", cases, n=256, replications=2000, seed=SEED,
        description="SS vs LHS variance as the interaction index S12 sweeps 1e-3..0.999",
    )


POLY_CASES = {1: (100, 100), 2: (100, 0), 3: (0, 100), 4: (0, 0)}
POLY_KI = (0, 1, 2, 5, 10, 25, 50)


def _poly_designs(k_i: int, K: int = 100) -> tuple[DesignEntry, ...]:
    parts = [f"2^{k_i}"] if k_i else []
    if K - 2 * k_i:
        parts.append(f"1^{K - 2 * k_i}")
    mixed = " ".join(parts)
    return (
        DesignEntry("SRS", "SRS"),
        DesignEntry("LHS", "LHS"),
        DesignEntry("PSS", "PSS-2^50", "2^50"),
        DesignEntry("LPSS", "LPSS-2^50", "2^50"),
        DesignEntry("PSS", f"PSS-{mixed}", mixed),
        DesignEntry("LPSS", f"LPSS-{mixed}", mixed),
    )


def _poly(case: int) -> ExperimentConfig:
    k_n2, k_n1 = POLY_CASES[case]
    cases = tuple(
        Case(polynomial2(100, k_n2, k_i, k_n1), (normal(mu, 1.0),), _poly_designs(k_i))
        for mu in (0.0, 1.0)
        for k_i in POLY_KI
    )
    return ExperimentConfig(
        f"poly_case{case}", cases, n=625, replications=5000, seed=SEED,
        description=(
            f"second-order polynomial, K=100, K_N2={k_n2}, K_N1={k_n1}, "
            f"K_I swept over {list(POLY_KI)}, N(0,1) and N(1,1) inputs"
        ),
    )


def _table2_rosenbrock() -> ExperimentConfig:
    return ExperimentConfig(
        "table2_rosenbrock", (Case(rosenbrock(100), (uniform(0.0, 1.0),), _six()),),
        n=625, replications=5000, seed=SEED,
        description="Rosenbrock, K=100, U(0,1) inputs, six designs",
    )


def _rosenbrock_ranges() -> ExperimentConfig:
    supports = ((1, 2), (0, 2), (0, 3), (0, 5), (9, 10))
    cases = tuple(Case(rosenbrock(100), (uniform(a, b),), _six()) for a, b in supports)
    return ExperimentConfig(
        "rosenbrock_ranges", cases, n=625, replications=5000, seed=SEED,
        description="Rosenbrock, K=100, alternative uniform input ranges",
    )


def _table2_schwefel(mu: float) -> ExperimentConfig:
    tag = "n11" if mu else "n01"
    return ExperimentConfig(
        f"table2_schwefel_{tag}", (Case(schwefel12(100), (normal(mu, 1.0),), _six()),),
        n=625, replications=5000, seed=SEED,
        description=f"Schwefel 1.2, K=100, N({mu:g},1) inputs, six designs",
    )


PLATE_DESIGNS = (
    DesignEntry("SRS", "SRS"),
    DesignEntry("LHS", "LHS"),
    DesignEntry("PSS", "PSS-2^3", "2^3"),
    DesignEntry("PSS", "PSS-2^2 1^2", "2^2 1^2"),
    DesignEntry("PSS", "PSS-4 1^2", "4 1^2"),
    DesignEntry("LPSS", "LPSS-2^3", "2^3"),
    DesignEntry("LPSS", "LPSS-2^2 1^2", "2^2 1^2"),
    DesignEntry("LPSS", "LPSS-4 1^2", "4 1^2"),
)


def _table4() -> ExperimentConfig:
    return ExperimentConfig(
        "table4_plate", (Case(plate_buckling(), plate_marginals(), PLATE_DESIGNS),),
        n=625, replications=5000, seed=SEED,
        description="plate buckling strength (b, t, sigma0, E, delta0, eta), eight designs",
    )


PRESETS = {
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4": _fig4,
    "fig5": _fig5,
    "poly_case1": lambda: _poly(1),
    "poly_case2": lambda: _poly(2),
    "poly_case3": lambda: _poly(3),
    "poly_case4": lambda: _poly(4),
    "table2_rosenbrock": _table2_rosenbrock,
    "table2_schwefel_n01": lambda: _table2_schwefel(0.0),
    "table2_schwefel_n11": lambda: _table2_schwefel(1.0),
    "table4_plate": _table4,
    "rosenbrock_ranges": _rosenbrock_ranges,
}


def preset_names() -> list[str]:
    return list(PRESETS)


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise DomainError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}"
        ) from None


def describe(name: str) -> str:
    return preset(name).description
