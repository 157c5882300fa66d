"""Estimators, replication studies, Sobol indices and variance diagnostics.

The weighted estimator is ``T = sum_l w_l g(y_l)`` with ``g`` the identity
(mean), a power (raw moment) or an indicator (empirical CDF).

Two closed-form variance expressions are evaluated here from numerically
integrated stratum/cell means:

* stratified sampling with proportional allocation,
  ``Var[T_S] = Var[T_R] - (1/n) sum_k p_k (mu_k - tau)^2``;
* partially stratified sampling with n strata of probability 1/n per
  subspace (LHS is the all-1-D case),
  ``Var[T_P] = Var[T_R] + (n-1)/n / (n^Ns (n-1)^Ns) * sum_R (mu_i - tau)(mu_j - tau)``
  where R runs over ordered cell pairs that share no cell coordinate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .design_spec import DesignSpec, Method, make_design, validate_design
from .designs import SampleSet, as_marginals, generate
from .errors import ContractError, DesignError, DomainError
from .rng import child_rng, make_rng
from .strata import StrataGrid, tensor_stratify
from .testbed import TestFunction

__all__ = [
    "Estimator",
    "MEAN",
    "EstimatorResult",
    "ReplicationSummary",
    "CellDiagnostics",
    "SobolEstimate",
    "estimate",
    "weighted_estimate",
    "replicate_study",
    "bootstrap_std_error",
    "ordering_check",
    "sobol_indices",
    "ss_variance_formula",
    "pss_variance_formula",
    "lhs_variance_formula",
    "srs_variance",
]

_TINY = np.nextafter(0.0, 1.0)
MAX_CELLS = 10**6
SUMMARY_HEADER = (
    "design", "function", "n", "R",
    "mean_of_estimates", "var_of_estimates", "std_of_estimates", "seed",
)


@dataclass(frozen=True)
class Estimator:
    """The ``g`` in ``T = sum w g(y)``: ``mean``, ``moment`` of some order, or ``ecdf``."""

    kind: str = "mean"
    order: int = 1
    thresholds: tuple[float, ...] = ()

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("mean", "moment", "ecdf"):
            raise DomainError(f"unknown estimator kind {self.kind!r}")
        if kind == "moment" and self.order < 1:
            raise DomainError("moment order must be >= 1")
        if kind == "ecdf" and not self.thresholds:
            raise DomainError("ecdf estimator needs at least one threshold")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))

    @property
    def scalar(self) -> bool:
        return self.kind != "ecdf" or len(self.thresholds) == 1

    def transform(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.kind == "mean":
            return y
        if self.kind == "moment":
            return y**self.order
        g = (y[..., None] <= np.asarray(self.thresholds)).astype(float)
        return g[..., 0] if len(self.thresholds) == 1 else g

    @property
    def label(self) -> str:
        if self.kind == "moment":
            return f"moment({self.order})"
        if self.kind == "ecdf":
            return "ecdf(" + ",".join(f"{t:g}" for t in self.thresholds) + ")"
        return "mean"

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "moment":
            return {"kind": "moment", "order": self.order}
        if self.kind == "ecdf":
            return {"kind": "ecdf", "thresholds": list(self.thresholds)}
        return {"kind": "mean"}

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> "Estimator":
        data = data or {"kind": "mean"}
        return cls(
            data.get("kind", "mean"),
            int(data.get("order", 1)),
            tuple(data.get("thresholds", ())),
        )


MEAN = Estimator()


@dataclass(frozen=True)
class EstimatorResult:
    kind: str
    value: float | np.ndarray
    n: int


def weighted_estimate(y, weights, g: Estimator = MEAN) -> EstimatorResult:
    """``sum_l w_l g(y_l)`` after checking the weights are normalized."""
    w = np.asarray(weights, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise DomainError("cannot estimate from an empty sample")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ContractError(f"sample weights sum to {w.sum()!r}, not 1")
    value = w @ g.transform(y)
    return EstimatorResult(g.kind, float(value) if np.ndim(value) == 0 else value, y.shape[0])


def estimate(samples: SampleSet, f: TestFunction, g: Estimator = MEAN) -> EstimatorResult:
    return weighted_estimate(f(samples.points), samples.weights, g)


@dataclass(frozen=True, eq=False)
class ReplicationSummary:
    """Spread of an estimator over independent replications of one design."""

    estimates: np.ndarray
    seed: int
    design: str = ""
    function: str = ""
    n: int = 0
    mean: Any = field(init=False)
    variance: Any = field(init=False)
    std: Any = field(init=False)

    def __post_init__(self):
        est = np.asarray(self.estimates, dtype=float)
        object.__setattr__(self, "estimates", est)
        object.__setattr__(self, "mean", _scalar(est.mean(axis=0)))
        var = np.maximum(est.var(axis=0, ddof=1), 0.0)
        object.__setattr__(self, "variance", _scalar(var))
        object.__setattr__(self, "std", _scalar(np.sqrt(var)))

    @property
    def replications(self) -> int:
        return self.estimates.shape[0]

    @property
    def std_error(self):
        """Standard error of ``mean`` (the replication average)."""
        return self.std / math.sqrt(self.replications)

    def row(self) -> list[str]:
        fmt = lambda v: repr(float(v)) if np.ndim(v) == 0 else ";".join(repr(float(x)) for x in v)
        return [
            self.design, self.function, str(self.n), str(self.replications),
            fmt(self.mean), fmt(self.variance), fmt(self.std), str(self.seed),
        ]


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def _run_chunk(spec, marginals, f, g, seed, indices, check):
    out = []
    for r in indices:
        s = generate(spec, marginals, child_rng(seed, r)) if check else _fast(spec, marginals, seed, r)
        out.append(weighted_estimate(f(s.points), s.weights, g).value)
    return np.asarray(out, dtype=float)


def _fast(spec, marginals, seed, r):
    from .designs import _assemble

    return _assemble(spec, marginals, child_rng(seed, r), None)


def replicate_study(
    spec: DesignSpec,
    marginals,
    f: TestFunction,
    g: Estimator = MEAN,
    replications: int = 1000,
    seed: int | None = None,
    jobs: int = 1,
    check: bool = True,
) -> ReplicationSummary:
    """Estimator distribution over ``replications`` independent sample sets.

    Replication ``r`` uses the stream derived from ``(seed, r)`` so the result
    is identical for any ``jobs``.  ``check=False`` skips the structural
    verification of latinized designs.
    """
    if replications < 2:
        raise DomainError("a replication study needs at least 2 replications")
    spec = validate_design(spec)
    seed = spec.seed if seed is None else int(seed)
    if spec.dim != f.dim:
        raise DesignError(f"design has {spec.dim} variables but {f.label} takes {f.dim}")
    marginals = as_marginals(marginals, spec.dim)
    indices = np.arange(replications)
    if jobs <= 1:
        est = _run_chunk(spec, marginals, f, g, seed, indices, check)
    else:
        chunks = np.array_split(indices, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(
                _run_chunk,
                *zip(*[(spec, marginals, f, g, seed, c, check) for c in chunks]),
            )
            est = np.concatenate(list(parts))
    return ReplicationSummary(est, seed, spec.name, f.label, spec.n)


def bootstrap_std_error(estimates, n_boot: int = 1000, seed: int = 0) -> float:
    """Bootstrap standard error of the sample standard deviation of ``estimates``."""
    x = np.asarray(estimates, dtype=float)
    rng = make_rng(seed)
    idx = rng.integers(0, x.size, size=(n_boot, x.size))
    return float(x[idx].std(axis=1, ddof=1).std(ddof=1))


@dataclass(frozen=True)
class OrderingStep:
    smaller: str
    larger: str
    gap: float
    stderr: float
    status: str  # "confirmed", "tie" or "reversed"


def ordering_check(
    summaries: dict[str, ReplicationSummary],
    order: Sequence[str],
    n_boot: int = 1000,
    seed: int = 0,
    z: float = 2.0,
) -> list[OrderingStep]:
    """Test a claimed ascending order of standard deviations.

    Each adjacent pair is ``confirmed`` when the gap exceeds ``z`` combined
    bootstrap standard errors, ``reversed`` when it is that far the wrong way,
    and a ``tie`` otherwise.
    """
    se = {k: bootstrap_std_error(summaries[k].estimates, n_boot, seed) for k in order}
    steps = []
    for a, b in zip(order, order[1:]):
        gap = summaries[b].std - summaries[a].std
        comb = math.hypot(se[a], se[b])
        status = "confirmed" if gap > z * comb else "reversed" if gap < -z * comb else "tie"
        steps.append(OrderingStep(a, b, float(gap), comb, status))
    return steps


# --------------------------------------------------------------------------
# Sobol indices


@dataclass(frozen=True)
class SobolEstimate:
    """Monte Carlo sensitivity index with bootstrap standard error.

    For a pair ``(i, j)`` ``value`` is the closed interaction index
    ``(V_ij - V_i - V_j) / V_T`` and ``raw`` is ``V_ij / V_T``; for a single
    variable both equal ``V_i / V_T``.
    """

    which: tuple[int, ...]
    value: float
    stderr: float
    raw: float
    raw_stderr: float
    budget: int


def _unit(rng, shape):
    u = rng.random(shape)
    u[u == 0.0] = _TINY
    return u


def _double_loop(f, marginals, cond, outer, inner, rng) -> np.ndarray:
    """(outer, inner) responses with ``cond`` columns shared within each row."""
    x = np.empty((outer, inner, f.dim))
    for j, m in enumerate(marginals):
        if j in cond:
            x[:, :, j] = m.ppf(_unit(rng, (outer, 1)))
        else:
            x[:, :, j] = m.ppf(_unit(rng, (outer, inner)))
    return f(x.reshape(-1, f.dim)).reshape(outer, inner)


def _ratio(y: np.ndarray) -> float:
    # Var(E[Y|X_u]) / Var(Y) from a double loop, with the inner-loop noise
    # removed from the variance of the conditional means.
    inner = y.shape[1]
    means = y.mean(axis=1)
    within = y.var(axis=1, ddof=1).mean() if inner > 1 else 0.0
    v_u = means.var(ddof=1) - within / inner
    v_t = v_u + within
    return v_u / v_t


def sobol_indices(
    f: TestFunction,
    marginals,
    which,
    budget: int = 100_000,
    seed=0,
    inner: int = 2,
    n_boot: int = 300,
) -> SobolEstimate:
    """Double-loop estimate of a first-order or pairwise Sobol index.

    ``which`` is a 0-based variable index or a pair of them.  The budget is
    the total number of function evaluations, split evenly between the
    conditioning sets a pair needs ({i}, {j} and {i, j}).
    """
    if budget < 1000:
        raise DomainError("Sobol estimation needs a budget of at least 1000 evaluations")
    marginals = as_marginals(marginals, f.dim)
    sets = [(int(which),)] if np.ndim(which) == 0 else [tuple(int(w) for w in which)]
    for s in sets[0]:
        if not 0 <= s < f.dim:
            raise DomainError(f"variable index {s} out of range for {f.label}")
    pair = len(sets[0]) == 2
    if pair:
        i, j = sets[0]
        sets = [(i, j), (i,), (j,)]
    rng = make_rng(seed)
    per = budget // len(sets)
    loops = []
    for cond in sets:
        b = 1 if len(cond) == f.dim else inner
        loops.append(_double_loop(f, marginals, set(cond), per // b, b, rng))

    def combine(ys):
        raw = _ratio(ys[0])
        return (raw - _ratio(ys[1]) - _ratio(ys[2]), raw) if pair else (raw, raw)

    value, raw = combine(loops)
    boot_rng = make_rng([int(np.sum(sets[0])), 7919])
    reps = []
    for _ in range(n_boot):
        reps.append(combine([y[boot_rng.integers(0, y.shape[0], y.shape[0])] for y in loops]))
    reps = np.asarray(reps)
    se = reps.std(axis=0, ddof=1)
    return SobolEstimate(sets[0], float(value), float(se[0]), float(raw), float(se[1]), budget)


# --------------------------------------------------------------------------
# Closed-form variance diagnostics


@dataclass(frozen=True, eq=False)
class CellDiagnostics:
    cell_means: np.ndarray  # shape (n,) * Ns
    tau: float
    admissible_sum: float
    var_y: float

    @property
    def n_cells(self) -> int:
        return self.cell_means.size


def _lhs_in_boxes(lower, width, budget, rng):
    """``budget`` Latin-hypercube points inside each of C boxes: (C, budget, d)."""
    c, d = lower.shape
    ranks = rng.permuted(np.tile(np.arange(budget), (c, d, 1)), axis=2)
    frac = (ranks + rng.random((c, d, budget))) / budget
    pts = lower[:, :, None] + width[:, :, None] * frac
    hi = np.nextafter(lower + width, 0.0)[:, :, None]
    pts = np.minimum(np.maximum(pts, np.maximum(lower[:, :, None], _TINY)), hi)
    return pts.transpose(0, 2, 1)


def _box_moments(f, marginals, g, lower, width, budget, rng, chunk_points=2_000_000):
    """Per-box mean of g(y) and of g(y)^2 by stratified sampling inside each box."""
    boxes = lower.shape[0]
    step = max(1, chunk_points // (budget * lower.shape[1]))
    m1 = np.empty(boxes)
    m2 = np.empty(boxes)
    for start in range(0, boxes, step):
        sl = slice(start, start + step)
        pts = _lhs_in_boxes(lower[sl], width[sl], budget, rng)
        flat = pts.reshape(-1, pts.shape[-1])
        x = np.empty_like(flat)
        for j, m in enumerate(marginals):
            x[:, j] = m.ppf(flat[:, j])
        gy = g.transform(f(x)).reshape(pts.shape[0], budget)
        m1[sl] = gy.mean(axis=1)
        m2[sl] = (gy * gy).mean(axis=1)
    return m1, m2


def _require_scalar(g: Estimator):
    if not g.scalar:
        raise DomainError("variance formulas need a scalar estimator")


def ss_variance_formula(
    f: TestFunction,
    marginals,
    grid: StrataGrid,
    n: int,
    g: Estimator = MEAN,
    budget: int = 100_000,
    seed=0,
) -> float:
    """Theoretical variance of the stratified estimator on ``grid`` with ``n`` samples."""
    _require_scalar(g)
    if grid.dim != f.dim:
        raise DesignError(f"grid has {grid.dim} dimensions but {f.label} takes {f.dim}")
    if n % grid.size:
        raise DesignError(f"{grid.size} strata do not divide n={n} (proportional allocation)")
    marginals = as_marginals(marginals, f.dim)
    mu, sq = _box_moments(f, marginals, g, grid.lower, grid.upper - grid.lower,
                          budget, make_rng(seed))
    p = grid.probability
    tau = p * mu.sum()
    var_y = max(p * sq.sum() - tau * tau, 0.0)
    return var_y / n - p * np.sum((mu - tau) ** 2) / n


def _admissible_sum(d: np.ndarray) -> float:
    """``sum_{i,j} d_i d_j`` over ordered cell pairs differing in every coordinate.

    The pair indicator factorizes as prod_k (1 - [i_k == j_k]), i.e. the
    operator (J - I) on every axis, applied in O(Ns * n^Ns).
    """
    e = d
    for axis in range(d.ndim):
        e = e.sum(axis=axis, keepdims=True) - e
    return float(np.sum(d * e))


def pss_variance_formula(
    f: TestFunction,
    marginals,
    spec: DesignSpec,
    g: Estimator = MEAN,
    budget: int = 10_000,
    seed=0,
) -> tuple[float, CellDiagnostics]:
    """Theoretical variance of a PSS estimator with n equal strata per subspace.

    Every one of the n^Ns cells is integrated with ``budget`` stratified
    points; cell means then enter the admissible-pair covariance sum.
    """
    _require_scalar(g)
    spec = validate_design(spec)
    n, ns = spec.n, len(spec.subspaces)
    if spec.method is Method.SRS:
        raise DesignError("the cell formula needs a stratified design")
    if n < 2:
        raise DesignError("the cell formula needs n >= 2")
    if spec.dim != f.dim:
        raise DesignError(f"design has {spec.dim} variables but {f.label} takes {f.dim}")
    for s in spec.subspaces:
        if s.n_strata != n:
            raise DesignError(
                f"subspace {list(s.variables)} has {s.n_strata} strata; the formula needs n={n}"
            )
    if n**ns > MAX_CELLS:
        raise DesignError(f"{n}^{ns} cells exceed the enumeration limit of {MAX_CELLS}")
    marginals = as_marginals(marginals, f.dim)

    cells = np.indices((n,) * ns).reshape(ns, -1).T  # (n^Ns, Ns) stratum per subspace
    lower = np.empty((cells.shape[0], f.dim))
    width = np.empty_like(lower)
    for j, s in enumerate(spec.subspaces):
        grid = tensor_stratify(s.dim, s.counts_per_dim)
        cols = [v - 1 for v in s.variables]
        lower[:, cols] = grid.lower[cells[:, j]]
        width[:, cols] = (grid.upper - grid.lower)[cells[:, j]]
    mu, sq = _box_moments(f, marginals, g, lower, width, budget, make_rng(seed))
    tau = float(mu.mean())
    var_y = max(float(sq.mean()) - tau * tau, 0.0)
    dev = (mu - tau).reshape((n,) * ns)
    s_r = _admissible_sum(dev)
    value = var_y / n + (n - 1) / n * s_r / (n**ns * (n - 1) ** ns)
    return value, CellDiagnostics(mu.reshape((n,) * ns), tau, s_r, var_y)


def lhs_variance_formula(
    f: TestFunction, marginals, N: int, n: int, g: Estimator = MEAN,
    budget: int = 10_000, seed=0,
) -> tuple[float, CellDiagnostics]:
    """LHS special case: N one-dimensional subspaces with n strata each."""
    return pss_variance_formula(f, marginals, make_design("LHS", N, n), g, budget, seed)


def srs_variance(f: TestFunction, marginals, n: int, g: Estimator = MEAN,
                 budget: int = 1_000_000, seed=0) -> float:
    """``Var[g(Y)] / n`` by stratified integration over a single box."""
    grid = tensor_stratify(f.dim, (1,) * f.dim)
    marginals = as_marginals(marginals, f.dim)
    mu, sq = _box_moments(f, marginals, g, grid.lower, grid.upper - grid.lower,
                          budget, make_rng(seed))
    return max(float(sq[0] - mu[0] ** 2), 0.0) / n
