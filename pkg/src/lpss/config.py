"""Declarative experiment configs and the runner that executes them.

A config is one JSON document::

    {
      "name": "table2_rosenbrock",
      "kind": "variance",            # or "sobol"
      "n": 625, "replications": 2000, "seed": 1,
      "estimator": {"kind": "mean"},
      "budget": 100000,              # sobol only: evaluations per index
      "cases": [
        {
          "function": {"id": "rosenbrock", "params": {"K": 100}},
          "marginals": [{"kind": "uniform", "lower": 0, "upper": 1}],
          "designs": [{"method": "SRS"}, {"method": "LPSS", "notation": "2^50"}],
          "which": [[1], [1, 2]]     # sobol only, 1-based variables
        }
      ]
    }

A single-entry ``marginals`` list applies to every variable.  Designs take
``label``, ``method``, ``notation``, ``groups``, ``counts`` and ``latinize``
exactly as :func:`lpss.design_spec.make_design` does; an SS/LSS design
without counts gets a balanced factorization of ``n``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import distributions, testbed
from .analysis import SUMMARY_HEADER, Estimator, ReplicationSummary, replicate_study, sobol_indices
from .design_spec import DesignSpec, Method, _as_method, balanced_counts, make_design
from .distributions import MarginalDistribution
from .errors import DomainError
from .testbed import TestFunction

__all__ = [
    "DesignEntry",
    "Case",
    "ExperimentConfig",
    "ExperimentResult",
    "load_config",
    "run_experiment",
]

SOBOL_HEADER = ("function", "which", "index", "stderr", "raw", "raw_stderr", "budget", "seed")


@dataclass(frozen=True)
class DesignEntry:
    method: str
    label: str = ""
    notation: str | None = None
    groups: tuple[tuple[int, ...], ...] | None = None
    counts: Any = None
    latinize: tuple[bool, ...] | None = None

    def to_spec(self, dim: int, n: int, seed: int = 0) -> DesignSpec:
        method = _as_method(self.method)
        counts = self.counts
        if counts is None and method in (Method.SS, Method.LSS):
            counts = [balanced_counts(n, dim)]
        return make_design(
            method, dim, n, notation=self.notation, groups=self.groups, counts=counts,
            latinize=self.latinize, seed=seed, label=self.label,
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"method": self.method}
        if self.label:
            out["label"] = self.label
        if self.notation is not None:
            out["notation"] = self.notation
        if self.groups is not None:
            out["groups"] = [list(g) for g in self.groups]
        if self.counts is not None:
            out["counts"] = _listify(self.counts)
        if self.latinize is not None:
            out["latinize"] = list(self.latinize)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DesignEntry":
        _require(data, "method", "design")
        unknown = set(data) - {"method", "label", "notation", "groups", "counts", "latinize"}
        if unknown:
            raise DomainError(f"unknown design fields {sorted(unknown)}")
        groups = data.get("groups")
        latinize = data.get("latinize")
        return cls(
            method=str(data["method"]),
            label=str(data.get("label", "")),
            notation=data.get("notation"),
            groups=None if groups is None else tuple(tuple(int(v) for v in g) for g in groups),
            counts=_tuplify(data.get("counts")),
            latinize=None if latinize is None else tuple(bool(x) for x in latinize),
        )


def _listify(v):
    if isinstance(v, dict):
        return {str(k): _listify(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_listify(x) for x in v]
    return v


def _tuplify(v):
    if isinstance(v, dict):
        return {int(k): _tuplify(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return tuple(_tuplify(x) for x in v)
    return v


def _require(data: dict, key: str, what: str):
    if not isinstance(data, dict) or key not in data:
        raise DomainError(f"{what} entry is missing required field {key!r}")


@dataclass(frozen=True)
class Case:
    function: TestFunction
    marginals: tuple[MarginalDistribution, ...]
    designs: tuple[DesignEntry, ...] = ()
    which: tuple[tuple[int, ...], ...] = ()

    @property
    def full_marginals(self) -> tuple[MarginalDistribution, ...]:
        if len(self.marginals) == 1:
            return self.marginals * self.function.dim
        if len(self.marginals) != self.function.dim:
            raise DomainError(
                f"{self.function.label} takes {self.function.dim} inputs but "
                f"{len(self.marginals)} marginals were given"
            )
        return self.marginals

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "function": self.function.to_dict(),
            "marginals": [m.to_dict() for m in self.marginals],
        }
        if self.designs:
            out["designs"] = [d.to_dict() for d in self.designs]
        if self.which:
            out["which"] = [list(w) for w in self.which]
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Case":
        _require(data, "function", "case")
        _require(data, "marginals", "case")
        marg = data["marginals"]
        marg = [marg] if isinstance(marg, dict) else marg
        return cls(
            function=testbed.from_dict(data["function"]),
            marginals=tuple(distributions.from_dict(m) for m in marg),
            designs=tuple(DesignEntry.from_dict(d) for d in data.get("designs", ())),
            which=tuple(tuple(int(v) for v in w) for w in data.get("which", ())),
        )


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    cases: tuple[Case, ...]
    kind: str = "variance"
    n: int = 625
    replications: int = 2000
    seed: int = 0
    estimator: Estimator = field(default_factory=Estimator)
    budget: int = 100_000
    description: str = ""

    def __post_init__(self):
        if self.kind not in ("variance", "sobol"):
            raise DomainError(f"unknown experiment kind {self.kind!r}; expected variance or sobol")
        if not self.cases:
            raise DomainError("an experiment needs at least one case")
        if self.kind == "variance" and self.replications < 2:
            raise DomainError("replications must be >= 2")

    def validate(self) -> list[list[DesignSpec]]:
        """Resolve every design against its case; raises on the first invalid one."""
        out = []
        for case in self.cases:
            marg = case.full_marginals
            if self.kind == "sobol":
                if not case.which:
                    raise DomainError(f"sobol case {case.function.label} lists no indices")
                for w in case.which:
                    if len(w) not in (1, 2) or not all(1 <= v <= len(marg) for v in w):
                        raise DomainError(f"invalid Sobol index {list(w)} for {case.function.label}")
                out.append([])
                continue
            if not case.designs:
                raise DomainError(f"case {case.function.label} lists no designs")
            out.append([d.to_spec(len(marg), self.n, self.seed) for d in case.designs])
        return out

    def with_overrides(self, seed=None, replications=None) -> "ExperimentConfig":
        from dataclasses import replace

        return replace(
            self,
            seed=self.seed if seed is None else int(seed),
            replications=self.replications if replications is None else int(replications),
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.description:
            out["description"] = self.description
        out.update({"n": self.n, "replications": self.replications, "seed": self.seed})
        out["estimator"] = self.estimator.to_dict()
        if self.kind == "sobol":
            out["budget"] = self.budget
        out["cases"] = [c.to_dict() for c in self.cases]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise DomainError("config must be a JSON object")
        _require(data, "cases", "config")
        known = {"name", "kind", "description", "n", "replications", "seed",
                 "estimator", "budget", "cases"}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config fields {sorted(unknown)}")
        return cls(
            name=str(data.get("name", "experiment")),
            cases=tuple(Case.from_dict(c) for c in data["cases"]),
            kind=str(data.get("kind", "variance")),
            n=int(data.get("n", 625)),
            replications=int(data.get("replications", 2000)),
            seed=int(data.get("seed", 0)),
            estimator=Estimator.from_dict(data.get("estimator")),
            budget=int(data.get("budget", 100_000)),
            description=str(data.get("description", "")),
        )


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from None
    return ExperimentConfig.from_dict(data)


def derived_seed(seed: int, case: int, design: int) -> int:
    """Independent 32-bit seed for one (case, design) cell of an experiment."""
    state = np.random.SeedSequence([int(seed), case, design]).generate_state(1)
    return int(state[0])


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    summaries: list[ReplicationSummary] = field(default_factory=list)
    sobol: list[tuple[str, tuple[int, ...], Any, int]] = field(default_factory=list)

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.config.kind == "sobol":
            w.writerow(SOBOL_HEADER)
            for label, which, est, seed in self.sobol:
                w.writerow([
                    label, "-".join(str(v) for v in which), repr(est.value), repr(est.stderr),
                    repr(est.raw), repr(est.raw_stderr), est.budget, seed,
                ])
        else:
            w.writerow(SUMMARY_HEADER)
            for s in self.summaries:
                w.writerow(s.row())
        return buf.getvalue()

    def replications_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["design", "function", "replication", "estimate"])
        for s in self.summaries:
            for r, v in enumerate(s.estimates):
                val = repr(float(v)) if np.ndim(v) == 0 else ";".join(repr(float(x)) for x in v)
                w.writerow([s.design, s.function, r, val])
        return buf.getvalue()


def run_experiment(config: ExperimentConfig, jobs: int = 1, progress=None) -> ExperimentResult:
    """Execute every case of ``config``; validation happens before any sampling."""
    specs = config.validate()
    result = ExperimentResult(config)
    for ci, (case, case_specs) in enumerate(zip(config.cases, specs)):
        marg = case.full_marginals
        if config.kind == "sobol":
            for wi, which in enumerate(case.which):
                seed = derived_seed(config.seed, ci, wi)
                idx = which[0] - 1 if len(which) == 1 else tuple(v - 1 for v in which)
                est = sobol_indices(case.function, marg, idx, config.budget, seed)
                result.sobol.append((case.function.label, which, est, seed))
            continue
        for di, spec in enumerate(case_specs):
            seed = derived_seed(config.seed, ci, di)
            if progress:
                progress(f"{case.function.label} {spec.name}")
            result.summaries.append(
                replicate_study(spec, marg, case.function, config.estimator,
                                config.replications, seed, jobs)
            )
    return result
