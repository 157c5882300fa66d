"""Sample generators across the stratification spectrum.

Every design is built subspace by subspace in the unit hypercube:

* a subspace with strata counts ``c`` receives ``n / prod(c)`` conditionally
  uniform points per stratum;
* a *latinized* subspace additionally places exactly one point in each of
  the ``n`` marginal bins of every axis (Latinized stratified sampling);
* subspace samples are joined into full points by independent random
  permutations, one per subspace after the first.

SRS, SS, LHS, PSS, LSS and LPSS are all special cases of that recipe.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .design_spec import DesignSpec, Method, SubspaceSpec, make_design, validate_design
from .distributions import MarginalDistribution
from .errors import ConstructionError, DesignError
from .rng import make_rng
from .strata import StrataGrid, bin_index, tensor_stratify, uniform_in_bins

__all__ = [
    "SampleSet",
    "as_marginals",
    "generate",
    "srs",
    "stratified",
    "lhs",
    "pss",
    "lss",
    "lpss",
]

_TINY = np.nextafter(0.0, 1.0)


def as_marginals(marginals, dim: int) -> tuple[MarginalDistribution, ...]:
    if isinstance(marginals, MarginalDistribution):
        return (marginals,) * dim
    out = tuple(marginals)
    if len(out) != dim:
        raise DesignError(f"expected {dim} marginal distributions, got {len(out)}")
    return out


def to_physical(unit: np.ndarray, marginals: Sequence[MarginalDistribution]) -> np.ndarray:
    """Push unit-cube columns through their inverse CDFs."""
    out = np.empty_like(unit)
    columns: dict[MarginalDistribution, list[int]] = {}
    for j, m in enumerate(marginals):
        columns.setdefault(m, []).append(j)
    for m, cols in columns.items():
        out[:, cols] = m.ppf(unit[:, cols])
    return out


@dataclass(frozen=True, eq=False)
class SampleSet:
    points: np.ndarray
    unit_points: np.ndarray
    weights: np.ndarray
    cell_coords: np.ndarray
    spec: DesignSpec
    marginals: tuple[MarginalDistribution, ...] = field(repr=False)
    seed: object = None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def stratified_subspaces(self) -> list[SubspaceSpec]:
        if self.spec.method is Method.SRS:
            return []
        return list(self.spec.subspaces)

    def grids(self) -> list[StrataGrid]:
        return [tensor_stratify(s.dim, s.counts_per_dim) for s in self.stratified_subspaces]

    def verify(self) -> list[str]:
        """Check the structural invariants; returns human-readable violations."""
        problems = []
        n = self.n
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > 1e-12:
            problems.append(f"weights sum to {total!r}")
        if np.any(self.unit_points <= 0.0) or np.any(self.unit_points >= 1.0):
            problems.append("unit points outside (0, 1)")
        groups: dict[tuple, list[int]] = {}
        for j, sub in enumerate(self.stratified_subspaces):
            groups.setdefault((sub.counts_per_dim, sub.latinize), []).append(j)
        for (counts, latin), members in groups.items():
            grid = tensor_stratify(len(counts), counts)
            cols = np.array([[v - 1 for v in self.spec.subspaces[j].variables] for j in members])
            pts = self.unit_points[:, cols]  # (n, K, d)
            multi = np.stack([bin_index(pts[..., i], c) for i, c in enumerate(counts)], axis=-1)
            located = grid.ravel(multi)
            bad = np.flatnonzero(np.any(located != self.cell_coords[:, members], axis=0))
            for k in bad:
                problems.append(f"subspace {members[k]}: cell coordinates disagree with points")
            expected = np.repeat(np.arange(grid.size), n // grid.size)[:, None]
            bad = np.flatnonzero(np.any(np.sort(located, axis=0) != expected, axis=0))
            for k in bad:
                problems.append(
                    f"subspace {members[k]}: stratum occupancy is not {n // grid.size} per stratum"
                )
            if latin:
                flat_cols = cols.ravel()
                bins = np.sort(bin_index(self.unit_points[:, flat_cols], n), axis=0)
                bad = np.flatnonzero(np.any(bins != np.arange(n)[:, None], axis=0))
                for k in bad:
                    problems.append(f"variable x{flat_cols[k] + 1}: not one point per marginal bin")
        return problems

    def to_csv(self, path=None) -> str:
        """``sample_id, x1..xN, weight``; returns the text and writes it if given a path."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sample_id", *[f"x{j + 1}" for j in range(self.dim)], "weight"])
        for i in range(self.n):
            writer.writerow([i, *map(repr, self.points[i].tolist()), repr(float(self.weights[i]))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def metadata(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "seed": self.seed if isinstance(self.seed, int) else None,
            "marginals": [m.to_dict() for m in self.marginals],
            "strata": [
                {"variables": list(s.variables), "counts": list(s.counts_per_dim),
                 "latinize": s.latinize}
                for s in self.stratified_subspaces
            ],
            "cell_coords": self.cell_coords.tolist(),
        }

    def write(self, csv_path, meta_path=None) -> None:
        self.to_csv(csv_path)
        meta_path = Path(meta_path) if meta_path else Path(csv_path).with_suffix(".json")
        meta_path.write_text(json.dumps(self.metadata(), indent=2) + "\n")


def _stratum_layout(counts: tuple[int, ...], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat stratum index of each of the n subspace samples, and its multi-index."""
    grid = tensor_stratify(len(counts), counts)
    per = n // grid.size
    flat = np.repeat(np.arange(grid.size), per)
    return flat, grid.unravel(flat)


def _stratified_batch(counts, n, k, rng):
    flat, multi = _stratum_layout(counts, n)
    draws = rng.random((k, n, len(counts)))
    units = np.empty_like(draws)
    for i, c in enumerate(counts):
        units[..., i] = uniform_in_bins(multi[:, i], c, draws[..., i])
    return units, np.broadcast_to(flat, (k, n))


def _latinized_batch(counts, n, k, rng):
    # Per axis, the n/c points whose stratum lies in slab s must take the n/c
    # LHS bins of that slab; drawing them without replacement is a random
    # permutation of the slab's bins over the slab's points.
    flat, multi = _stratum_layout(counts, n)
    units = np.empty((k, n, len(counts)))
    for i, c in enumerate(counts):
        width = n // c
        by_slab = np.argsort(multi[:, i], kind="stable")
        blocks = np.tile(np.arange(n).reshape(c, width), (k, 1, 1))
        bins = np.empty((k, n), dtype=np.int64)
        bins[:, by_slab] = rng.permuted(blocks, axis=2).reshape(k, n)
        units[..., i] = uniform_in_bins(bins, n, rng.random((k, n)))
    return units, np.broadcast_to(flat, (k, n))


def _assemble(spec: DesignSpec, marginals, rng: np.random.Generator, seed) -> SampleSet:
    n, dim = spec.n, spec.dim
    marginals = as_marginals(marginals, dim)
    unit = np.empty((n, dim))
    if spec.method is Method.SRS:
        unit[:] = rng.random((n, dim))
        unit[unit == 0.0] = _TINY
        coords = np.empty((n, 0), dtype=np.int64)
    else:
        coords = np.empty((n, len(spec.subspaces)), dtype=np.int64)
        groups: dict[tuple, list[int]] = {}
        for j, s in enumerate(spec.subspaces):
            groups.setdefault((s.counts_per_dim, s.latinize), []).append(j)
        for (counts, latin), members in groups.items():
            make = _latinized_batch if latin else _stratified_batch
            units, flat = make(counts, n, len(members), rng)
            perms = rng.permuted(np.tile(np.arange(n), (len(members), 1)), axis=1)
            for row, j in enumerate(members):
                order = np.arange(n) if j == 0 else perms[row]
                cols = [v - 1 for v in spec.subspaces[j].variables]
                unit[:, cols] = units[row][order]
                coords[:, j] = flat[row][order]
    points = to_physical(unit, marginals)
    weights = np.full(n, 1.0 / n)
    return SampleSet(points, unit, weights, coords, spec, marginals, seed)


def generate(spec: DesignSpec, marginals, seed=None) -> SampleSet:
    """Draw one sample set for any validated design."""
    spec = validate_design(spec)
    seed = spec.seed if seed is None else seed
    out = _assemble(spec, marginals, make_rng(seed), seed)
    if spec.method in (Method.LSS, Method.LPSS) or any(s.latinize for s in spec.subspaces):
        problems = out.verify()
        if problems:
            raise ConstructionError("latinized design violates " + "; ".join(problems), 1)
    return out


def srs(dim: int, n: int, marginals, seed=None) -> SampleSet:
    """n iid draws."""
    return generate(make_design("SRS", dim, n), marginals, seed)


def stratified(counts_per_dim, n: int, marginals, seed=None) -> SampleSet:
    """True stratified sample with proportional allocation on a tensor grid."""
    counts = tuple(counts_per_dim)
    return generate(make_design("SS", len(counts), n, counts=[counts]), marginals, seed)


def lhs(dim: int, n: int, marginals, seed=None) -> SampleSet:
    return generate(make_design("LHS", dim, n), marginals, seed)


def lss(counts_per_dim, n: int, marginals, seed=None) -> SampleSet:
    """Sample that is both stratified on ``counts_per_dim`` and a Latin hypercube."""
    counts = tuple(counts_per_dim)
    return generate(make_design("LSS", len(counts), n, counts=[counts]), marginals, seed)


def pss(spec: DesignSpec, marginals, seed=None) -> SampleSet:
    if spec.method is not Method.PSS:
        raise DesignError(f"pss() needs a PSS design, got {spec.method.value}")
    return generate(spec, marginals, seed)


def lpss(spec: DesignSpec, marginals, seed=None) -> SampleSet:
    if spec.method is not Method.LPSS:
        raise DesignError(f"lpss() needs an LPSS design, got {spec.method.value}")
    return generate(spec, marginals, seed)
