"""Equal-probability tensor-product stratification of the unit hypercube.

Strata are half-open boxes ``[k/c, (k+1)/c)`` per axis, except the last box
which is closed at 1.  All bin arithmetic goes through :func:`edges` and
:func:`bin_index` so that generators and invariant checks agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError

__all__ = [
    "Stratum",
    "StrataGrid",
    "tensor_stratify",
    "conditional_uniform",
    "edges",
    "bin_index",
    "uniform_in_bins",
]

_TINY = np.nextafter(0.0, 1.0)


def edges(count: int) -> np.ndarray:
    """Bin edges ``0, 1/c, ..., 1`` (each edge is the correctly rounded k/c)."""
    return np.arange(count + 1, dtype=float) / count


def bin_index(u: np.ndarray, count: int) -> np.ndarray:
    """Index of the half-open bin holding each value of ``u``."""
    u = np.asarray(u, dtype=float)
    e = edges(count)
    idx = np.clip(np.floor(u * count).astype(np.int64), 0, count - 1)
    # floor(u*c) can be off by one near an edge; settle against the edge table.
    idx -= (u < e[idx]) & (idx > 0)
    idx += (u >= e[idx + 1]) & (idx < count - 1)
    return idx


def uniform_in_bins(idx: np.ndarray, count: int, draws: np.ndarray) -> np.ndarray:
    """Map raw uniforms into bins ``idx`` of a ``count``-bin axis.

    The result is clamped into ``[lo, hi)`` of its bin so that floating point
    rounding never moves a point across an edge, and never hits 0 exactly.
    """
    e = edges(count)
    lo = e[idx]
    hi = np.nextafter(e[idx + 1], 0.0)
    u = (idx + draws) / count
    u = np.minimum(np.maximum(u, lo), hi)
    return np.maximum(u, _TINY)


@dataclass(frozen=True)
class Stratum:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    p: float
    index: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, point) -> bool:
        x = np.asarray(point, dtype=float)
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        inside_hi = (x < hi) | ((hi == 1.0) & (x <= 1.0))
        return bool(np.all((x >= lo) & inside_hi))


@dataclass(frozen=True)
class StrataGrid:
    """Tensor grid with ``counts_per_dim[i]`` equal slices along axis i."""

    dim: int
    counts_per_dim: tuple[int, ...]
    _shape: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts_per_dim)
        object.__setattr__(self, "counts_per_dim", counts)
        object.__setattr__(self, "_shape", counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts_per_dim, dtype=np.int64))

    @property
    def probability(self) -> float:
        return 1.0 / self.size

    @cached_property
    def multi_indices(self) -> np.ndarray:
        """(M, dim) array of stratum multi-indices in lexicographic order."""
        return self.unravel(np.arange(self.size))

    @cached_property
    def lower(self) -> np.ndarray:
        return self.multi_indices / np.asarray(self.counts_per_dim, dtype=float)

    @cached_property
    def upper(self) -> np.ndarray:
        return (self.multi_indices + 1) / np.asarray(self.counts_per_dim, dtype=float)

    @cached_property
    def strata(self) -> list[Stratum]:
        p = self.probability
        return [
            Stratum(tuple(lo), tuple(hi), p, tuple(int(i) for i in idx))
            for lo, hi, idx in zip(self.lower, self.upper, self.multi_indices)
        ]

    @cached_property
    def _strides(self) -> np.ndarray:
        # Row-major strides; explicit arithmetic because numpy's index helpers
        # stop at 64 dimensions.
        return np.cumprod((self._shape[1:] + (1,))[::-1], dtype=np.int64)[::-1]

    def unravel(self, flat) -> np.ndarray:
        """Flat stratum indices to (..., dim) multi-indices."""
        flat = np.asarray(flat, dtype=np.int64)
        if np.any((flat < 0) | (flat >= self.size)):
            raise DomainError(f"stratum index out of range [0, {self.size})")
        return (flat[..., None] // self._strides) % np.asarray(self._shape, dtype=np.int64)

    def ravel(self, multi: np.ndarray) -> np.ndarray:
        multi = np.asarray(multi, dtype=np.int64)
        if np.any((multi < 0) | (multi >= np.asarray(self._shape))):
            raise DomainError("stratum multi-index out of range")
        return multi @ self._strides

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Flat index of the stratum containing each row of ``points``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.dim:
            raise DomainError(f"expected points of dimension {self.dim}")
        if np.any((pts < 0.0) | (pts > 1.0)):
            raise DomainError("points must lie in [0, 1]")
        multi = np.stack(
            [bin_index(pts[:, i], c) for i, c in enumerate(self.counts_per_dim)], axis=-1
        )
        return self.ravel(multi)

    def sample_in(self, flat: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One conditionally uniform point in each listed stratum."""
        multi = self.unravel(flat)
        out = np.empty(multi.shape, dtype=float)
        draws = rng.random(multi.shape)
        for i, c in enumerate(self.counts_per_dim):
            out[..., i] = uniform_in_bins(multi[..., i], c, draws[..., i])
        return out


def tensor_stratify(dim: int, counts_per_dim) -> StrataGrid:
    counts = tuple(int(c) for c in counts_per_dim)
    if dim < 1:
        raise DomainError("stratification needs dim >= 1")
    if len(counts) != dim:
        raise DomainError(f"expected {dim} strata counts, got {len(counts)}")
    if any(c < 1 for c in counts):
        raise DomainError("strata counts must be positive integers")
    return StrataGrid(dim, counts)


def conditional_uniform(stratum: Stratum, rng: np.random.Generator, draw=None) -> np.ndarray:
    """A uniform point inside ``stratum``.

    ``draw`` lets callers supply the raw unit-cube variate; by default one is
    taken from ``rng``.
    """
    u = rng.random(stratum.dim) if draw is None else np.asarray(draw, dtype=float)
    lo = np.asarray(stratum.lower)
    hi = np.asarray(stratum.upper)
    x = lo + u * (hi - lo)
    return np.minimum(np.maximum(x, lo), np.nextafter(hi, 0.0))
