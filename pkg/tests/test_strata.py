import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from lpss.errors import DomainError
from lpss.strata import Stratum, bin_index, conditional_uniform, edges, tensor_stratify, uniform_in_bins


class TestTensorStratify:
    def test_five_by_five(self):
        g = tensor_stratify(2, [5, 5])
        assert g.size == 25
        assert all(s.p == pytest.approx(1 / 25) for s in g.strata)
        first = g.strata[0]
        assert first.lower == (0.0, 0.0) and first.upper == (0.2, 0.2)

    def test_one_dimensional_bounds(self):
        g = tensor_stratify(1, [4])
        assert [(s.lower[0], s.upper[0]) for s in g.strata] == [
            (0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)
        ]

    def test_four_dimensional(self):
        g = tensor_stratify(4, [5, 5, 5, 5])
        assert g.size == 625
        assert g.probability == pytest.approx(1 / 625)

    @pytest.mark.parametrize("counts", [[0], [3, -1], [2, 0, 2]])
    def test_rejects_nonpositive_counts(self, counts):
        with pytest.raises(DomainError):
            tensor_stratify(len(counts), counts)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            tensor_stratify(2, [3])

    @given(st.lists(st.integers(1, 6), min_size=1, max_size=4))
    def test_probabilities_and_volumes(self, counts):
        g = tensor_stratify(len(counts), counts)
        assert g.size == int(np.prod(counts))
        assert abs(sum(s.p for s in g.strata) - 1.0) < 1e-12
        vol = np.prod(g.upper - g.lower, axis=1)
        assert np.allclose(vol, g.probability, rtol=1e-12)
        assert np.all(g.lower < g.upper)

    def test_lexicographic_order(self):
        g = tensor_stratify(2, [2, 3])
        assert [s.index for s in g.strata] == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    def test_ravel_unravel_inverse(self):
        g = tensor_stratify(3, [2, 3, 4])
        flat = np.arange(g.size)
        assert np.array_equal(g.ravel(g.unravel(flat)), flat)


class TestCoverage:
    @pytest.mark.parametrize("counts", [[7], [3, 4], [2, 3, 5], [5, 5, 5, 5]])
    def test_each_point_in_exactly_one_stratum(self, counts):
        g = tensor_stratify(len(counts), counts)
        pts = np.random.default_rng(0).random((10_000, len(counts)))
        located = g.locate(pts)
        lo, hi = g.lower[located], g.upper[located]
        assert np.all((pts >= lo) & (pts < hi))
        # brute force on a subset: membership count is exactly one
        for p in pts[:50]:
            assert sum(s.contains(p) for s in g.strata) == 1

    def test_last_box_closed_at_one(self):
        g = tensor_stratify(2, [4, 4])
        assert g.locate([[1.0, 1.0]])[0] == g.size - 1
        assert g.strata[-1].contains([1.0, 1.0])

    def test_edges_go_to_upper_bin(self):
        for c in (3, 7, 10, 625):
            e = edges(c)
            assert np.array_equal(bin_index(e[:-1], c), np.arange(c))
            assert np.array_equal(bin_index(np.nextafter(e[1:-1], 0), c), np.arange(c - 1))

    def test_bin_index_matches_searchsorted(self):
        u = np.random.default_rng(2).random(100_000)
        for c in (3, 10, 49, 625):
            ref = np.searchsorted(edges(c), u, side="right") - 1
            assert np.array_equal(bin_index(u, c), ref)

    def test_uniform_in_bins_stays_inside(self):
        c = 625
        idx = np.arange(c).repeat(4)
        draws = np.tile([0.0, 1e-17, 1 - 1e-17, 1.0 - 2**-53], c)
        u = uniform_in_bins(idx, c, draws)
        assert np.array_equal(bin_index(u, c), idx)
        assert np.all(u > 0) and np.all(u < 1)


class TestConditionalUniform:
    def test_midpoint(self, rng):
        s = Stratum((0.25,), (0.5,), 0.25, (1,))
        assert conditional_uniform(s, rng, [0.5])[0] == 0.375

    def test_identity_stratum(self, rng):
        s = Stratum((0.0, 0.0), (1.0, 1.0), 1.0, (0, 0))
        assert np.array_equal(conditional_uniform(s, rng, [0.3, 0.9]), [0.3, 0.9])

    def test_affine_per_component(self, rng):
        s = Stratum((0.8, 0.0), (1.0, 0.2), 0.04, (4, 0))
        assert np.allclose(conditional_uniform(s, rng, [0.5, 0.5]), [0.9, 0.1])

    def test_within_half_open_box(self, rng):
        s = Stratum((0.2, 0.4), (0.4, 0.6), 0.04, (1, 2))
        pts = np.array([conditional_uniform(s, rng) for _ in range(2000)])
        assert np.all(pts >= [0.2, 0.4]) and np.all(pts < [0.4, 0.6])
        assert np.all(conditional_uniform(s, rng, [1.0, 1.0]) < [0.4, 0.6])

    def test_chi_square_uniformity(self):
        g = tensor_stratify(2, [5, 5])
        rng = np.random.default_rng(99)
        k = 13
        pts = g.sample_in(np.full(100_000, k), rng)
        s = g.strata[k]
        rel = (pts - np.asarray(s.lower)) / (np.asarray(s.upper) - np.asarray(s.lower))
        hist, _, _ = np.histogram2d(rel[:, 0], rel[:, 1], bins=10, range=[[0, 1], [0, 1]])
        _, p = stats.chisquare(hist.ravel())
        assert p > 0.001
        assert np.all(g.locate(pts) == k)


class TestIndexing:
    @given(st.lists(st.integers(1, 5), min_size=1, max_size=4))
    def test_matches_numpy(self, counts):
        g = tensor_stratify(len(counts), counts)
        flat = np.arange(g.size)
        ref = np.stack(np.unravel_index(flat, tuple(counts)), axis=-1)
        assert np.array_equal(g.unravel(flat), ref)
        assert np.array_equal(g.ravel(ref), flat)

    def test_beyond_numpy_dimension_limit(self, rng):
        counts = [2] * 6 + [1] * 94
        g = tensor_stratify(100, counts)
        assert g.multi_indices.shape == (64, 100)
        pts = g.sample_in(np.arange(64), rng)
        assert np.array_equal(g.locate(pts), np.arange(64))

    def test_out_of_range_rejected(self):
        g = tensor_stratify(2, [2, 3])
        with pytest.raises(DomainError):
            g.unravel([6])
        with pytest.raises(DomainError):
            g.ravel([[0, 3]])
