import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpss.distributions import normal, uniform
from lpss.errors import DomainError
from lpss.testbed import (
    PLATE_NOMINAL,
    additive,
    evaluate,
    from_dict,
    plate_buckling,
    plate_marginals,
    polynomial2,
    product,
    quadratic_interaction,
    quadratic_interaction_sobol,
    quadratic_marginal,
    rosenbrock,
    schwefel12,
    true_mean,
)


class TestEvaluate:
    def test_examples(self):
        assert evaluate(additive(2), [1, 1]) == 2.0
        assert evaluate(rosenbrock(7), np.ones(7)) == 0.0
        assert evaluate(schwefel12(3), [1, 1, 1]) == 14.0
        assert evaluate(quadratic_interaction(1.0), [1, 1]) == 3.0
        assert evaluate(product(3), [2, 3, 4]) == 24.0

    def test_rosenbrock_plus_sign(self):
        # x = 0 leaves only the (x_i - 1)^2 terms, each +1
        assert evaluate(rosenbrock(5), np.zeros(5)) == 4.0

    def test_plate_nominal_against_high_precision(self):
        mpmath.mp.dps = 30
        b, t, s0, e, d0, eta = map(mpmath.mpf, ["24", "0.5", "34", "29000", "0.35", "5.25"])
        lam = b / t * mpmath.sqrt(s0 / e)
        ref = (2.1 / lam - 0.9 / lam**2) * (1 - 0.75 * d0 / lam) * (1 - 2 * eta * t / b)
        got = evaluate(plate_buckling(), PLATE_NOMINAL)
        assert got == pytest.approx(float(ref), rel=1e-12)
        assert abs(got - 0.6201) < 1e-4

    def test_vectorized_matches_rowwise(self):
        x = np.random.default_rng(0).random((20, 10))
        f = polynomial2(10, 10, 3, 10)
        assert np.allclose(f(x), [evaluate(f, row) for row in x])

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            evaluate(additive(3), [1, 2])
        with pytest.raises(DomainError):
            plate_buckling()(np.ones((2, 5)))

    @pytest.mark.parametrize("col", [0, 1, 2, 3])
    def test_plate_rejects_nonpositive(self, col):
        x = np.array(PLATE_NOMINAL, dtype=float)
        x[col] = 0.0
        with pytest.raises(DomainError):
            evaluate(plate_buckling(), x)

    def test_polynomial_additivity_without_interactions(self):
        f = polynomial2(6, 6, 0, 4)
        x = np.random.default_rng(1).normal(size=(50, 6))
        parts = sum(x[:, k] ** 2 for k in range(6)) + sum(x[:, k] for k in range(4))
        assert np.array_equal(f(x), polynomial2(6, 6, 0, 0)(x) + polynomial2(6, 0, 0, 4)(x))
        assert np.allclose(f(x), parts, rtol=1e-14)

    def test_polynomial_interaction_pairs(self):
        f = polynomial2(4, 0, 2, 0)
        assert evaluate(f, [1, 2, 3, 4]) == 1 * 2 + 3 * 4

    def test_polynomial_needs_enough_inputs(self):
        with pytest.raises(DomainError):
            polynomial2(10, 0, 6, 0)

    def test_plate_monotone_in_imperfections(self):
        marg = plate_marginals()
        sd = [math.sqrt(m.variance) for m in marg]
        mean = [m.mean for m in marg]
        rng = np.random.default_rng(2)
        base = np.array(mean) + (rng.random((10_000, 6)) * 10 - 5) * np.array(sd)
        f = plate_buckling()
        for col in (4, 5):
            bumped = base.copy()
            bumped[:, col] += 0.01 * sd[col]
            assert np.all(f(bumped) < f(base))


class TestTrueMean:
    @pytest.mark.parametrize("N", [1, 2, 5, 20])
    def test_additive(self, N):
        assert true_mean(additive(N), uniform(0, 1)) == pytest.approx(1.0)

    @pytest.mark.parametrize("N", [2, 5])
    def test_product_zero_mean(self, N):
        assert true_mean(product(N), uniform(-math.sqrt(3), math.sqrt(3))) == pytest.approx(0.0, abs=1e-15)

    def test_rosenbrock(self):
        assert true_mean(rosenbrock(100), uniform(0, 1)) == pytest.approx(2013.0, rel=1e-12)

    def test_schwefel(self):
        assert true_mean(schwefel12(100), normal(0, 1)) == 5050.0
        assert true_mean(schwefel12(100), normal(1, 1)) == 343400.0

    def test_plate_unknown(self):
        assert true_mean(plate_buckling(), plate_marginals()) is None

    @pytest.mark.parametrize(
        "f,marg",
        [
            (additive(4), uniform(0, 1)),
            (product(3), uniform(0, 2)),
            (quadratic_interaction(1.5), normal(0.5, 1)),
            (polynomial2(20, 20, 5, 10), normal(1, 1)),
            (rosenbrock(10), uniform(0, 1)),
            (schwefel12(10), normal(1, 1)),
        ],
        ids=["additive", "product", "quadratic", "polynomial2", "rosenbrock", "schwefel"],
    )
    def test_matches_large_srs(self, f, marg):
        x = marg.ppf(np.random.default_rng(3).random((1_000_000, f.dim)))
        y = f(x)
        se = y.std() / math.sqrt(y.size)
        assert abs(y.mean() - true_mean(f, marg)) < 4 * se


class TestQuadraticSobol:
    @pytest.mark.parametrize("m", ["normal01", "uniformsym"])
    def test_no_interaction(self, m):
        assert quadratic_interaction_sobol(0.0, m) == (1.0, 0.0)

    def test_closed_forms(self):
        assert quadratic_interaction_sobol(1.0, "normal01")[1] == pytest.approx(0.2)
        assert quadratic_interaction_sobol(1.0, "uniformsym")[1] == pytest.approx(1 / 2.6)

    def test_uniformsym_has_unit_variance(self):
        m = quadratic_marginal("uniformsym")
        assert m.mean == pytest.approx(0.0) and m.variance == pytest.approx(1.0)

    def test_negative_c(self):
        with pytest.raises(DomainError):
            quadratic_interaction_sobol(-1.0, "normal01")

    @given(st.floats(0, 100))
    def test_indices_sum_to_one(self, c):
        main, inter = quadratic_interaction_sobol(c, "normal01")
        assert main + inter == pytest.approx(1.0)
        assert 0 <= inter < 1


class TestSerialization:
    @pytest.mark.parametrize(
        "f",
        [additive(3), product(2), quadratic_interaction(0.5), polynomial2(10, 10, 2, 0),
         polynomial2(4, 4, 2, 4, alpha=[1, 2, 3, 4]), rosenbrock(100), schwefel12(50),
         plate_buckling()],
        ids=lambda f: f.label,
    )
    def test_round_trip(self, f):
        assert from_dict(f.to_dict()) == f

    def test_unknown_id(self):
        with pytest.raises(DomainError, match="unknown function"):
            from_dict({"id": "ackley"})

    def test_labels(self):
        assert rosenbrock(100).label == "rosenbrock(K=100)"
        assert plate_buckling().label == "plate_buckling"
