"""Curvature (expected information) matrix and the standard errors built on it."""

import math

import numpy as np
import pytest

from censoredpl import (
    DomainError,
    FitOptions,
    PathlossParams,
    SingularInformationError,
    apply_censoring,
    avar_coefficients,
    avar_matrix,
    estimate_standard_errors,
    mean_pathloss,
    tobit_fit,
)

from _oracles import expected_information_fd
from _support import synthetic_dataset


def information_design(c=75.0):
    """Four samples spanning z from +3.75 to -3.6 at sigma = 4."""
    params = PathlossParams(60.0, 2.0, 4.0)
    d0 = 1.0
    dists = [1.0, 3.0, 10.0, 30.0]
    pairs = [(d, min(mean_pathloss(params, d, d0), c - 1.0)) for d in dists]
    return params, apply_censoring(pairs, c, d0)


class TestCoefficients:
    # Frozen from the closed forms evaluated with mpmath at 50 digits.
    def test_frozen_midrange_anchor(self):
        a, b, c = avar_coefficients(1.0, 4.0)
        assert a == pytest.approx(0.060525756831986, rel=1e-12)
        assert b == pytest.approx(0.0008976825099680493, rel=1e-12)
        assert c == pytest.approx(0.0015310411434191168, rel=1e-12)

    def test_frozen_even_odds_anchor(self):
        a, b, c = avar_coefficients(0.0, 2.0)
        assert a == pytest.approx(0.20457747154594768, rel=1e-12)
        assert b == pytest.approx(0.024933892525089544, rel=1e-12)
        assert c == pytest.approx(0.015625, rel=1e-12)  # exactly 1/(4 sigma^4)

    def test_uncensored_limit(self):
        a, b, c = avar_coefficients(40.0, 1.0)
        assert abs(a - 1.0) < 1e-6
        assert abs(b) < 1e-6
        assert abs(c - 0.5) < 1e-6

    def test_fully_censored_limit(self):
        a, b, c = avar_coefficients(-40.0, 1.0)
        assert abs(a) < 1e-10
        assert abs(b) < 1e-10
        assert abs(c) < 1e-10

    def test_infinite_z_finite(self):
        for z in (math.inf, -math.inf):
            for coef in avar_coefficients(z, 2.0):
                assert math.isfinite(coef)

    def test_positive_information_across_range(self):
        for z in np.linspace(-30.0, 30.0, 121):
            a, _, c = avar_coefficients(float(z), 3.0)
            assert a > 0.0, z
            assert c > 0.0, z

    def test_information_grows_with_z(self):
        # Less censoring mass means more curvature in every coordinate;
        # past z ~ 6 the values saturate at the uncensored limit in float,
        # so strictness is only required before saturation.
        grid = np.linspace(-10.0, 10.0, 81)
        a_vals = np.array([avar_coefficients(float(z), 2.0)[0] for z in grid])
        c_vals = np.array([avar_coefficients(float(z), 2.0)[2] for z in grid])
        assert np.all(np.diff(a_vals) >= 0.0)
        assert np.all(np.diff(c_vals) >= 0.0)
        active = grid[1:] <= 6.0
        assert np.all(np.diff(a_vals)[active] > 0.0)
        assert np.all(np.diff(c_vals)[active] > 0.0)

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(DomainError):
            avar_coefficients(0.0, 0.0)
        with pytest.raises(DomainError):
            avar_coefficients(0.0, -2.0)

    def test_scale_collapses_onto_unit_curves(self):
        # a scales as sigma^-2, b as sigma^-3, c as sigma^-4 at fixed z.
        a1, b1, c1 = avar_coefficients(0.7, 1.0)
        for sigma in (0.5, 2.0, 8.0):
            a, b, c = avar_coefficients(0.7, sigma)
            assert a * sigma**2 == pytest.approx(a1, rel=1e-12)
            assert b * sigma**3 == pytest.approx(b1, rel=1e-12)
            assert c * sigma**4 == pytest.approx(c1, rel=1e-12)


class TestMatrixAgainstQuadratureOracle:
    def test_entrywise_agreement(self):
        params, ds = information_design()
        got = avar_matrix(params, ds).a_matrix
        want = expected_information_fd(params, ds)
        assert np.max(np.abs(got - want)) < 1e-4

    def test_agreement_tightens_with_step(self):
        # The gap must behave like finite-difference truncation, shrinking
        # about quadratically with the step; that rules out a real
        # discrepancy hiding inside the tolerance.
        params, ds = information_design()
        got = avar_matrix(params, ds).a_matrix
        coarse = np.max(np.abs(got - expected_information_fd(params, ds, h_scale=1e-2)))
        fine = np.max(np.abs(got - expected_information_fd(params, ds, h_scale=2e-3)))
        assert fine < coarse / 10.0


class TestMatrixStructure:
    def test_symmetric(self):
        params, ds = information_design()
        mat = avar_matrix(params, ds).a_matrix
        assert np.array_equal(mat, mat.T)

    def test_positive_definite_on_regular_design(self):
        params, ds = information_design()
        mat = avar_matrix(params, ds).a_matrix
        # Leading principal minors all positive.
        assert mat[0, 0] > 0.0
        assert np.linalg.det(mat[:2, :2]) > 0.0
        assert np.linalg.det(mat) > 0.0

    def test_no_censoring_limit_matches_least_squares_theory(self):
        ds = synthetic_dataset(90, count=250)
        params = PathlossParams(60.0, 2.0, 4.0)
        out = avar_matrix(params, ds)
        design = np.column_stack([np.ones(len(ds)), ds.regressor])
        classical = params.sigma**2 * np.linalg.inv(design.T @ design)
        assert out.inverse_diag[0] == pytest.approx(classical[0, 0], rel=1e-6)
        assert out.inverse_diag[1] == pytest.approx(classical[1, 1], rel=1e-6)
        assert out.inverse_diag[2] == pytest.approx(
            2.0 * params.sigma**4 / len(ds), rel=1e-6
        )

    def test_variance_grows_as_level_drops(self):
        # Lowering the level censors more samples and can only lose
        # information about the exponent.
        params = PathlossParams(60.0, 2.0, 4.0)
        ds_open = synthetic_dataset(91, count=200)
        variances = []
        for c in (100.0, 90.0, 85.0, 80.0):
            ds = apply_censoring(zip(ds_open.distances, ds_open.values), c, ds_open.d0)
            variances.append(avar_matrix(params, ds).inverse_diag[1])
        assert variances[0] < variances[1] < variances[2] < variances[3]

    def test_fixed_intercept_reduces_to_two_by_two(self):
        params, ds = information_design()
        full = avar_matrix(params, ds)
        fixed = avar_matrix(params, ds, fixed_pl_d0=True)
        assert fixed.a_matrix.shape == (2, 2)
        assert np.array_equal(fixed.a_matrix, full.a_matrix[1:, 1:])
        assert fixed.labels == full.labels[1:]

    def test_fixing_the_intercept_never_hurts(self):
        params, ds = information_design()
        full = avar_matrix(params, ds)
        fixed = avar_matrix(params, ds, fixed_pl_d0=True)
        assert fixed.inverse_diag[0] <= full.inverse_diag[1] + 1e-15
        assert fixed.inverse_diag[1] <= full.inverse_diag[2] + 1e-15

    def test_se_is_sqrt_of_inverse_diag(self):
        params, ds = information_design()
        out = avar_matrix(params, ds)
        assert np.allclose(out.se, np.sqrt(out.inverse_diag), rtol=1e-15, atol=0)


class TestInverse:
    def test_matches_numpy_on_random_spd(self):
        rng = np.random.Generator(np.random.PCG64(17))
        for size in (2, 3):
            for _ in range(20):
                root = rng.normal(size=(size, size))
                spd = root @ root.T + size * np.eye(size)
                from censoredpl.avar import _invert_symmetric

                got = _invert_symmetric(spd)
                want = np.linalg.inv(spd)
                assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-10

    def test_identical_distances_are_singular(self):
        params = PathlossParams(60.0, 2.0, 4.0)
        ds = apply_censoring([(50.0, 70.0), (50.0, 72.0), (50.0, 74.0)], 80.0, 10.0)
        with pytest.raises(SingularInformationError):
            avar_matrix(params, ds)

    def test_nearly_identical_distances_rejected(self):
        params = PathlossParams(60.0, 2.0, 4.0)
        dists = [100.0, 100.0 * (1.0 + 1e-13), 100.0 * (1.0 + 2e-13)]
        ds = apply_censoring([(d, 70.0 + i) for i, d in enumerate(dists)], 90.0, 10.0)
        with pytest.raises(SingularInformationError):
            avar_matrix(params, ds)


class TestStandardErrors:
    def test_order_and_magnitude(self):
        ds = synthetic_dataset(92, count=500, c=88.0)
        fit = tobit_fit(ds)
        se_pl, se_n, se_s2 = estimate_standard_errors(fit, ds)
        assert 0.0 < se_n < 0.1  # hundreds of samples pin the exponent
        assert 0.0 < se_pl < 2.0
        assert 0.0 < se_s2 < 5.0

    def test_fixed_mode_has_no_intercept_error(self):
        ds = synthetic_dataset(93, count=200, c=88.0)
        fit = tobit_fit(ds, FitOptions(fixed_pl_d0=60.0))
        se_pl, se_n, se_s2 = estimate_standard_errors(fit, ds)
        assert se_pl is None
        assert se_n > 0.0 and se_s2 > 0.0

    def test_refuses_unconverged_fit(self):
        ds = synthetic_dataset(94, count=200, c=88.0)
        fit = tobit_fit(ds, FitOptions(max_iter=1, restart=False))
        assert not fit.converged
        with pytest.raises(DomainError):
            estimate_standard_errors(fit, ds)

    def test_open_level_works_through_clip(self):
        ds = synthetic_dataset(95, count=100)
        assert math.isinf(ds.c)
        fit = tobit_fit(ds)
        se_pl, se_n, se_s2 = estimate_standard_errors(fit, ds)
        assert all(math.isfinite(v) for v in (se_pl, se_n, se_s2))

    def test_errors_shrink_with_sample_size(self):
        fits = {}
        for count in (100, 400):
            ds = synthetic_dataset(96, count=count, c=88.0)
            fits[count] = estimate_standard_errors(tobit_fit(ds), ds)
        # Quadrupling L roughly halves each error.
        for small, large in zip(fits[400], fits[100]):
            assert small < 0.7 * large
