"""Model layer: parameters, datasets, censoring, synthetic generation."""

import math

import numpy as np
import pytest
import scipy.stats

from censoredpl import (
    Dataset,
    CensoredSample,
    DomainError,
    InvariantError,
    PathlossParams,
    SPEED_OF_LIGHT,
    apply_censoring,
    censoring_level_for_fraction,
    censoring_probability,
    distance_regressor,
    expected_censored_fraction,
    from_transformed,
    fspl_reference,
    generate_synthetic,
    mean_pathloss,
    to_transformed,
)

from _support import synthetic_dataset


class TestPathlossParams:
    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(DomainError):
            PathlossParams(60.0, 2.0, 0.0)
        with pytest.raises(DomainError):
            PathlossParams(60.0, 2.0, -1.0)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_nonfinite_fields(self, bad):
        with pytest.raises(DomainError):
            PathlossParams(bad, 2.0, 4.0)
        with pytest.raises(DomainError):
            PathlossParams(60.0, bad, 4.0)
        with pytest.raises(DomainError):
            PathlossParams(60.0, 2.0, bad)

    def test_frozen(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        with pytest.raises(AttributeError):
            p.n = 3.0


class TestMeanPathloss:
    def test_reference_distance_returns_intercept(self):
        p = PathlossParams(61.25, 2.7, 4.0)
        assert mean_pathloss(p, 10.0, 10.0) == 61.25

    def test_one_decade_adds_ten_n(self):
        p = PathlossParams(60.0, 2.3, 4.0)
        assert mean_pathloss(p, 100.0, 10.0) == pytest.approx(60.0 + 23.0, abs=1e-12)

    def test_array_matches_scalar(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        d = np.array([10.0, 25.0, 400.0])
        out = mean_pathloss(p, d, 10.0)
        assert out.shape == (3,)
        for di, oi in zip(d, out):
            assert oi == mean_pathloss(p, float(di), 10.0)

    def test_rejects_distance_below_reference(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        with pytest.raises(DomainError):
            mean_pathloss(p, 5.0, 10.0)


class TestDistanceRegressor:
    def test_scalar_returns_float(self):
        out = distance_regressor(100.0, 10.0)
        assert isinstance(out, float)
        assert out == pytest.approx(10.0, abs=1e-12)

    def test_at_reference_is_zero(self):
        assert distance_regressor(10.0, 10.0) == 0.0

    def test_rejects_nonpositive_d0(self):
        with pytest.raises(DomainError):
            distance_regressor(10.0, 0.0)

    def test_rejects_any_entry_below_d0(self):
        with pytest.raises(DomainError):
            distance_regressor(np.array([10.0, 9.999]), 10.0)


class TestFsplReference:
    # Frozen from 20*log10(4*pi*d0*f/c) evaluated at 50 decimal digits.
    @pytest.mark.parametrize(
        "frequency_hz,d0,expected",
        [
            (5.6e9, 10.0, 67.41154376200738),
            (2.4e9, 1.0, 40.0520080561155),
        ],
    )
    def test_frozen_values(self, frequency_hz, d0, expected):
        assert fspl_reference(frequency_hz, d0) == pytest.approx(expected, rel=1e-12)

    def test_speed_of_light_exact(self):
        assert SPEED_OF_LIGHT == 299792458.0

    def test_one_decade_of_distance_adds_twenty_db(self):
        f = 5.6e9
        assert fspl_reference(f, 100.0) - fspl_reference(f, 10.0) == pytest.approx(
            20.0, abs=1e-9
        )

    def test_rejects_nonpositive_inputs(self):
        with pytest.raises(DomainError):
            fspl_reference(0.0, 10.0)
        with pytest.raises(DomainError):
            fspl_reference(5.6e9, -1.0)


class TestGenerateSynthetic:
    def test_same_seed_reproduces_exactly(self):
        p = PathlossParams(60.0, 4.0, 3.0)
        d = np.geomspace(10.0, 1000.0, 50)
        a = generate_synthetic(p, d, 10.0, 7)
        b = generate_synthetic(p, d, 10.0, 7)
        assert a == b

    def test_different_seeds_differ(self):
        p = PathlossParams(60.0, 4.0, 3.0)
        d = np.geomspace(10.0, 1000.0, 50)
        assert generate_synthetic(p, d, 10.0, 7) != generate_synthetic(p, d, 10.0, 8)

    def test_accepts_seed_sequence(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        d = [10.0, 100.0]
        ss = np.random.SeedSequence(3, spawn_key=(1,))
        a = generate_synthetic(p, d, 10.0, ss)
        b = generate_synthetic(p, d, 10.0, np.random.SeedSequence(3, spawn_key=(1,)))
        assert a == b

    def test_shadowing_moments(self):
        # 20k draws at one distance: mean within 5 sigma/sqrt(N), std within 5%.
        p = PathlossParams(60.0, 2.0, 4.0)
        d = np.full(20_000, 100.0)
        values = np.array([v for _, v in generate_synthetic(p, d, 10.0, 123)])
        mu = mean_pathloss(p, 100.0, 10.0)
        assert abs(values.mean() - mu) < 5.0 * p.sigma / math.sqrt(values.size)
        assert abs(values.std(ddof=1) - p.sigma) / p.sigma < 0.05

    def test_pairs_keep_distance_order(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        d = [10.0, 500.0, 20.0]
        assert [x for x, _ in generate_synthetic(p, d, 10.0, 1)] == d


class TestApplyCensoring:
    def test_value_at_level_is_censored(self):
        ds = apply_censoring([(10.0, 140.0), (10.0, 139.999)], 140.0, 10.0)
        assert ds.samples[0].censored and ds.samples[0].value == 140.0
        assert not ds.samples[1].censored and ds.samples[1].value == 139.999

    def test_idempotent(self):
        pairs = [(10.0, 120.0), (50.0, 150.0), (100.0, 139.0)]
        once = apply_censoring(pairs, 140.0, 10.0)
        twice = apply_censoring(zip(once.distances, once.values), 140.0, 10.0)
        assert once == twice

    def test_preserves_order(self):
        pairs = [(100.0, 130.0), (10.0, 150.0), (20.0, 100.0)]
        ds = apply_censoring(pairs, 140.0, 10.0)
        assert list(ds.distances) == [100.0, 10.0, 20.0]
        assert list(ds.censored) == [False, True, False]

    def test_infinite_level_censors_nothing(self):
        ds = apply_censoring([(10.0, 1e300), (20.0, -1e300)], math.inf, 10.0)
        assert ds.n_censored == 0

    def test_carries_frequency(self):
        ds = apply_censoring([(10.0, 100.0)], 140.0, 10.0, frequency_hz=5.6e9)
        assert ds.frequency_hz == 5.6e9


class TestDatasetInvariants:
    def test_distance_below_d0_rejected(self):
        with pytest.raises(InvariantError):
            Dataset((CensoredSample(5.0, 100.0),), d0=10.0, c=math.inf)

    def test_censored_value_must_equal_level(self):
        with pytest.raises(InvariantError):
            Dataset((CensoredSample(10.0, 139.0, True),), d0=10.0, c=140.0)

    def test_uncensored_value_must_lie_below_level(self):
        with pytest.raises(InvariantError):
            Dataset((CensoredSample(10.0, 140.0, False),), d0=10.0, c=140.0)

    def test_empty_rejected(self):
        with pytest.raises(InvariantError):
            Dataset((), d0=10.0, c=math.inf)

    def test_nan_level_rejected(self):
        with pytest.raises(InvariantError):
            Dataset((CensoredSample(10.0, 100.0),), d0=10.0, c=math.nan)

    def test_nonpositive_d0_rejected(self):
        with pytest.raises(InvariantError):
            Dataset((CensoredSample(10.0, 100.0),), d0=0.0, c=math.inf)

    def test_nonpositive_frequency_rejected(self):
        with pytest.raises(InvariantError):
            Dataset((CensoredSample(10.0, 100.0),), d0=10.0, c=math.inf, frequency_hz=0.0)

    def test_sample_rejects_nonfinite(self):
        with pytest.raises(InvariantError):
            CensoredSample(math.inf, 100.0)
        with pytest.raises(InvariantError):
            CensoredSample(10.0, math.nan)
        with pytest.raises(InvariantError):
            CensoredSample(-1.0, 100.0)

    def test_counts_and_fraction(self):
        ds = apply_censoring([(10.0, 150.0), (20.0, 100.0), (30.0, 160.0), (40.0, 90.0)],
                             140.0, 10.0)
        assert len(ds) == 4
        assert ds.n_censored == 2
        assert ds.n_uncensored == 2
        assert ds.censored_fraction == 0.5

    def test_regressor_matches_formula(self):
        ds = synthetic_dataset(0, count=10)
        expected = 10.0 * np.log10(ds.distances / ds.d0)
        assert np.allclose(ds.regressor, expected, rtol=0, atol=1e-12)


class TestCensoringProbability:
    def test_matches_normal_survival(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        for d in (10.0, 50.0, 900.0):
            mu = mean_pathloss(p, d, 10.0)
            want = scipy.stats.norm.sf(90.0, loc=mu, scale=p.sigma)
            got = censoring_probability(p, d, 10.0, 90.0)
            assert got == pytest.approx(want, rel=1e-12)

    def test_array_input(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        d = np.array([10.0, 100.0, 1000.0])
        got = censoring_probability(p, d, 10.0, 90.0)
        assert got.shape == (3,)
        assert np.all(np.diff(got) > 0)  # farther means likelier censored

    def test_expected_fraction_is_design_mean(self):
        p = PathlossParams(60.0, 2.0, 4.0)
        d = np.geomspace(10.0, 1000.0, 30)
        per = censoring_probability(p, d, 10.0, 85.0)
        assert expected_censored_fraction(p, d, 10.0, 85.0) == pytest.approx(
            float(np.mean(per)), rel=1e-14
        )


class TestCensoringLevelForFraction:
    @pytest.mark.parametrize("fraction", [0.1, 0.3, 0.5])
    def test_round_trip(self, fraction):
        p = PathlossParams(60.0, 2.0, 4.0)
        d = np.geomspace(10.0, 1000.0, 100)
        c = censoring_level_for_fraction(p, d, 10.0, fraction)
        assert expected_censored_fraction(p, d, 10.0, c) == pytest.approx(
            fraction, abs=1e-8
        )

    def test_monotone_in_fraction(self):
        # More censoring requires a lower level.
        p = PathlossParams(60.0, 2.0, 4.0)
        d = np.geomspace(10.0, 1000.0, 50)
        levels = [censoring_level_for_fraction(p, d, 10.0, f) for f in (0.1, 0.3, 0.5)]
        assert levels[0] > levels[1] > levels[2]

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_fraction_outside_open_interval(self, bad):
        p = PathlossParams(60.0, 2.0, 4.0)
        with pytest.raises(DomainError):
            censoring_level_for_fraction(p, [10.0, 100.0], 10.0, bad)


class TestTransformedParams:
    def test_forward_values(self):
        tp = to_transformed(PathlossParams(60.0, 2.0, 4.0), 90.0)
        assert tp.alpha_t == (30.0, -2.0)
        assert tp.sigma == 4.0

    def test_round_trip(self):
        p = PathlossParams(61.37, 2.884, 3.51)
        q = from_transformed(to_transformed(p, 88.19), 88.19)
        assert q.pl_d0 == pytest.approx(p.pl_d0, rel=1e-12)
        assert q.n == pytest.approx(p.n, rel=1e-12)
        assert q.sigma == p.sigma
