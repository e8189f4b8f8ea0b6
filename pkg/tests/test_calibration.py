import numpy as np
import pytest

from optoshape import (
    CalibrationDataset,
    InsufficientSamples,
    RankDeficient,
    estimate_batch,
    estimate_orientation,
    fit_linear,
    fit_poly,
    poly_basis,
)
from optoshape.calibration import (
    PolyCalibration,
    pearson,
    poly_design_matrix,
    run_linear_theory_demo,
    theoretical_intensities,
)


def synthetic_dataset(rng, n=200, k=None, j=None, noise=0.0):
    """Dataset whose truths come exactly from known coefficient vectors."""
    k = rng.uniform(-2.0, 2.0, size=8) if k is None else np.asarray(k)
    j = rng.uniform(-2.0, 2.0, size=8) if j is None else np.asarray(j)
    volts = rng.uniform(0.5, 4.5, size=(n, 2))
    design = poly_design_matrix(volts)
    truths = np.column_stack([design @ k, design @ j])
    if noise:
        truths = truths + rng.normal(0.0, noise, truths.shape)
    return CalibrationDataset(0, truths, volts), k, j


class TestBasis:
    def test_basis_order(self):
        v1, v2 = 2.0, 3.0
        expected = [2.0, 3.0, 4.0, 9.0, 6.0, 18.0, 12.0, 1.0]
        assert np.allclose(poly_basis((v1, v2)), expected)

    def test_design_matrix_stacks_basis_rows(self, rng):
        volts = rng.uniform(0.0, 5.0, size=(17, 2))
        design = poly_design_matrix(volts)
        assert design.shape == (17, 8)
        for i in range(17):
            assert np.allclose(design[i], poly_basis(volts[i]))


class TestPolyFit:
    def test_recovers_known_coefficients(self, rng):
        dataset, k, j = synthetic_dataset(rng)
        cal = fit_poly(dataset)
        assert np.allclose(cal.k, k, atol=1e-9)
        assert np.allclose(cal.j, j, atol=1e-9)
        assert cal.fit_rms_pitch_deg < 1e-9
        assert cal.fit_rms_roll_deg < 1e-9

    def test_training_residual_tiny_for_generated_data(self, rng):
        for _ in range(5):
            scale = 10.0 ** rng.integers(0, 4)
            dataset, k, j = synthetic_dataset(
                rng, k=rng.uniform(-scale, scale, 8),
                j=rng.uniform(-scale, scale, 8))
            cal = fit_poly(dataset)
            est = estimate_batch(dataset.voltages, cal)
            assert np.abs(est - dataset.truths).max() < 1e-6

    def test_insufficient_samples(self, rng):
        dataset, _, _ = synthetic_dataset(rng, n=7)
        with pytest.raises(InsufficientSamples):
            fit_poly(dataset)

    def test_identical_signals_rank_deficient(self):
        volts = np.tile([2.0, 3.0], (20, 1))
        truths = np.tile([1.0, -1.0], (20, 1))
        with pytest.raises(RankDeficient) as err:
            fit_poly(CalibrationDataset(0, truths, volts))
        assert err.value.condition is None or err.value.condition > 1e9

    def test_prediction_invariant_to_sample_order(self, rng):
        dataset, _, _ = synthetic_dataset(rng, noise=0.05)
        perm = rng.permutation(len(dataset))
        shuffled = CalibrationDataset(0, dataset.truths[perm],
                                      dataset.voltages[perm])
        probe = rng.uniform(0.5, 4.5, size=(50, 2))
        a = estimate_batch(probe, fit_poly(dataset))
        b = estimate_batch(probe, fit_poly(shuffled))
        assert np.allclose(a, b, atol=1e-8)

    def test_on_surface_sample_leaves_fit_unchanged(self, rng):
        dataset, k, j = synthetic_dataset(rng)
        cal = fit_poly(dataset)
        extra_v = np.array([[2.2, 1.7]])
        basis = poly_basis(extra_v[0])
        extra_t = np.array([[basis @ cal.k, basis @ cal.j]])
        grown = CalibrationDataset(
            0,
            np.vstack([dataset.truths, extra_t]),
            np.vstack([dataset.voltages, extra_v]),
        )
        cal2 = fit_poly(grown)
        assert np.allclose(cal2.k, cal.k, atol=1e-9)
        assert np.allclose(cal2.j, cal.j, atol=1e-9)

    def test_scaling_does_not_change_predictions(self, rng):
        dataset, _, _ = synthetic_dataset(rng, noise=0.1)
        cal = fit_poly(dataset)
        design = poly_design_matrix(dataset.voltages)
        plain, *_ = np.linalg.lstsq(design, dataset.truths, rcond=None)
        probe = poly_design_matrix(rng.uniform(0.5, 4.5, size=(40, 2)))
        assert np.allclose(probe @ np.column_stack([cal.k, cal.j]),
                           probe @ plain, atol=1e-8)

    def test_ridge_cannot_beat_plain_training_residual(self, rng):
        dataset, _, _ = synthetic_dataset(rng, noise=0.1)
        plain = fit_poly(dataset)
        ridged = fit_poly(dataset, ridge=10.0)
        assert ridged.fit_rms_pitch_deg >= plain.fit_rms_pitch_deg - 1e-12
        assert ridged.fit_rms_roll_deg >= plain.fit_rms_roll_deg - 1e-12
        # an overwhelming penalty drives the map toward zero output
        crushed = fit_poly(dataset, ridge=1e12)
        est = estimate_batch(dataset.voltages, crushed)
        assert np.abs(est).max() < 0.01 * np.abs(dataset.truths).max()

    def test_repeat_fit_bit_identical(self, rng):
        dataset, _, _ = synthetic_dataset(rng, noise=0.02)
        a = fit_poly(dataset)
        b = fit_poly(dataset)
        assert np.array_equal(a.k, b.k)
        assert np.array_equal(a.j, b.j)

    def test_estimate_single_matches_batch(self, rng):
        cal = PolyCalibration(0, rng.normal(size=8), rng.normal(size=8),
                              0.0, 0.0)
        volts = rng.uniform(0.5, 4.5, size=(10, 2))
        batch = estimate_batch(volts, cal)
        for i in range(10):
            o = estimate_orientation(volts[i], cal)
            assert np.isclose(o.pitch, batch[i, 0])
            assert np.isclose(o.roll, batch[i, 1])


class TestLinearFit:
    def test_single_sample_rank_deficient(self):
        with pytest.raises(RankDeficient):
            fit_linear(np.array([[1.0, 2.0]]), np.array([[3.0, 4.0]]))

    def test_collinear_signals_rank_deficient(self):
        signals = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        truths = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        with pytest.raises(RankDeficient):
            fit_linear(signals, truths)

    def test_exact_linear_relation_recovered(self, rng):
        matrix = np.array([[1.5, -0.5], [0.25, 2.0]])  # rows (roll, pitch)
        signals = rng.uniform(0.1, 1.0, size=(30, 2))
        roll_pitch = signals @ matrix.T
        truths = roll_pitch[:, ::-1]
        cal = fit_linear(signals, truths)
        assert np.allclose(cal.matrix, matrix, atol=1e-9)
        est = cal.estimate(signals[0])
        assert np.isclose(est.pitch, truths[0, 0])
        assert np.isclose(est.roll, truths[0, 1])


class TestPearson:
    def test_perfect_correlation(self):
        x = np.arange(10.0)
        assert np.isclose(pearson(x, 2.0 * x + 1.0), 1.0)
        assert np.isclose(pearson(x, -x), -1.0)

    def test_zero_variance_is_none(self):
        assert pearson(np.ones(5), np.arange(5.0)) is None
        assert pearson(np.arange(5.0), np.zeros(5)) is None


class TestTheoryDemo:
    def test_intensities_shape(self, default_geometry, quiet_model):
        grid = np.array([[p, r] for p in (-10.0, 0.0, 10.0)
                         for r in (-10.0, 0.0, 10.0)])
        inten = theoretical_intensities(default_geometry, quiet_model, grid)
        assert inten.shape == (9, 2)
        assert np.all(inten > 0)

    def test_disjoint_test_correlates(self, default_geometry, quiet_model,
                                      rng):
        train = np.array([[p, r] for p in np.linspace(-15, 15, 11)
                          for r in np.linspace(-15, 15, 11)])
        t = np.linspace(0.0, 1.0, 120, endpoint=False)
        test = np.column_stack([10.0 * np.sin(2 * np.pi * t),
                                10.0 * np.cos(2 * np.pi * t)])
        result = run_linear_theory_demo(default_geometry, quiet_model,
                                        train, test)
        assert result.pearson_pitch > 0.95
        assert result.pearson_roll > 0.95

    def test_fit_minimizes_training_residual(self, default_geometry,
                                             quiet_model):
        # the training-set residual of the fitted map lower-bounds that of
        # any other linear map, e.g. one fitted on a different motion
        train = np.array([[p, r] for p in np.linspace(-15, 15, 9)
                          for r in np.linspace(-15, 15, 9)])
        t = np.linspace(0.0, 1.0, 80, endpoint=False)
        other = np.column_stack([12.0 * np.sin(2 * np.pi * t),
                                 12.0 * np.sin(4 * np.pi * t + 0.5)])
        signals = theoretical_intensities(default_geometry, quiet_model, train)
        own = fit_linear(signals, train)
        foreign = run_linear_theory_demo(default_geometry, quiet_model,
                                         other, train).calibration
        sse_own = ((own.estimate_batch(signals) - train) ** 2).sum()
        sse_foreign = ((foreign.estimate_batch(signals) - train) ** 2).sum()
        assert sse_own <= sse_foreign + 1e-9

    def test_constant_test_motion_has_no_correlation(self, default_geometry,
                                                     quiet_model):
        train = np.array([[p, r] for p in np.linspace(-15, 15, 9)
                          for r in np.linspace(-15, 15, 9)])
        test = np.tile([5.0, -5.0], (20, 1))
        result = run_linear_theory_demo(default_geometry, quiet_model,
                                        train, test)
        assert result.pearson_pitch is None
        assert result.pearson_roll is None
