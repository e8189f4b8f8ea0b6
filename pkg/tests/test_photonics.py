import warnings

import numpy as np
import pytest

from optoshape import (
    GeometryError,
    NonPositiveDistance,
    OptoSensorModel,
    UnitGeometry,
    WorkingBandWarning,
    beam_radius,
    received_power,
    simulate_sensor_pair,
    simulate_voltages,
    voltage_at_distance,
)
from optoshape.photonics import count_band_violations, power_to_voltage


class TestModelValidation:
    def test_defaults_valid(self):
        m = OptoSensorModel()
        assert m.band_mm == (0.5, 3.0)

    @pytest.mark.parametrize("kwargs", [
        {"emitted_power": 0.0},
        {"aperture_area_mm2": -1.0},
        {"spread_law": "cubic"},
        {"omega0_mm": 0.0},
        {"kappa": -0.1},
        {"rayleigh_mm": 0.0},
        {"vcc_volts": 0.0},
        {"gain": 0.0},
        {"band_mm": (3.0, 0.5)},
        {"noise_sigma_volts": -0.001},
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(GeometryError):
            OptoSensorModel(**kwargs)


class TestBeamRadius:
    def test_positive_distance_required(self, quiet_model):
        with pytest.raises(NonPositiveDistance):
            beam_radius(0.0, quiet_model, 7.5)
        with pytest.raises(NonPositiveDistance):
            beam_radius(np.array([1.0, -0.5]), quiet_model, 7.5)

    def test_mirror_amplification_needs_radius(self):
        m = OptoSensorModel(mirror_amplification=True)
        with pytest.raises(ValueError, match="reflector radius"):
            beam_radius(1.0, m)

    def test_affine_law_hand_value(self):
        m = OptoSensorModel(spread_law="affine", omega0_mm=0.3, kappa=0.25,
                            mirror_amplification=False)
        # path is twice the gap without the mirror term
        assert np.isclose(beam_radius(1.0, m), 0.3 + 0.25 * 2.0)

    def test_mirror_term_widens_path(self):
        flat = OptoSensorModel(mirror_amplification=False)
        curved = OptoSensorModel(mirror_amplification=True)
        d = np.linspace(0.5, 3.0, 11)
        assert np.all(beam_radius(d, curved, 7.5) > beam_radius(d, flat, 7.5))

    def test_both_laws_meet_at_zero_path(self):
        affine = OptoSensorModel(spread_law="affine",
                                 mirror_amplification=False)
        gauss = OptoSensorModel(spread_law="gaussian",
                                mirror_amplification=False)
        d = 1e-9
        assert np.isclose(beam_radius(d, affine), affine.omega0_mm, atol=1e-8)
        assert np.isclose(beam_radius(d, gauss), gauss.omega0_mm, atol=1e-8)

    def test_matched_far_field_slopes_converge(self):
        # affine rate omega0/rayleigh equals the gaussian asymptote slope, so
        # the two laws agree ever better far beyond the rayleigh scale
        omega0, rayleigh = 0.3, 2.0
        affine = OptoSensorModel(spread_law="affine", omega0_mm=omega0,
                                 kappa=omega0 / rayleigh,
                                 rayleigh_mm=rayleigh,
                                 mirror_amplification=False)
        gauss = OptoSensorModel(spread_law="gaussian", omega0_mm=omega0,
                                rayleigh_mm=rayleigh,
                                mirror_amplification=False)
        ratios = []
        for d in (10.0, 100.0, 1000.0):
            ratios.append(beam_radius(d, affine) / beam_radius(d, gauss))
        assert ratios[0] > ratios[1] > ratios[2] >= 1.0
        assert ratios[2] < 1.001

    def test_gaussian_law_hand_value(self):
        m = OptoSensorModel(spread_law="gaussian", omega0_mm=0.3,
                            rayleigh_mm=2.0, mirror_amplification=False)
        # gap 1 -> path 2 = rayleigh, radius grows by sqrt(2)
        assert np.isclose(beam_radius(1.0, m), 0.3 * np.sqrt(2.0))


class TestTransduction:
    def test_power_strictly_decreasing(self, quiet_model, rng):
        d = np.sort(rng.uniform(0.5, 3.0, size=2000))
        p = received_power(d, quiet_model, 7.5)
        assert np.all(np.diff(p) < 0)

    def test_voltage_nondecreasing(self, quiet_model, rng):
        d = np.sort(rng.uniform(0.5, 3.0, size=2000))
        v = voltage_at_distance(d, quiet_model, 7.5)
        assert np.all(np.diff(v) >= 0)

    def test_voltage_clamped_to_rails(self, quiet_model):
        assert power_to_voltage(1e9, quiet_model) == 0.0
        assert power_to_voltage(0.0, quiet_model) == quiet_model.vcc_volts
        with pytest.raises(ValueError, match="negative"):
            power_to_voltage(-1.0, quiet_model)

    def test_inverse_relation_hand_value(self, quiet_model):
        d = 1.0
        p = received_power(d, quiet_model, 7.5)
        v = voltage_at_distance(d, quiet_model, 7.5)
        assert np.isclose(v, quiet_model.vcc_volts - quiet_model.gain * p)

    def test_band_violation_count(self, quiet_model):
        d = np.array([0.4, 0.5, 1.0, 3.0, 3.1])
        assert count_band_violations(d, quiet_model) == 2


class TestSimulation:
    def test_shapes_and_band(self, default_geometry, quiet_model):
        pitch = np.linspace(-15.0, 15.0, 31)
        volts, violations = simulate_voltages(default_geometry, quiet_model,
                                              pitch, np.zeros_like(pitch))
        assert volts.shape == (31, 2)
        assert violations == 0
        assert np.all((volts >= 0) & (volts <= quiet_model.vcc_volts))

    def test_empty_input(self, default_geometry, quiet_model):
        volts, violations = simulate_voltages(default_geometry, quiet_model,
                                              np.array([]), np.array([]))
        assert volts.shape == (0, 2)
        assert violations == 0

    def test_noise_requires_rng(self, default_geometry, default_model):
        with pytest.raises(ValueError, match="requires an rng"):
            simulate_voltages(default_geometry, default_model,
                              np.array([0.0]), np.array([0.0]))

    def test_noiseless_runs_identical(self, default_geometry, quiet_model):
        pitch = np.linspace(-10.0, 10.0, 21)
        a, _ = simulate_voltages(default_geometry, quiet_model, pitch, -pitch)
        b, _ = simulate_voltages(default_geometry, quiet_model, pitch, -pitch)
        assert np.array_equal(a, b)

    def test_seeded_noise_reproducible(self, default_geometry, default_model):
        pitch = np.linspace(-10.0, 10.0, 21)
        a, _ = simulate_voltages(default_geometry, default_model, pitch,
                                 -pitch, np.random.default_rng(9))
        b, _ = simulate_voltages(default_geometry, default_model, pitch,
                                 -pitch, np.random.default_rng(9))
        assert np.array_equal(a, b)
        c, _ = simulate_voltages(default_geometry, default_model, pitch,
                                 -pitch, np.random.default_rng(10))
        assert not np.array_equal(a, c)

    def test_scalar_pair_matches_bulk_stream(self, default_geometry,
                                             default_model):
        pr = np.array([[1.0, -2.0], [5.0, 3.0], [-7.0, 7.0]])
        bulk, _ = simulate_voltages(default_geometry, default_model,
                                    pr[:, 0], pr[:, 1],
                                    np.random.default_rng(33))
        gen = np.random.default_rng(33)
        singles = [simulate_sensor_pair(default_geometry, default_model, o, gen)
                   for o in pr]
        assert np.allclose(bulk, np.asarray(singles), atol=1e-15)

    def test_band_warning_raised(self, quiet_model):
        # small ring: rest gap below the 0.5 mm band floor
        g = UnitGeometry.from_polar(8.1, (45.0, -45.0), (0.0, 0.0, 0.4), 7.8,
                                    rotation_limit_deg=15.0)
        with pytest.warns(WorkingBandWarning):
            simulate_sensor_pair(g, quiet_model, (0.0, 0.0))

    def test_in_band_no_warning(self, default_geometry, quiet_model):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            pair = simulate_sensor_pair(default_geometry, quiet_model,
                                        (3.0, -3.0))
        assert 0.0 < pair.v1 < quiet_model.vcc_volts
        assert 0.0 < pair.v2 < quiet_model.vcc_volts

    @pytest.mark.parametrize("azimuth", [30.0, 45.0, 60.0])
    def test_mirror_pair_equal_under_pure_pitch(self, quiet_model, azimuth):
        # sensors at +-azimuth see mirror-image gaps while the reflector
        # center stays in the xz plane, so pure pitch cannot split them
        g = UnitGeometry.from_polar(9.0, (azimuth, -azimuth),
                                    (0.6, 0.0, 0.8), 7.5,
                                    rotation_limit_deg=15.0)
        pitch = np.linspace(-15.0, 15.0, 31)
        volts, _ = simulate_voltages(g, quiet_model, pitch,
                                     np.zeros_like(pitch))
        assert np.allclose(volts[:, 0], volts[:, 1], atol=1e-12)
        rolled, _ = simulate_voltages(g, quiet_model, pitch,
                                      np.full_like(pitch, 5.0))
        assert not np.allclose(rolled[:, 0], rolled[:, 1], atol=1e-6)
