"""Optical path: sensor gap -> received power -> phototransistor voltage.

The LED is treated as a point source whose reflected beam grows with the
travelled path; the power collected by the phototransistor aperture falls
with the square of the beam radius. The collector voltage drops as the
photocurrent rises, so voltage increases with distance over the working
band, inverse to the optical power.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GeometryError, NonPositiveDistance, WorkingBandWarning
from .geometry import sensor_distances

SPREAD_LAWS = ("affine", "gaussian")


class VoltagePair(NamedTuple):
    """Phototransistor output voltages of one sensor pair, volts."""

    v1: float
    v2: float


@dataclass(frozen=True)
class OptoSensorModel:
    """Emission, beam-spread, transduction and noise parameters.

    emitted_power     LED output, arbitrary power units (absorbed by gain)
    aperture_area_mm2 phototransistor collection area
    spread_law        'affine' (radius grows linearly with path) or
                      'gaussian' (hyperbolic waist growth)
    omega0_mm         beam radius at zero path
    kappa             affine spread rate, mm of radius per mm of path
    rayleigh_mm       gaussian waist-doubling scale
    mirror_amplification
                      widen the path to 2d(1 + d/r_sphere) to account for the
                      extra divergence a convex mirror adds; plain 2d when off
    vcc_volts         collector supply; output voltage is clamped to [0, vcc]
    gain              volts removed from vcc per power unit received
    r1_ohms, r2_ohms  LED / phototransistor resistors, documentation only
                      (their effect is folded into gain)
    band_mm           usable proximity interval; leaving it is flagged,
                      never fatal
    noise_sigma_volts additive gaussian voltage noise
    """

    emitted_power: float = 1.0
    aperture_area_mm2: float = 0.02
    spread_law: str = "affine"
    omega0_mm: float = 0.3
    kappa: float = 0.25
    rayleigh_mm: float = 2.0
    mirror_amplification: bool = True
    vcc_volts: float = 5.0
    gain: float = 300.0
    r1_ohms: float = 680.0
    r2_ohms: float = 10000.0
    band_mm: tuple = (0.5, 3.0)
    noise_sigma_volts: float = 0.005

    def __post_init__(self):
        object.__setattr__(self, "band_mm", (float(self.band_mm[0]), float(self.band_mm[1])))
        checks = [
            (self.emitted_power > 0, f"emitted_power must be > 0, got {self.emitted_power}"),
            (self.aperture_area_mm2 > 0, f"aperture_area_mm2 must be > 0, got {self.aperture_area_mm2}"),
            (self.spread_law in SPREAD_LAWS, f"spread_law must be one of {SPREAD_LAWS}, got {self.spread_law!r}"),
            (self.omega0_mm > 0, f"omega0_mm must be > 0, got {self.omega0_mm}"),
            (self.kappa >= 0, f"kappa must be >= 0, got {self.kappa}"),
            (self.rayleigh_mm > 0, f"rayleigh_mm must be > 0, got {self.rayleigh_mm}"),
            (self.vcc_volts > 0, f"vcc_volts must be > 0, got {self.vcc_volts}"),
            (self.gain > 0, f"gain must be > 0, got {self.gain}"),
            (self.band_mm[0] < self.band_mm[1], f"band_mm must be increasing, got {self.band_mm}"),
            (self.noise_sigma_volts >= 0, f"noise_sigma_volts must be >= 0, got {self.noise_sigma_volts}"),
        ]
        for ok, message in checks:
            if not ok:
                raise GeometryError(message)


def _effective_path(d, model, reflector_radius):
    """Round-trip optical path for a gap ``d``."""
    if model.mirror_amplification:
        if reflector_radius is None:
            raise ValueError("mirror_amplification needs the reflector radius")
        return 2.0 * d * (1.0 + d / reflector_radius)
    return 2.0 * d


def beam_radius(d, model, reflector_radius=None):
    """Reflected-beam radius at the sensor plane for gap ``d`` (mm).

    Monotone increasing in ``d`` (strictly, unless the affine rate is zero)
    and never below the zero-path radius.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise NonPositiveDistance(f"beam radius needs d > 0, got {d.min() if d.ndim else d}")
    path = _effective_path(d, model, reflector_radius)
    if model.spread_law == "affine":
        omega = model.omega0_mm + model.kappa * path
    else:
        omega = model.omega0_mm * np.sqrt(1.0 + (path / model.rayleigh_mm) ** 2)
    return omega if omega.ndim else float(omega)


def received_power(d, model, reflector_radius=None):
    """Optical power collected by the aperture at gap ``d``.

    The emitted power spreads over the beam cross-section, so the collected
    share is aperture_area / (pi * radius^2); strictly decreasing in ``d``
    whenever the beam radius strictly grows.
    """
    omega = np.asarray(beam_radius(d, model, reflector_radius))
    power = model.emitted_power * model.aperture_area_mm2 / (np.pi * omega ** 2)
    return power if power.ndim else float(power)


def power_to_voltage(power, model):
    """Collector voltage for a received power level.

    Photocurrent pulls the collector down from the supply, so the map is
    vcc - gain * power, clamped to the supply rails.
    """
    power = np.asarray(power, dtype=float)
    if np.any(power < 0.0):
        raise ValueError("received power cannot be negative")
    volts = np.clip(model.vcc_volts - model.gain * power, 0.0, model.vcc_volts)
    return volts if volts.ndim else float(volts)


def voltage_at_distance(d, model, reflector_radius=None):
    """Noise-free voltage response at gap ``d``; convenience composition."""
    return power_to_voltage(received_power(d, model, reflector_radius), model)


def count_band_violations(distances, model):
    """Number of gap values outside the usable working band."""
    d = np.asarray(distances, dtype=float)
    lo, hi = model.band_mm
    return int(np.count_nonzero((d < lo) | (d > hi)))


def simulate_voltages(geometry, model, pitch_deg, roll_deg, rng=None):
    """Simulate the sensor-pair voltages over arrays of orientations.

    Parameters
    ----------
    geometry : UnitGeometry
    model : OptoSensorModel
    pitch_deg, roll_deg : (N,) arrays, degrees, within the unit limit
    rng : numpy Generator, required when the model carries noise

    Returns
    -------
    (volts, violations) : ((N, n_sensors) ndarray, int)
        Noisy voltages clamped to the supply rails, plus the count of gap
        samples that left the working band.
    """
    pitch = np.atleast_1d(np.asarray(pitch_deg, dtype=float))
    roll = np.atleast_1d(np.asarray(roll_deg, dtype=float))
    if not pitch.size:
        return np.empty((0, geometry.n_sensors)), 0
    geometry.check_within_limits(pitch, roll)
    gaps = sensor_distances(geometry, pitch, roll)
    violations = count_band_violations(gaps, model)
    volts = np.asarray(voltage_at_distance(gaps, model, geometry.reflector_radius))
    if model.noise_sigma_volts > 0.0:
        if rng is None:
            raise ValueError("noise_sigma_volts > 0 requires an rng")
        volts = volts + rng.normal(0.0, model.noise_sigma_volts, volts.shape)
        volts = np.clip(volts, 0.0, model.vcc_volts)
    return volts, violations


def simulate_sensor_pair(geometry, model, orientation, rng=None):
    """Simulate one VoltagePair at a single orientation.

    Emits a WorkingBandWarning when a gap leaves the band. Deterministic for
    a given generator state; noise-free when the model sigma is zero.
    """
    volts, violations = simulate_voltages(
        geometry, model, float(orientation[0]), float(orientation[1]), rng
    )
    if violations:
        warnings.warn(
            f"{violations} sensor gap(s) outside working band {model.band_mm} mm",
            WorkingBandWarning,
            stacklevel=2,
        )
    return VoltagePair(float(volts[0, 0]), float(volts[0, 1]))
