"""Sweep generation, synthetic dataset assembly, and experiment orchestration.

Ties the geometry and photonics layers together: exhaustive calibration grids
per unit, triangle-wave validation motions for the assembled chain, and the
end-to-end run that sweeps, fits, validates, and scores tip error.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import calibration, geometry, kinematics, photonics
from .errors import InvalidSpec
from .rng import STREAM_DATASET, STREAM_VALIDATION, derive_rng

# Voltage noise level (volts) at which the default geometry/model stack lands
# near 0.8 deg per-unit estimation RMS on the 0.5 deg sweep preset.
NOISE_FOR_UNIT_RMS_0P8_DEG = 0.033

_TRIANGLE_PHASE = np.array([0.0, 0.25, 0.5, 0.75, 1.0])


@dataclass(frozen=True)
class SweepSpec:
    """Pitch-major calibration grid: outer loop pitch, inner loop roll."""

    limit_deg: float = 15.0
    step_deg: float = 0.1

    def __post_init__(self):
        if not (np.isfinite(self.limit_deg) and np.isfinite(self.step_deg)):
            raise InvalidSpec("sweep limit and step must be finite")
        if self.step_deg <= 0 or self.step_deg > self.limit_deg:
            raise InvalidSpec(
                f"need 0 < step <= limit, got step={self.step_deg} "
                f"limit={self.limit_deg}"
            )


@dataclass(frozen=True)
class ValidationSpec:
    """Cyclic single-axis tip motion, split equally across the units."""

    amplitude_deg: float = 60.0
    cycles: int = 4
    samples_per_cycle: int = 200
    axis: str = "pitch"

    def __post_init__(self):
        if self.axis not in ("pitch", "roll"):
            raise InvalidSpec(f"axis must be 'pitch' or 'roll', got {self.axis!r}")
        if self.cycles < 1:
            raise InvalidSpec(f"cycles must be >= 1, got {self.cycles}")
        if self.samples_per_cycle < 4:
            raise InvalidSpec(
                f"samples_per_cycle must be >= 4, got {self.samples_per_cycle}"
            )
        if not np.isfinite(self.amplitude_deg) or self.amplitude_deg <= 0:
            raise InvalidSpec(f"amplitude must be positive, got {self.amplitude_deg}")


@dataclass
class MotionTrace:
    """Per-unit and tip-level traces of one validation run.

    Estimate arrays are None until an estimation pass fills them in.
    """

    axis: str
    cycles: int
    unit_truth: np.ndarray           # (T, n_units, 2) per-unit (pitch, roll) deg
    voltages: np.ndarray             # (T, n_units, 2) sensor volts
    tip_truth: np.ndarray            # (T, 2) tip (pitch, roll) deg
    unit_est: Optional[np.ndarray] = None
    tip_est: Optional[np.ndarray] = None
    band_violations: int = 0

    @property
    def n_samples(self):
        return self.unit_truth.shape[0]

    @property
    def n_units(self):
        return self.unit_truth.shape[1]


@dataclass(frozen=True)
class ExperimentResult:
    """Everything produced by one end-to-end calibrate-then-validate run."""

    calibrations: List[calibration.PolyCalibration]
    trace: MotionTrace
    report: kinematics.ErrorReport


def generate_sweep(spec):
    """Orientation grid for one calibration sweep.

    Returns
    -------
    (N, 2) ndarray of (pitch, roll) degrees, pitch-major: the outer loop walks
    pitch from -limit to +limit, the inner loop walks roll the same way.
    The grid includes both endpoints whenever limit/step is integral;
    otherwise it is truncated symmetrically.
    """
    half = int(np.floor(spec.limit_deg / spec.step_deg + 1e-9))
    axis_vals = spec.step_deg * np.arange(-half, half + 1)
    pitch, roll = np.meshgrid(axis_vals, axis_vals, indexing="ij")
    return np.column_stack([pitch.ravel(), roll.ravel()])


def generate_validation_motion(spec, n_units, per_unit_limit_deg=15.0):
    """Triangle-wave validation trace divided equally across units.

    The tip-level segment angle follows a triangle wave through
    0 -> +amplitude -> 0 -> -amplitude -> 0 each cycle; every unit carries an
    equal 1/n_units share on the chosen axis, zero on the other.

    Returns
    -------
    (T, n_units, 2) ndarray of per-unit (pitch, roll) degrees with
    T = cycles * samples_per_cycle.

    Raises
    ------
    InvalidSpec
        When the equal split would push any unit past its rotation limit.
    """
    if n_units < 1:
        raise InvalidSpec(f"n_units must be >= 1, got {n_units}")
    per_unit_peak = spec.amplitude_deg / n_units
    if per_unit_peak > per_unit_limit_deg + 1e-9:
        raise InvalidSpec(
            f"amplitude {spec.amplitude_deg} deg over {n_units} units needs "
            f"{per_unit_peak:.3f} deg/unit, exceeding the "
            f"{per_unit_limit_deg} deg limit"
        )
    total = spec.cycles * spec.samples_per_cycle
    phase = (np.arange(total) / spec.samples_per_cycle) % 1.0
    keypoints = spec.amplitude_deg * np.array([0.0, 1.0, 0.0, -1.0, 0.0])
    wave = np.interp(phase, _TRIANGLE_PHASE, keypoints)
    trace = np.zeros((total, n_units, 2))
    axis_col = 0 if spec.axis == "pitch" else 1
    trace[:, :, axis_col] = (wave / n_units)[:, None]
    return trace


def synthesize_dataset(unit_geometry, model, orientations, seed,
                       unit_index=0, stream=STREAM_DATASET):
    """Simulate sensor voltages over a sweep into a calibration dataset.

    One sample per orientation, deterministic for a given (seed, stream,
    unit_index) triple. Working-band violations are counted, not fatal.
    """
    orientations = np.asarray(orientations, dtype=float).reshape(-1, 2)
    if orientations.shape[0] == 0:
        return calibration.CalibrationDataset(
            unit_index=unit_index,
            truths=np.empty((0, 2)),
            voltages=np.empty((0, unit_geometry.n_sensors)),
        )
    rng = derive_rng(seed, stream, unit_index)
    volts, violations = photonics.simulate_voltages(
        unit_geometry, model, orientations[:, 0], orientations[:, 1], rng
    )
    return calibration.CalibrationDataset(
        unit_index=unit_index,
        truths=orientations.copy(),
        voltages=volts,
        band_violations=violations,
    )


def calibrate_chain(chain, model, sweep_spec, seed):
    """Sweep and fit every unit independently, as on a locking fixture.

    Returns the per-unit polynomial calibrations in unit order.
    """
    orientations = generate_sweep(sweep_spec)
    cals = []
    for u, unit_geometry in enumerate(chain.units):
        if sweep_spec.limit_deg > unit_geometry.rotation_limit_deg + 1e-9:
            raise InvalidSpec(
                f"sweep limit {sweep_spec.limit_deg} deg exceeds unit {u} "
                f"rotation limit {unit_geometry.rotation_limit_deg} deg"
            )
        dataset = synthesize_dataset(unit_geometry, model, orientations, seed,
                                     unit_index=u)
        cals.append(calibration.fit_poly(dataset))
    return cals


def simulate_validation(chain, model, validation_spec, seed):
    """Run the validation motion through the sensor stack, without estimates."""
    limits = min(u.rotation_limit_deg for u in chain.units)
    unit_truth = generate_validation_motion(validation_spec, chain.n_units, limits)
    total = unit_truth.shape[0]
    voltages = np.empty((total, chain.n_units, 2))
    violations = 0
    for u, unit_geometry in enumerate(chain.units):
        rng = derive_rng(seed, STREAM_VALIDATION, u)
        volts, bad = photonics.simulate_voltages(
            unit_geometry, model, unit_truth[:, u, 0], unit_truth[:, u, 1], rng
        )
        voltages[:, u, :] = volts
        violations += bad
    tip_truth = kinematics.compose_tip_angles(unit_truth)
    return MotionTrace(
        axis=validation_spec.axis,
        cycles=validation_spec.cycles,
        unit_truth=unit_truth,
        voltages=voltages,
        tip_truth=tip_truth,
        band_violations=violations,
    )


def estimate_trace(trace, calibrations):
    """Fill a trace's per-unit and tip estimates from unit calibrations."""
    if len(calibrations) != trace.n_units:
        raise InvalidSpec(
            f"{len(calibrations)} calibrations for {trace.n_units} units"
        )
    unit_est = np.empty_like(trace.unit_truth)
    for u, cal in enumerate(calibrations):
        unit_est[:, u, :] = calibration.estimate_batch(trace.voltages[:, u, :], cal)
    trace.unit_est = unit_est
    trace.tip_est = kinematics.compose_tip_angles(unit_est)
    return trace


def run_experiment(chain, model, sweep_spec, validation_spec, seed):
    """Full pipeline: per-unit sweep and fit, then chain validation and scoring.

    Returns
    -------
    ExperimentResult with per-unit calibrations, the estimated validation
    trace, and the tip-level error report.
    """
    cals = calibrate_chain(chain, model, sweep_spec, seed)
    trace = simulate_validation(chain, model, validation_spec, seed)
    estimate_trace(trace, cals)
    report = kinematics.tip_error_metrics(trace.tip_est, trace.tip_truth,
                                          validation_spec.cycles)
    return ExperimentResult(calibrations=cals, trace=trace, report=report)


def demo_motion(samples=400, pitch_amp_deg=12.0, roll_amp_deg=12.0):
    """Smooth two-axis test motion, disjoint from any rectangular sweep grid."""
    t = np.arange(samples) / samples
    pitch = pitch_amp_deg * np.sin(2.0 * np.pi * t)
    roll = roll_amp_deg * np.sin(4.0 * np.pi * t + 0.7)
    return np.column_stack([pitch, roll])


def run_theory_demo(unit_geometry, model, train_step_deg=1.0, samples=400):
    """Linear two-by-two calibration demo on noiseless theoretical intensities.

    Trains the linear map on a coarse grid of raw received intensities and
    replays a disjoint smooth motion through it, reporting per-axis Pearson
    correlation between actual and estimated angles.
    """
    train = generate_sweep(
        SweepSpec(limit_deg=unit_geometry.rotation_limit_deg,
                  step_deg=train_step_deg)
    )
    test = demo_motion(samples)
    return calibration.run_linear_theory_demo(unit_geometry, model, train, test)
