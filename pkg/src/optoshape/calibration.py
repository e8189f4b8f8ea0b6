"""Signal-to-orientation calibration maps.

Two maps are provided. The linear 2x2 map takes a pair of theoretical
intensities straight to (roll, pitch) and exists to demonstrate that two
signals suffice to separate the two angles. The production map is an
8-term polynomial in the two voltages, one coefficient set per axis,
fitted per unit by ordinary least squares; the map is nonlinear in the
voltages but linear in its coefficients, so the least-squares solution is
the exact minimizer.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import InsufficientSamples, RankDeficient
from .geometry import Orientation, sensor_distances
from .photonics import VoltagePair, received_power

MIN_POLY_SAMPLES = 8
RANK_RTOL = 1e-10


class CalibrationSample(NamedTuple):
    """One recorded pair: ground-truth attitude and sensor signals."""

    truth: Orientation
    signals: VoltagePair


@dataclass
class CalibrationDataset:
    """Signal recordings of one unit over a motion pattern.

    truths   (N, 2) ground-truth (pitch, roll) in degrees
    voltages (N, 2) matching sensor voltages
    """

    unit_index: int
    truths: np.ndarray
    voltages: np.ndarray
    band_violations: int = 0

    def __post_init__(self):
        self.truths = np.asarray(self.truths, dtype=float).reshape(-1, 2)
        self.voltages = np.asarray(self.voltages, dtype=float).reshape(-1, 2)
        if self.truths.shape != self.voltages.shape:
            raise ValueError("truths and voltages must pair up one to one")
        if not (np.isfinite(self.truths).all() and np.isfinite(self.voltages).all()):
            raise ValueError("dataset contains non-finite values")

    def __len__(self):
        return self.truths.shape[0]

    def samples(self):
        for (p, r), (v1, v2) in zip(self.truths, self.voltages):
            yield CalibrationSample(Orientation(p, r), VoltagePair(v1, v2))


def poly_basis(signals):
    """Feature vector of the 8-term polynomial map.

    Order: [v1, v2, v1^2, v2^2, v1*v2, v1*v2^2, v2*v1^2, 1].
    """
    v1, v2 = float(signals[0]), float(signals[1])
    return np.array([v1, v2, v1 * v1, v2 * v2, v1 * v2,
                     v1 * v2 * v2, v2 * v1 * v1, 1.0])


def poly_design_matrix(voltages):
    """Stacked poly_basis rows for an (N, 2) voltage array."""
    v = np.asarray(voltages, dtype=float).reshape(-1, 2)
    v1, v2 = v[:, 0], v[:, 1]
    return np.column_stack([v1, v2, v1 ** 2, v2 ** 2, v1 * v2,
                            v1 * v2 ** 2, v2 * v1 ** 2, np.ones_like(v1)])


def _scaled_lstsq(design, targets, ridge=0.0, what="design matrix"):
    """Least squares with max-abs column scaling and a rank gate.

    Column scaling only conditions the solve; the returned coefficients are
    unscaled back, so predictions match an unscaled solve on well-posed data.
    """
    rows, cols = design.shape
    if rows < cols:
        raise RankDeficient(
            f"{what} underdetermined ({rows} samples for {cols} unknowns)",
            condition=float("inf"),
        )
    scale = np.abs(design).max(axis=0)
    scale[scale == 0.0] = 1.0
    scaled = design / scale
    svals = np.linalg.svd(scaled, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] < RANK_RTOL * svals[0]:
        cond = float(svals[0] / svals[-1]) if svals[-1] > 0 else float("inf")
        raise RankDeficient(f"{what} numerically rank deficient", condition=cond)
    if ridge > 0.0:
        gram = scaled.T @ scaled + ridge * np.eye(scaled.shape[1])
        coe = np.linalg.solve(gram, scaled.T @ targets)
    else:
        coe, *_ = np.linalg.lstsq(scaled, targets, rcond=None)
    return coe / (scale[:, None] if targets.ndim == 2 else scale)


@dataclass(frozen=True)
class LinearCalibration:
    """2x2 intensity-to-angle map.

    ``matrix`` rows produce roll and pitch respectively from the two
    signals; ``fit_rms_deg`` holds the training residuals as (pitch, roll).
    """

    matrix: np.ndarray
    fit_rms_deg: tuple

    def estimate(self, signals):
        roll, pitch = self.matrix @ np.asarray(signals, dtype=float)
        return Orientation(float(pitch), float(roll))

    def estimate_batch(self, signals):
        """(N, 2) signals -> (N, 2) estimated (pitch, roll)."""
        out = np.asarray(signals, dtype=float) @ self.matrix.T
        return out[:, ::-1]


def fit_linear(signals, truths):
    """Fit the 2x2 map minimizing the summed squared angle error.

    Parameters
    ----------
    signals : (N, 2) array of signal pairs
    truths : (N, 2) array of ground-truth (pitch, roll) degrees

    Raises
    ------
    RankDeficient
        When the signal pairs are collinear (fewer than two independent
        directions, e.g. a single sample).
    """
    x = np.asarray(signals, dtype=float).reshape(-1, 2)
    t = np.asarray(truths, dtype=float).reshape(-1, 2)
    if x.shape[0] != t.shape[0]:
        raise ValueError("signals and truths must pair up one to one")
    targets = t[:, ::-1]  # solve for (roll, pitch) rows
    coe = _scaled_lstsq(x, targets, what="linear signal matrix")
    matrix = coe.T
    resid = x @ coe - targets
    rms_roll, rms_pitch = np.sqrt((resid ** 2).mean(axis=0))
    return LinearCalibration(matrix, (float(rms_pitch), float(rms_roll)))


@dataclass(frozen=True)
class PolyCalibration:
    """Per-unit 8+8 coefficient map from a VoltagePair to (pitch, roll)."""

    unit_index: int
    k: np.ndarray              # pitch coefficients, shape (8,)
    j: np.ndarray              # roll coefficients, shape (8,)
    fit_rms_pitch_deg: float
    fit_rms_roll_deg: float

    def __post_init__(self):
        object.__setattr__(self, "k", np.asarray(self.k, dtype=float).reshape(8))
        object.__setattr__(self, "j", np.asarray(self.j, dtype=float).reshape(8))


def fit_poly(dataset, ridge=0.0):
    """Fit the per-unit polynomial map by least squares.

    Pitch and roll are solved independently against a shared design matrix.
    Columns are max-abs scaled before the solve to tame the mixed quadratic
    and cubic voltage terms; coefficients are unscaled afterwards.

    Raises
    ------
    InsufficientSamples
        Fewer than 8 samples.
    RankDeficient
        Scaled design matrix has a singular-value ratio above 1e10, e.g.
        when all signal pairs coincide.
    """
    n = len(dataset)
    if n < MIN_POLY_SAMPLES:
        raise InsufficientSamples(
            f"polynomial fit needs >= {MIN_POLY_SAMPLES} samples, got {n}"
        )
    design = poly_design_matrix(dataset.voltages)
    coe = _scaled_lstsq(design, dataset.truths, ridge=ridge, what="polynomial design matrix")
    resid = design @ coe - dataset.truths
    rms = np.sqrt((resid ** 2).mean(axis=0))
    return PolyCalibration(dataset.unit_index, coe[:, 0], coe[:, 1],
                           float(rms[0]), float(rms[1]))


def estimate_orientation(signals, calibration):
    """Apply a PolyCalibration to one VoltagePair.

    Estimates are intentionally not clamped to the unit range; out-of-range
    values are useful diagnostics.
    """
    basis = poly_basis(signals)
    return Orientation(float(basis @ calibration.k), float(basis @ calibration.j))


def estimate_batch(voltages, calibration):
    """(N, 2) voltages -> (N, 2) estimated (pitch, roll) degrees."""
    design = poly_design_matrix(voltages)
    return np.column_stack([design @ calibration.k, design @ calibration.j])


def pearson(x, y):
    """Pearson correlation, or None when either trace has zero variance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx = x - x.mean()
    sy = y - y.mean()
    vx = float(sx @ sx)
    vy = float(sy @ sy)
    if vx == 0.0 or vy == 0.0:
        return None
    return float((sx @ sy) / np.sqrt(vx * vy))


@dataclass(frozen=True)
class TheoryDemoResult:
    """Linear-map demonstration output: paired traces plus correlations."""

    actual: np.ndarray        # (N, 2) commanded (pitch, roll), degrees
    estimated: np.ndarray     # (N, 2) linear-map estimates, degrees
    pearson_pitch: Optional[float]
    pearson_roll: Optional[float]
    calibration: LinearCalibration


def theoretical_intensities(geometry, model, orientations):
    """Noise-free received-power pairs over orientations, no transduction."""
    arr = np.asarray(orientations, dtype=float).reshape(-1, 2)
    geometry.check_within_limits(arr[:, 0], arr[:, 1])
    gaps = sensor_distances(geometry, arr[:, 0], arr[:, 1])
    return np.asarray(received_power(gaps, model, geometry.reflector_radius))


def run_linear_theory_demo(geometry, model, train_orientations, test_orientations):
    """Fit the linear map on theoretical intensities and score it on a
    disjoint motion.

    Both stages use raw received power (no voltage transduction, no noise).
    Per-axis Pearson correlation is None when a test axis never moves.
    """
    train = np.asarray(train_orientations, dtype=float).reshape(-1, 2)
    test = np.asarray(test_orientations, dtype=float).reshape(-1, 2)
    cal = fit_linear(theoretical_intensities(geometry, model, train), train)
    estimated = cal.estimate_batch(theoretical_intensities(geometry, model, test))
    return TheoryDemoResult(
        actual=test,
        estimated=estimated,
        pearson_pitch=pearson(estimated[:, 0], test[:, 0]),
        pearson_roll=pearson(estimated[:, 1], test[:, 1]),
        calibration=cal,
    )
