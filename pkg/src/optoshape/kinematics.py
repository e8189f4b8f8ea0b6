"""Serial-chain composition and tip-level error statistics.

Each unit contributes a rigid transform: its attitude rotation followed by a
fixed translation along its outgoing axis (unit height plus the spring gap).
The chain product gives the tip frame; pitch and roll are read back from the
composed rotation with the same roll-after-pitch convention used to build
per-unit attitudes.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import GimbalLock, LengthMismatch, ZeroSpan
from .geometry import Orientation, UnitGeometry, orientation_matrix

RAD2DEG = 180.0 / np.pi

# |cos(pitch)| below this is too close to the +-90 deg singularity to factor
# the composed rotation into (pitch, roll).
GIMBAL_COS_LIMIT = 1e-6


@dataclass(frozen=True)
class ChainModel:
    """Stacked rotational units with their link dimensions."""

    units: List[UnitGeometry]
    unit_height_mm: float = 12.0
    inter_unit_gap_mm: float = 6.0

    def __post_init__(self):
        if len(self.units) < 1:
            raise ValueError("chain needs at least one unit")
        if self.unit_height_mm <= 0 or self.inter_unit_gap_mm < 0:
            raise ValueError("link dimensions must be positive")

    @classmethod
    def default(cls, n_units=4):
        return cls([UnitGeometry.default() for _ in range(n_units)])

    @property
    def n_units(self):
        return len(self.units)

    @property
    def link_length_mm(self):
        """Rigid length advanced per unit: unit height plus spring gap."""
        return self.unit_height_mm + self.inter_unit_gap_mm


@dataclass(frozen=True)
class TipPose:
    """Tip-frame position (mm) and orientation (degrees)."""

    position: np.ndarray
    orientation: Orientation


def unit_transform(orientation, unit_height_mm, inter_unit_gap_mm):
    """Homogeneous transform contributed by one unit.

    Rotation is roll-after-pitch; the child origin sits one link length along
    the rotated local +z axis.
    """
    rot = orientation_matrix(orientation)
    transform = np.eye(4)
    transform[:3, :3] = rot
    transform[:3, 3] = rot @ np.array([0.0, 0.0, unit_height_mm + inter_unit_gap_mm])
    return transform


def extract_pitch_roll(rotation):
    """Read (pitch, roll) degrees back from a composed rotation matrix.

    Inverts the roll-after-pitch factorization, ignoring any residual swing
    about the local z axis.

    Raises
    ------
    GimbalLock
        When pitch is within numerical reach of +-90 degrees.
    """
    r = np.asarray(rotation, dtype=float)
    cos_pitch = float(np.hypot(r[0, 0], r[0, 1]))
    if cos_pitch < GIMBAL_COS_LIMIT:
        raise GimbalLock("composed pitch too close to +-90 deg to factor")
    pitch = np.arctan2(r[0, 2], cos_pitch)
    roll = np.arctan2(-r[1, 2], r[2, 2])
    return float(pitch * RAD2DEG), float(roll * RAD2DEG)


def compose_chain(chain, per_unit_orientations):
    """Compose per-unit attitudes into the tip pose, root to tip.

    Raises
    ------
    LengthMismatch
        When the orientation list length differs from the unit count.
    """
    orients = [Orientation(float(o[0]), float(o[1])) for o in per_unit_orientations]
    if len(orients) != chain.n_units:
        raise LengthMismatch(
            f"got {len(orients)} orientations for {chain.n_units} units"
        )
    transform = np.eye(4)
    for o in orients:
        transform = transform @ unit_transform(o, chain.unit_height_mm, chain.inter_unit_gap_mm)
    pitch, roll = extract_pitch_roll(transform[:3, :3])
    return TipPose(transform[:3, 3].copy(), Orientation(pitch, roll))


def _rotation_stack(pitch_deg, roll_deg):
    """(N,) pitch/roll degrees -> (N, 3, 3) roll-after-pitch matrices."""
    p = np.asarray(pitch_deg, dtype=float) / RAD2DEG
    r = np.asarray(roll_deg, dtype=float) / RAD2DEG
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    zero = np.zeros_like(cp)
    return np.stack([
        np.stack([cp, zero, sp], axis=-1),
        np.stack([sr * sp, cr, -sr * cp], axis=-1),
        np.stack([-cr * sp, sr, cr * cp], axis=-1),
    ], axis=-2)


def compose_tip_angles(per_unit_trace):
    """Tip (pitch, roll) trace for a per-unit orientation trace.

    Parameters
    ----------
    per_unit_trace : (T, n_units, 2) array of per-unit (pitch, roll) degrees

    Returns
    -------
    (T, 2) ndarray of tip (pitch, roll) degrees.
    """
    trace = np.asarray(per_unit_trace, dtype=float)
    if trace.ndim != 3 or trace.shape[2] != 2:
        raise ValueError("expected a (T, n_units, 2) orientation trace")
    steps, n_units = trace.shape[0], trace.shape[1]
    total = np.broadcast_to(np.eye(3), (steps, 3, 3)).copy()
    for u in range(n_units):
        total = total @ _rotation_stack(trace[:, u, 0], trace[:, u, 1])
    cos_pitch = np.hypot(total[:, 0, 0], total[:, 0, 1])
    if np.any(cos_pitch < GIMBAL_COS_LIMIT):
        raise GimbalLock("composed pitch too close to +-90 deg to factor")
    pitch = np.arctan2(total[:, 0, 2], cos_pitch)
    roll = np.arctan2(-total[:, 1, 2], total[:, 2, 2])
    return np.column_stack([pitch, roll]) * RAD2DEG


def percent_error(errors, truth):
    """Mean absolute error as a percentage of the truth span.

    Raises
    ------
    ZeroSpan
        When the truth trace is constant, which leaves no span to divide by.
    """
    errors = np.asarray(errors, dtype=float)
    truth = np.asarray(truth, dtype=float)
    span = float(truth.max() - truth.min())
    if span == 0.0:
        raise ZeroSpan("truth trace is constant; percent error undefined")
    return float(100.0 * np.abs(errors).mean() / span)


def repeatability_std(trace, cycles):
    """Mean over phase-aligned samples of the across-cycle standard deviation.

    The trace is split into ``cycles`` equal segments; at each phase index the
    sample standard deviation across cycles is taken, then averaged.
    """
    trace = np.asarray(trace, dtype=float)
    if cycles < 1:
        raise ValueError(f"cycles must be >= 1, got {cycles}")
    if trace.size % cycles:
        raise LengthMismatch(
            f"trace length {trace.size} not divisible by {cycles} cycles"
        )
    if cycles == 1:
        return None
    phases = trace.reshape(cycles, -1)
    return float(phases.std(axis=0, ddof=1).mean())


@dataclass(frozen=True)
class AxisErrorStats:
    """Error statistics of one tip axis, degrees."""

    rms_deg: float
    max_deg: float
    percent_error: Optional[float]
    repeatability_std_deg: Optional[float]


@dataclass(frozen=True)
class ErrorReport:
    """Tip-level validation errors, one statistics block per axis."""

    pitch: AxisErrorStats
    roll: AxisErrorStats
    cycles: int

    def axis(self, name):
        if name not in ("pitch", "roll"):
            raise ValueError(f"unknown axis {name!r}")
        return getattr(self, name)


def _axis_stats(estimated, truth, cycles):
    err = estimated - truth
    rms = float(np.sqrt((err ** 2).mean()))
    peak = float(np.abs(err).max())
    span = float(truth.max() - truth.min())
    pct = percent_error(err, truth) if span > 0.0 else None
    rep = repeatability_std(estimated, cycles)
    return AxisErrorStats(rms, peak, pct, rep)


def tip_error_metrics(estimated, truth, cycles=1):
    """Compare estimated and true tip orientation traces.

    Parameters
    ----------
    estimated, truth : (T, 2) arrays of tip (pitch, roll) degrees
    cycles : number of motion cycles the trace covers; T must divide evenly

    Percent error is omitted (None) for an axis whose truth never moves.
    Repeatability is omitted when the trace covers a single cycle.
    """
    est = np.asarray(estimated, dtype=float).reshape(-1, 2)
    tru = np.asarray(truth, dtype=float).reshape(-1, 2)
    if est.shape != tru.shape:
        raise LengthMismatch(
            f"estimated trace {est.shape} does not match truth {tru.shape}"
        )
    if est.shape[0] == 0:
        raise ValueError("empty traces")
    if est.shape[0] % cycles:
        raise LengthMismatch(
            f"trace length {est.shape[0]} not divisible by {cycles} cycles"
        )
    return ErrorReport(
        pitch=_axis_stats(est[:, 0], tru[:, 0], cycles),
        roll=_axis_stats(est[:, 1], tru[:, 1], cycles),
        cycles=int(cycles),
    )
