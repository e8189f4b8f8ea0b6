"""Reflector-sphere geometry for one rotational unit.

A unit carries a convex spherical reflector whose center sits slightly off
the rotation origin, plus two reflective optosensors fixed on the z=0 plane.
Tilting the unit in pitch (about y) and roll (about x) moves the sphere
center, which modulates the gap between each sensor and the sphere surface.
That gap is the quantity every downstream stage consumes.

All public angles are degrees; all lengths are millimeters.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import GeometryError, NonPositiveProximity

DEG2RAD = np.pi / 180.0

# Condition-number ceiling above which the two-sensor layout is considered
# unable to separate pitch from roll at the probed orientation.
DEFAULT_OBSERVABILITY_CONDITION = 50.0


class Orientation(NamedTuple):
    """Unit attitude: pitch about y, roll about x, both in degrees."""

    pitch: float
    roll: float


@dataclass(frozen=True)
class UnitGeometry:
    """Sensor positions, reflector sphere and rotation limits of one unit.

    sensor_positions      (2, 3) array, sensor optical centers on the z=0 plane
    reflector_center_rest (3,) array, sphere center at zero pitch/roll
    reflector_radius      sphere radius, mm
    rotation_limit_deg    command limit applied to |pitch| and |roll|
    """

    sensor_positions: np.ndarray
    reflector_center_rest: np.ndarray
    reflector_radius: float
    rotation_limit_deg: float = 15.0

    def __post_init__(self):
        sensors = np.asarray(self.sensor_positions, dtype=float).reshape(-1, 3)
        center = np.asarray(self.reflector_center_rest, dtype=float).reshape(3)
        object.__setattr__(self, "sensor_positions", sensors)
        object.__setattr__(self, "reflector_center_rest", center)
        if not (np.isfinite(sensors).all() and np.isfinite(center).all()):
            raise GeometryError("geometry contains non-finite coordinates")
        if not np.isfinite(self.reflector_radius) or self.reflector_radius <= 0:
            raise GeometryError(f"reflector_radius must be > 0, got {self.reflector_radius}")
        if self.rotation_limit_deg <= 0:
            raise GeometryError(f"rotation_limit_deg must be > 0, got {self.rotation_limit_deg}")
        if np.any(np.abs(sensors[:, 2]) > 1e-12):
            raise GeometryError("sensors must lie on the z=0 plane")
        rest = np.linalg.norm(sensors - center, axis=1)
        if np.any(rest <= self.reflector_radius):
            raise GeometryError(
                "sensor lies on or inside the reflector sphere at rest "
                f"(|f - s0| = {rest.min():.4f} mm, radius = {self.reflector_radius} mm)"
            )

    @classmethod
    def from_polar(cls, sensor_radius_mm, sensor_azimuths_deg, reflector_center_mm,
                   reflector_radius_mm, rotation_limit_deg=15.0):
        """Build a unit with sensors placed circumferentially around the origin.

        Each azimuth is measured from the +x axis on the z=0 plane.
        """
        az = np.asarray(sensor_azimuths_deg, dtype=float) * DEG2RAD
        sensors = sensor_radius_mm * np.column_stack(
            [np.cos(az), np.sin(az), np.zeros_like(az)]
        )
        return cls(sensors, np.asarray(reflector_center_mm, dtype=float),
                   float(reflector_radius_mm), float(rotation_limit_deg))

    @classmethod
    def default(cls):
        """Shipped geometry: 9 mm sensor ring at +-45 deg, sphere center
        (0.6, 0, 0.8) mm, radius 7.5 mm. Keeps both sensor gaps inside the
        0.5-3 mm working band over the full +-15 deg envelope, with the
        +-45 deg split balancing pitch and roll sensitivity."""
        return cls.from_polar(9.0, (45.0, -45.0), (0.6, 0.0, 0.8), 7.5, 15.0)

    @property
    def n_sensors(self):
        return self.sensor_positions.shape[0]

    def check_within_limits(self, pitch_deg, roll_deg):
        """Raise ValueError if any commanded angle exceeds the unit limit."""
        lim = self.rotation_limit_deg + 1e-9
        worst = max(np.max(np.abs(pitch_deg)), np.max(np.abs(roll_deg)))
        if worst > lim:
            raise ValueError(
                f"orientation exceeds unit rotation limit: |angle| = {worst:.4f} deg "
                f"> {self.rotation_limit_deg} deg"
            )


def rotation_about_x(angle_deg):
    """Right-handed rotation matrix about the x axis.

    Parameters
    ----------
    angle_deg : float
        Rotation angle in degrees.

    Returns
    -------
    (3, 3) ndarray, orthonormal with determinant +1.
    """
    a = float(angle_deg) * DEG2RAD
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -s],
                     [0.0, s, c]])


def rotation_about_y(angle_deg):
    """Right-handed rotation matrix about the y axis."""
    a = float(angle_deg) * DEG2RAD
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s],
                     [0.0, 1.0, 0.0],
                     [-s, 0.0, c]])


def orientation_matrix(orientation):
    """Composite attitude matrix: roll about x applied after pitch about y."""
    pitch, roll = orientation
    return rotation_about_x(roll) @ rotation_about_y(pitch)


def rotate_reflector_center(geometry, orientation):
    """Reflector-sphere center after tilting the unit.

    Applies the pitch rotation first, then roll, to the rest center, so the
    result keeps the rest center's length.
    """
    return orientation_matrix(orientation) @ geometry.reflector_center_rest


def rotated_centers(reflector_center_rest, pitch_deg, roll_deg):
    """Vectorized rotated sphere centers.

    Parameters
    ----------
    reflector_center_rest : (3,) array
    pitch_deg, roll_deg : scalars or equal-shape arrays, degrees

    Returns
    -------
    (..., 3) ndarray of rotated centers, one per input orientation.
    """
    p = np.asarray(pitch_deg, dtype=float) * DEG2RAD
    r = np.asarray(roll_deg, dtype=float) * DEG2RAD
    x0, y0, z0 = np.asarray(reflector_center_rest, dtype=float)
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    # pitch about y
    x1 = cp * x0 + sp * z0
    z1 = -sp * x0 + cp * z0
    # roll about x
    y2 = cr * y0 - sr * z1
    z2 = sr * y0 + cr * z1
    return np.stack(np.broadcast_arrays(x1, y2, z2), axis=-1)


def sensor_reflector_distance(sensor_position, rotated_center, reflector_radius):
    """Gap between a sensor and the reflector sphere surface.

    The closest surface point lies on the segment from the sphere center to
    the sensor, so the gap is the center distance minus the radius.

    Raises
    ------
    NonPositiveProximity
        If the sensor lies on or inside the sphere.
    """
    d = float(np.linalg.norm(np.asarray(sensor_position, dtype=float)
                             - np.asarray(rotated_center, dtype=float))) - float(reflector_radius)
    if d <= 0.0:
        raise NonPositiveProximity(
            f"sensor on or inside reflector sphere (gap {d:.6f} mm)"
        )
    return d


def sensor_distances(geometry, pitch_deg, roll_deg):
    """Vectorized sensor gaps for one unit.

    Parameters
    ----------
    geometry : UnitGeometry
    pitch_deg, roll_deg : scalars or (N,) arrays, degrees

    Returns
    -------
    (N, n_sensors) ndarray of gaps in mm (or (n_sensors,) for scalar input).

    Raises
    ------
    NonPositiveProximity
        With the first offending orientation attached.
    """
    p = np.atleast_1d(np.asarray(pitch_deg, dtype=float))
    r = np.atleast_1d(np.asarray(roll_deg, dtype=float))
    p, r = np.broadcast_arrays(p, r)
    centers = rotated_centers(geometry.reflector_center_rest, p, r)  # (N, 3)
    gaps = np.linalg.norm(
        geometry.sensor_positions[None, :, :] - centers[:, None, :], axis=-1
    ) - geometry.reflector_radius
    if np.any(gaps <= 0.0):
        i, j = np.argwhere(gaps <= 0.0)[0]
        raise NonPositiveProximity(
            f"sensor {j} on or inside reflector sphere (gap {gaps[i, j]:.6f} mm)",
            orientation=(p[i], r[i]),
        )
    if np.isscalar(pitch_deg) and np.isscalar(roll_deg):
        return gaps[0]
    return gaps


@dataclass(frozen=True)
class DistanceSweep:
    """Per-sensor gap traces with rest/min/max summary."""

    distances: np.ndarray   # (N, n_sensors)
    d_rest: np.ndarray      # (n_sensors,) gap at zero pitch/roll
    d_min: np.ndarray       # (n_sensors,) minimum over the trace
    d_max: np.ndarray       # (n_sensors,) maximum over the trace


def distance_sweep(geometry, orientations):
    """Evaluate sensor gaps over a list of orientations.

    ``orientations`` is an (N, 2) array-like of (pitch, roll) degrees; every
    entry must respect the unit rotation limit.
    """
    arr = np.asarray(orientations, dtype=float).reshape(-1, 2)
    if arr.size:
        geometry.check_within_limits(arr[:, 0], arr[:, 1])
    d = sensor_distances(geometry, arr[:, 0], arr[:, 1]) if arr.size else \
        np.empty((0, geometry.n_sensors))
    rest = sensor_distances(geometry, 0.0, 0.0)
    if arr.size:
        dmin, dmax = d.min(axis=0), d.max(axis=0)
    else:
        dmin = dmax = np.full(geometry.n_sensors, np.nan)
    return DistanceSweep(d, rest, dmin, dmax)


def _rotation_derivatives(pitch_deg, roll_deg):
    """d(Rx Ry)/dpitch and d(Rx Ry)/droll, per degree."""
    p = pitch_deg * DEG2RAD
    r = roll_deg * DEG2RAD
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]], dtype=float)
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]], dtype=float)
    dry = np.array([[-sp, 0, cp], [0, 0, 0], [-cp, 0, -sp]], dtype=float)
    drx = np.array([[0, 0, 0], [0, -sr, -cr], [0, cr, -sr]], dtype=float)
    return (rx @ dry) * DEG2RAD, (drx @ ry) * DEG2RAD


def distance_gradient(geometry, orientation):
    """Analytic gradient of the sensor gaps.

    Chain rule on the rotated-center construction: the gap to sensor f is
    |f - s1| - radius, so d(gap) = -unit(f - s1) . d(s1).

    Returns
    -------
    (n_sensors, 2) ndarray, columns d(gap)/d(pitch) and d(gap)/d(roll)
    in mm per degree.
    """
    pitch, roll = float(orientation[0]), float(orientation[1])
    s0 = geometry.reflector_center_rest
    s1 = rotate_reflector_center(geometry, (pitch, roll))
    d_pitch_mat, d_roll_mat = _rotation_derivatives(pitch, roll)
    ds_dpitch = d_pitch_mat @ s0
    ds_droll = d_roll_mat @ s0
    p_vec = geometry.sensor_positions - s1[None, :]
    norms = np.linalg.norm(p_vec, axis=1)
    if np.any(norms <= geometry.reflector_radius):
        raise NonPositiveProximity("sensor on or inside reflector sphere",
                                   orientation=(pitch, roll))
    u = p_vec / norms[:, None]
    return np.column_stack([-u @ ds_dpitch, -u @ ds_droll])


@dataclass(frozen=True)
class JacobianResult:
    """Central-difference proximity Jacobian with its conditioning."""

    matrix: np.ndarray      # (n_sensors, 2), mm per degree
    condition_number: float
    step_deg: float

    def observable(self, threshold=DEFAULT_OBSERVABILITY_CONDITION):
        return self.condition_number < threshold


def proximity_jacobian(geometry, orientation, step_deg=0.1):
    """Numerically probe how the sensor gaps respond to pitch and roll.

    Central differences with the given step; the returned condition number
    diagnoses whether two gap readings can separate the two angles at this
    orientation.
    """
    if step_deg <= 0:
        raise ValueError(f"step_deg must be > 0, got {step_deg}")
    pitch, roll = float(orientation[0]), float(orientation[1])
    geometry.check_within_limits(
        np.array([pitch - step_deg, pitch + step_deg, pitch, pitch]),
        np.array([roll, roll, roll - step_deg, roll + step_deg]),
    )
    d_pp = sensor_distances(geometry, pitch + step_deg, roll)
    d_pm = sensor_distances(geometry, pitch - step_deg, roll)
    d_rp = sensor_distances(geometry, pitch, roll + step_deg)
    d_rm = sensor_distances(geometry, pitch, roll - step_deg)
    jac = np.column_stack([(d_pp - d_pm), (d_rp - d_rm)]) / (2.0 * step_deg)
    return JacobianResult(jac, float(np.linalg.cond(jac)), float(step_deg))
