"""Optoelectronic reflector shape sensing: simulation, calibration, scoring.

A unit carries two reflectance proximity sensors under an offset convex
mirror; rotating the unit modulates each sensor's gap, and calibrated
polynomials map the two voltages back to pitch and roll. Units stack into a
chain whose composed tip orientation is validated against ground truth.
"""

from .calibration import (
    CalibrationDataset,
    LinearCalibration,
    PolyCalibration,
    TheoryDemoResult,
    estimate_batch,
    estimate_orientation,
    fit_linear,
    fit_poly,
    poly_basis,
)
from .config import ToolkitConfig, default_config_dict, load_config
from .errors import (
    ConfigError,
    DataFormatError,
    GeometryError,
    GimbalLock,
    InsufficientSamples,
    InvalidSpec,
    LengthMismatch,
    NonPositiveDistance,
    NonPositiveProximity,
    NumericalError,
    RankDeficient,
    ToolkitError,
    WorkingBandWarning,
    ZeroSpan,
)
from .geometry import (
    Orientation,
    UnitGeometry,
    distance_sweep,
    proximity_jacobian,
    rotate_reflector_center,
    sensor_distances,
    sensor_reflector_distance,
)
from .kinematics import (
    ChainModel,
    ErrorReport,
    TipPose,
    compose_chain,
    compose_tip_angles,
    tip_error_metrics,
    unit_transform,
)
from .photonics import (
    OptoSensorModel,
    VoltagePair,
    beam_radius,
    received_power,
    simulate_sensor_pair,
    simulate_voltages,
    voltage_at_distance,
)
from .simulator import (
    NOISE_FOR_UNIT_RMS_0P8_DEG,
    ExperimentResult,
    MotionTrace,
    SweepSpec,
    ValidationSpec,
    generate_sweep,
    generate_validation_motion,
    run_experiment,
    run_theory_demo,
    synthesize_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationDataset", "LinearCalibration", "PolyCalibration",
    "TheoryDemoResult", "estimate_batch", "estimate_orientation",
    "fit_linear", "fit_poly", "poly_basis",
    "ToolkitConfig", "default_config_dict", "load_config",
    "ConfigError", "DataFormatError", "GeometryError", "GimbalLock",
    "InsufficientSamples", "InvalidSpec", "LengthMismatch",
    "NonPositiveDistance", "NonPositiveProximity", "NumericalError",
    "RankDeficient", "ToolkitError", "WorkingBandWarning", "ZeroSpan",
    "Orientation", "UnitGeometry", "distance_sweep", "proximity_jacobian",
    "rotate_reflector_center", "sensor_distances", "sensor_reflector_distance",
    "ChainModel", "ErrorReport", "TipPose", "compose_chain",
    "compose_tip_angles", "tip_error_metrics", "unit_transform",
    "OptoSensorModel", "VoltagePair", "beam_radius", "received_power",
    "simulate_sensor_pair", "simulate_voltages", "voltage_at_distance",
    "ExperimentResult", "MotionTrace", "NOISE_FOR_UNIT_RMS_0P8_DEG",
    "SweepSpec", "ValidationSpec",
    "generate_sweep", "generate_validation_motion", "run_experiment",
    "run_theory_demo", "synthesize_dataset",
    "__version__",
]
