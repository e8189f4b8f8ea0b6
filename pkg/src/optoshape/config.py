"""Experiment configuration: defaults, JSON loading, and flag overrides.

One JSON file describes a full run as flat sections (geometry, sensor_model,
sweep, validation, chain) plus a seed and an output directory. Precedence is
command-line overrides > file values > built-in defaults.
"""

import copy
import json
from dataclasses import dataclass

from .errors import ConfigError
from .geometry import UnitGeometry
from .kinematics import ChainModel
from .photonics import OptoSensorModel
from .simulator import SweepSpec, ValidationSpec

DEFAULTS = {
    "geometry": {
        "sensor_radius_mm": 9.0,
        "sensor_azimuths_deg": [45.0, -45.0],
        "reflector_center_mm": [0.6, 0.0, 0.8],
        "reflector_radius_mm": 7.5,
        "rotation_limit_deg": 15.0,
    },
    "sensor_model": {
        "emitted_power": 1.0,
        "aperture_area_mm2": 0.02,
        "spread_law": "affine",
        "omega0_mm": 0.3,
        "kappa": 0.25,
        "rayleigh_mm": 2.0,
        "mirror_amplification": True,
        "vcc_volts": 5.0,
        "gain": 300.0,
        "r1_ohms": 680.0,
        "r2_ohms": 10000.0,
        "band_mm": [0.5, 3.0],
        "noise_sigma_volts": 0.005,
    },
    # 0.5 deg keeps sweep CSVs desk-sized; drop to 0.1 for the full-density grid.
    "sweep": {
        "limit_deg": 15.0,
        "step_deg": 0.5,
    },
    "validation": {
        "amplitude_deg": 60.0,
        "cycles": 4,
        "samples_per_cycle": 200,
        "axis": "pitch",
    },
    "chain": {
        "n_units": 4,
        "unit_height_mm": 12.0,
        "inter_unit_gap_mm": 6.0,
    },
    "seed": 20260819,
    "output_dir": ".",
}

_SCALAR_KEYS = ("seed", "output_dir")


@dataclass(frozen=True)
class ToolkitConfig:
    """Fully built run configuration: typed objects, not raw dicts."""

    unit_geometry: UnitGeometry
    model: OptoSensorModel
    sweep: SweepSpec
    validation: ValidationSpec
    chain: ChainModel
    seed: int
    output_dir: str


def default_config_dict():
    """Fresh deep copy of the built-in defaults."""
    return copy.deepcopy(DEFAULTS)


def _merge_section(base, incoming, section):
    for key, value in incoming.items():
        if key not in base:
            raise ConfigError(f"unknown key {section}.{key}")
        base[key] = value


def merge_config(base, incoming):
    """Overlay a raw config dict onto a base, rejecting unknown keys."""
    for key, value in incoming.items():
        if key in _SCALAR_KEYS:
            base[key] = value
        elif key in base and isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be an object")
            _merge_section(base[key], value, key)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return base


def load_config_dict(path=None):
    """Defaults overlaid with an optional JSON file."""
    merged = default_config_dict()
    if path is None:
        return merged
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return merge_config(merged, raw)


def apply_overrides(config_dict, overrides):
    """Apply dotted-path overrides, e.g. {'sweep.step_deg': 0.1, 'seed': 7}."""
    for dotted, value in overrides.items():
        if value is None:
            continue
        parts = dotted.split(".")
        if len(parts) == 1:
            merge_config(config_dict, {parts[0]: value})
        elif len(parts) == 2:
            merge_config(config_dict, {parts[0]: {parts[1]: value}})
        else:
            raise ConfigError(f"override key too deep: {dotted!r}")
    return config_dict


def _require_number(section, key, value, integer=False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"{section}.{key} must be {kind}, got {value!r}")
    return value


def build_config(config_dict):
    """Validate a raw config dict and construct the typed objects.

    Raises
    ------
    ConfigError
        On structural problems: wrong types, bad seed, malformed sections.
        Domain invariant violations surface as the owning module's errors.
    """
    g = config_dict["geometry"]
    m = config_dict["sensor_model"]
    s = config_dict["sweep"]
    v = config_dict["validation"]
    c = config_dict["chain"]

    for key in ("sensor_radius_mm", "reflector_radius_mm", "rotation_limit_deg"):
        _require_number("geometry", key, g[key])
    azimuths = g["sensor_azimuths_deg"]
    center = g["reflector_center_mm"]
    if not isinstance(azimuths, (list, tuple)) or len(azimuths) < 1:
        raise ConfigError("geometry.sensor_azimuths_deg must be a non-empty list")
    if not isinstance(center, (list, tuple)) or len(center) != 3:
        raise ConfigError("geometry.reflector_center_mm must be a 3-vector")
    unit_geometry = UnitGeometry.from_polar(
        sensor_radius_mm=float(g["sensor_radius_mm"]),
        sensor_azimuths_deg=tuple(float(a) for a in azimuths),
        reflector_center_mm=tuple(float(x) for x in center),
        reflector_radius_mm=float(g["reflector_radius_mm"]),
        rotation_limit_deg=float(g["rotation_limit_deg"]),
    )

    band = m["band_mm"]
    if not isinstance(band, (list, tuple)) or len(band) != 2:
        raise ConfigError("sensor_model.band_mm must be a [low, high] pair")
    if m["spread_law"] not in ("affine", "gaussian"):
        raise ConfigError(
            f"sensor_model.spread_law must be 'affine' or 'gaussian', "
            f"got {m['spread_law']!r}"
        )
    for key in ("emitted_power", "aperture_area_mm2", "omega0_mm", "kappa",
                "rayleigh_mm", "vcc_volts", "gain", "r1_ohms", "r2_ohms",
                "noise_sigma_volts"):
        _require_number("sensor_model", key, m[key])
    model = OptoSensorModel(
        emitted_power=float(m["emitted_power"]),
        aperture_area_mm2=float(m["aperture_area_mm2"]),
        spread_law=m["spread_law"],
        omega0_mm=float(m["omega0_mm"]),
        kappa=float(m["kappa"]),
        rayleigh_mm=float(m["rayleigh_mm"]),
        mirror_amplification=bool(m["mirror_amplification"]),
        vcc_volts=float(m["vcc_volts"]),
        gain=float(m["gain"]),
        r1_ohms=float(m["r1_ohms"]),
        r2_ohms=float(m["r2_ohms"]),
        band_mm=(float(band[0]), float(band[1])),
        noise_sigma_volts=float(m["noise_sigma_volts"]),
    )

    sweep = SweepSpec(
        limit_deg=float(_require_number("sweep", "limit_deg", s["limit_deg"])),
        step_deg=float(_require_number("sweep", "step_deg", s["step_deg"])),
    )
    validation = ValidationSpec(
        amplitude_deg=float(_require_number("validation", "amplitude_deg",
                                            v["amplitude_deg"])),
        cycles=_require_number("validation", "cycles", v["cycles"], integer=True),
        samples_per_cycle=_require_number("validation", "samples_per_cycle",
                                          v["samples_per_cycle"], integer=True),
        axis=v["axis"],
    )

    n_units = _require_number("chain", "n_units", c["n_units"], integer=True)
    if n_units < 1:
        raise ConfigError(f"chain.n_units must be >= 1, got {n_units}")
    chain = ChainModel(
        units=[unit_geometry] * n_units,
        unit_height_mm=float(_require_number("chain", "unit_height_mm",
                                             c["unit_height_mm"])),
        inter_unit_gap_mm=float(_require_number("chain", "inter_unit_gap_mm",
                                                c["inter_unit_gap_mm"])),
    )

    seed = config_dict["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    if not (0 <= seed < 2 ** 64):
        raise ConfigError(f"seed must fit in unsigned 64 bits, got {seed}")
    output_dir = config_dict["output_dir"]
    if not isinstance(output_dir, str):
        raise ConfigError(f"output_dir must be a string, got {output_dir!r}")

    return ToolkitConfig(
        unit_geometry=unit_geometry,
        model=model,
        sweep=sweep,
        validation=validation,
        chain=chain,
        seed=seed,
        output_dir=output_dir,
    )


def load_config(path=None, overrides=None):
    """One-call path from file plus overrides to a built ToolkitConfig."""
    merged = load_config_dict(path)
    if overrides:
        apply_overrides(merged, overrides)
    return build_config(merged)
