import json

import pytest

from optoshape import ConfigError, GeometryError, InvalidSpec, load_config
from optoshape.config import (
    apply_overrides,
    build_config,
    default_config_dict,
    load_config_dict,
    merge_config,
)


class TestDefaults:
    def test_defaults_build(self):
        config = load_config()
        assert config.chain.n_units == 4
        assert config.unit_geometry.n_sensors == 2
        assert config.sweep.step_deg == 0.5
        assert config.validation.cycles == 4
        assert config.model.band_mm == (0.5, 3.0)

    def test_default_dict_is_a_copy(self):
        d = default_config_dict()
        d["geometry"]["reflector_radius_mm"] = 1.0
        assert default_config_dict()["geometry"]["reflector_radius_mm"] == 7.5


class TestFileLoading:
    def test_file_overlays_defaults(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 99,
                                    "sweep": {"step_deg": 1.5}}))
        config = load_config(str(path))
        assert config.seed == 99
        assert config.sweep.step_deg == 1.5
        assert config.sweep.limit_deg == 15.0

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config("/nonexistent/run.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(str(path))

    def test_non_object_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(str(path))

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"motor": {"steps": 3}}))
        with pytest.raises(ConfigError, match="unknown config key"):
            load_config(str(path))

    def test_unknown_key_in_section_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"sweep": {"stepdeg": 1.0}}))
        with pytest.raises(ConfigError, match="sweep.stepdeg"):
            load_config(str(path))


class TestOverrides:
    def test_flag_beats_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 99}))
        config = load_config(str(path), {"seed": 5})
        assert config.seed == 5

    def test_dotted_section_override(self):
        config = load_config(None, {"sweep.step_deg": 3.0,
                                    "validation.axis": "roll"})
        assert config.sweep.step_deg == 3.0
        assert config.validation.axis == "roll"

    def test_none_overrides_ignored(self):
        config = load_config(None, {"sweep.step_deg": None})
        assert config.sweep.step_deg == 0.5

    def test_too_deep_override(self):
        with pytest.raises(ConfigError, match="too deep"):
            apply_overrides(default_config_dict(), {"a.b.c": 1})


class TestValidation:
    def test_non_numeric_value(self):
        d = default_config_dict()
        d["sweep"]["step_deg"] = "fast"
        with pytest.raises(ConfigError, match="sweep.step_deg"):
            build_config(d)

    def test_bool_is_not_a_number(self):
        d = default_config_dict()
        d["geometry"]["reflector_radius_mm"] = True
        with pytest.raises(ConfigError):
            build_config(d)

    def test_seed_must_be_integer(self):
        d = default_config_dict()
        d["seed"] = 1.5
        with pytest.raises(ConfigError, match="seed"):
            build_config(d)

    def test_seed_range(self):
        d = default_config_dict()
        d["seed"] = 2 ** 64
        with pytest.raises(ConfigError, match="64 bits"):
            build_config(d)
        d["seed"] = -1
        with pytest.raises(ConfigError, match="64 bits"):
            build_config(d)

    def test_bad_azimuth_list(self):
        d = default_config_dict()
        d["geometry"]["sensor_azimuths_deg"] = []
        with pytest.raises(ConfigError, match="sensor_azimuths_deg"):
            build_config(d)

    def test_bad_center_vector(self):
        d = default_config_dict()
        d["geometry"]["reflector_center_mm"] = [1.0, 2.0]
        with pytest.raises(ConfigError, match="3-vector"):
            build_config(d)

    def test_bad_band(self):
        d = default_config_dict()
        d["sensor_model"]["band_mm"] = [0.5]
        with pytest.raises(ConfigError, match="band_mm"):
            build_config(d)

    def test_bad_spread_law(self):
        d = default_config_dict()
        d["sensor_model"]["spread_law"] = "conical"
        with pytest.raises(ConfigError, match="spread_law"):
            build_config(d)

    def test_bad_unit_count(self):
        d = default_config_dict()
        d["chain"]["n_units"] = 0
        with pytest.raises(ConfigError, match="n_units"):
            build_config(d)

    def test_sweep_invariants_surface_as_config_errors(self):
        d = default_config_dict()
        d["sweep"]["step_deg"] = 20.0
        with pytest.raises(InvalidSpec):
            build_config(d)

    def test_geometry_invariants_keep_their_own_type(self):
        d = default_config_dict()
        d["geometry"]["reflector_radius_mm"] = -2.0
        with pytest.raises(GeometryError):
            build_config(d)

    def test_merge_rejects_scalar_for_section(self):
        with pytest.raises(ConfigError, match="must be an object"):
            merge_config(default_config_dict(), {"sweep": 3})
