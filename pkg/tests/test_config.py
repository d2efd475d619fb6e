"""Config file parsing, overrides, validation, serialization."""

import pytest

from auvsim.config import (
    ConfigError,
    MissionConfig,
    SimConfig,
    config_to_dict,
    default_config,
    load_config,
    parse_config_text,
)
from tests.conftest import CONFIGS


class TestDefaults:
    def test_shipped_reference_config_matches_builtin_defaults(self):
        # the reference file exists as an explicit record; drifting from the
        # dataclass defaults would make runs silently unreproducible
        assert load_config(CONFIGS / "table1_defaults.conf") == default_config()

    def test_default_config_is_internally_consistent(self):
        cfg = default_config()
        assert cfg.control.sensor_mount_offset_m == cfg.params.sensor_mount_offset_m
        assert cfg.substeps == 5


class TestParsing:
    def test_namespaces_route_to_sections(self):
        text = """
        mass_kg = 4.5
        sensor.compass_bias_deg = 2.0
        control.target_depth_m = 0.8   # trailing comment
        sim.dt_s = 0.05
        """
        buckets = parse_config_text(text)
        assert buckets[""] == {"mass_kg": "4.5"}
        assert buckets["sensor"] == {"compass_bias_deg": "2.0"}
        assert buckets["control"] == {"target_depth_m": "0.8"}
        assert buckets["sim"] == {"dt_s": "0.05"}

    def test_comments_and_blanks_ignored(self):
        assert parse_config_text("# only a comment\n\n") == {
            "": {},
            "sensor": {},
            "control": {},
            "sim": {},
        }

    @pytest.mark.parametrize(
        "text",
        ["mass_kg", "= 5", "mass_kg =", "weird.key = 1"],
    )
    def test_malformed_lines_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_config_text(text)

    def test_unknown_key_rejected(self, tmp_path):
        bad = tmp_path / "c.conf"
        bad.write_text("control.warp_speed = 9\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_bad_value_rejected(self, tmp_path):
        bad = tmp_path / "c.conf"
        bad.write_text("mass_kg = heavy\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_tuple_field_parses_comma_list(self, tmp_path):
        f = tmp_path / "c.conf"
        f.write_text("drag_linear = 1.0, 2.0, 3.0\n")
        cfg = load_config(f)
        assert cfg.params.drag_linear == (1.0, 2.0, 3.0)

    def test_tuple_field_wrong_arity_rejected(self, tmp_path):
        f = tmp_path / "c.conf"
        f.write_text("drag_linear = 1.0, 2.0\n")
        with pytest.raises(ConfigError):
            load_config(f)


class TestOverrides:
    def test_override_wins_over_file(self):
        cfg = load_config(CONFIGS / "table1_defaults.conf", ["control.target_depth_m=0.7"])
        assert cfg.control.target_depth_m == 0.7

    def test_override_without_file(self):
        cfg = load_config(None, ["mass_kg=4.2"])
        assert cfg.params.mass_kg == 4.2

    def test_override_requires_key_value_shape(self):
        with pytest.raises(ConfigError):
            load_config(None, ["mass_kg"])

    def test_mount_offset_sync_rejects_controller_copy(self):
        with pytest.raises(ConfigError):
            load_config(None, ["control.sensor_mount_offset_m=0.3"])

    def test_mount_offset_propagates_from_vehicle_key(self):
        cfg = load_config(None, ["sensor_mount_offset_m=0.1"])
        assert cfg.params.sensor_mount_offset_m == 0.1
        assert cfg.control.sensor_mount_offset_m == 0.1


class TestCrossValidation:
    def test_control_period_must_be_multiple_of_dt(self):
        with pytest.raises(ConfigError):
            load_config(None, ["sim.dt_s=0.03"])  # 0.1 / 0.03 is not integral

    def test_invalid_field_value_becomes_config_error(self):
        with pytest.raises(ConfigError):
            load_config(None, ["mass_kg=-1"])

    def test_surface_threshold_below_mount_offset_rejected(self):
        with pytest.raises(ConfigError):
            load_config(None, ["sensor_mount_offset_m=0.4"])  # threshold stays 0.25

    def test_missing_file_is_a_config_error(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/path.conf")


class TestSerialization:
    def test_config_to_dict_covers_all_sections(self):
        d = config_to_dict(default_config())
        assert set(d) == {"dynamics", "sensor", "control", "sim"}
        assert d["dynamics"]["mass_kg"] == 3.95
        assert d["control"]["target_depth_m"] == 1.0
        assert d["sim"]["dt_s"] == 0.02

    def test_sim_config_validation(self):
        with pytest.raises(ValueError):
            SimConfig(dt_s=0.0)
        with pytest.raises(ValueError):
            SimConfig(telemetry_decimation=0)
        with pytest.raises(ValueError):
            SimConfig(gps_fix_hz=0.0)

    def test_anchor_requires_both_coordinates(self):
        with pytest.raises(ConfigError):
            load_config(None, ["sim.gps_anchor_lat=53.0"])

    def test_anchor_round_trips(self):
        cfg = load_config(None, ["sim.gps_anchor_lat=53.27", "sim.gps_anchor_lon=-9.06"])
        assert cfg.sim.gps_anchor == (53.27, -9.06)
