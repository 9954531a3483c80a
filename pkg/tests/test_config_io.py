"""Unit tests of config parsing/validation and result serialization."""

import json
import math

import pytest

from neutronsim.config import (ConfigError, parse_angle, parse_angle_grid,
                               parse_config, validate_config)
from neutronsim.experiments import run_mzi, run_shutter
from neutronsim.io import (read_csv, record_to_csv, record_to_json,
                           write_results)

PI = math.pi


# ---------------------------------------------------------------------------
# angles


def test_parse_angle_units():
    assert abs(parse_angle("60 deg", "x") - PI / 3.0) < 1e-15
    assert parse_angle("1.5 rad", "x") == 1.5
    assert abs(parse_angle("-45 deg", "x") + PI / 4.0) < 1e-15


def test_parse_angle_requires_unit_suffix():
    for bad in (1.5, "1.5", "60", "60 degrees", "rad", ""):
        with pytest.raises(ConfigError):
            parse_angle(bad, "x")


def test_parse_angle_grid_uniform():
    g = parse_angle_grid(4, "x")
    assert g == [0.0, PI / 2.0, PI, 3.0 * PI / 2.0]


def test_parse_angle_grid_explicit_list():
    g = parse_angle_grid(["0 deg", "90 deg"], "x")
    assert g[0] == 0.0 and abs(g[1] - PI / 2.0) < 1e-15


def test_parse_angle_grid_rejects_zero_points():
    with pytest.raises(ConfigError):
        parse_angle_grid(0, "x")


# ---------------------------------------------------------------------------
# validation


def test_validate_fills_defaults():
    cfg = validate_config("mzi", {})
    assert cfg["r"] == 0.2 and cfg["gamma"] == 0.99 and cfg["seed"] == 1
    assert len(cfg["chi_grid"]) == 16


def test_validate_rejects_unknown_key():
    with pytest.raises(ConfigError, match="mzi.frobnicate"):
        validate_config("mzi", {"frobnicate": 1})


def test_validate_rejects_unknown_experiment():
    with pytest.raises(ConfigError):
        validate_config("calorimetry", {})


def test_validate_range_checks():
    with pytest.raises(ConfigError, match="gamma"):
        validate_config("mzi", {"gamma": 1.0})
    with pytest.raises(ConfigError, match="r"):
        validate_config("mzi", {"r": 1.2})
    with pytest.raises(ConfigError, match="n"):
        validate_config("mzi", {"n": 0})


def test_validate_required_field():
    with pytest.raises(ConfigError, match="absorber.kind"):
        validate_config("absorber", {})


def test_validate_shutter_reflection_exclusivity():
    with pytest.raises(ConfigError, match="shutter.r"):
        validate_config("shutter", {"r": 0.2, "r1": 0.2, "r2": 0.9,
                                    "w1": 0.9})
    with pytest.raises(ConfigError, match="shutter.r"):
        validate_config("shutter", {})
    with pytest.raises(ConfigError, match="shutter.r2"):
        validate_config("shutter", {"r1": 0.2, "w1": 0.9})


def test_validate_shutter_weights_must_sum_to_one():
    with pytest.raises(ConfigError, match="sum to 1"):
        validate_config("shutter", {"r1": 0.2, "r2": 0.9, "w1": 0.9,
                                    "w2": 0.2})
    cfg = validate_config("shutter", {"r1": 0.2, "r2": 0.9, "w1": 0.9,
                                      "w2": 0.1})
    assert cfg["w1"] == 0.9


# ---------------------------------------------------------------------------
# YAML documents


def test_parse_config_with_experiment_key():
    cfg = parse_config("experiment: mzi\nn: 500\nchi_grid: 4\n")
    assert cfg["experiment"] == "mzi" and cfg["n"] == 500
    assert len(cfg["chi_grid"]) == 4


def test_parse_config_nested_form():
    cfg = parse_config("mzi:\n  n: 250\n  delta_noise: 60 deg\n")
    assert cfg["experiment"] == "mzi"
    assert abs(cfg["delta_noise"] - PI / 3.0) < 1e-15


def test_parse_config_rejects_invalid_yaml():
    with pytest.raises(ConfigError):
        parse_config("mzi: [unclosed\n")


def test_parse_config_rejects_wrong_experiment():
    with pytest.raises(ConfigError):
        parse_config("experiment: mzi\n", experiment="bell")


# ---------------------------------------------------------------------------
# CSV / JSON serialization


@pytest.fixture(scope="module")
def small_record():
    return run_mzi(0.2, 0.99, 0.0, [0.0, PI / 2.0], 2000, 9)


def test_csv_has_provenance_and_rows(small_record):
    text = record_to_csv(small_record)
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    prov = json.loads(lines[0][len("# config: "):])
    assert prov["experiment"] == "mzi" and prov["seed"] == 9
    assert lines[1] == "chi,beam,label,count,normalized,oracle,stderr"
    assert len(lines) == 2 + len(small_record.rows)


def test_one_point_run_yields_two_rows():
    rec = run_mzi(0.2, 0.99, 0.0, [0.0], 500, 1)
    lines = record_to_csv(rec).splitlines()
    assert len(lines) == 4  # provenance + header + O row + H row
    beams = [line.split(",")[1] for line in lines[2:]]
    assert sorted(beams) == ["H", "O"]


def test_empty_sweep_yields_header_only():
    rec = run_mzi(0.2, 0.99, 0.0, [], 500, 1)
    lines = record_to_csv(rec).splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("chi,beam")


def test_csv_roundtrip_restores_numbers(small_record):
    prov, rows = read_csv(record_to_csv(small_record))
    assert prov["config"] == json.loads(json.dumps(small_record.config))
    assert len(rows) == len(small_record.rows)
    for got, want in zip(rows, small_record.rows):
        assert isinstance(got["count"], int) and got["count"] == want["count"]
        assert got["normalized"] == want["normalized"]  # exact: 17 digits
        assert got["oracle"] == want["oracle"]
        assert got["beam"] == want["beam"]


def test_json_matches_csv_numerically(small_record):
    payload = json.loads(record_to_json(small_record))
    _, csv_rows = read_csv(record_to_csv(small_record))
    assert payload["experiment"] == "mzi"
    assert payload["seed"] == small_record.seed
    for jrow, crow in zip(payload["rows"], csv_rows):
        for key in ("chi", "count", "normalized", "oracle", "stderr"):
            assert jrow[key] == crow[key]


def test_shutter_rows_carry_state_labels():
    rec = run_shutter(0.2, 0.12, [0.0, PI], 4000, "random_toggle", 3)
    _, rows = read_csv(record_to_csv(rec))
    labels = {r["label"] for r in rows}
    assert labels == {"open", "closed"}


def test_write_results_formats(tmp_path, small_record):
    csv_path = tmp_path / "out.csv"
    json_path = tmp_path / "out.json"
    write_results(small_record, csv_path, "csv")
    write_results(small_record, json_path, "json")
    assert csv_path.read_text() == record_to_csv(small_record)
    assert json.loads(json_path.read_text())["rows"]


def test_float_serialization_roundtrips_exactly():
    value = 0.1 + 0.2  # not representable prettily; 17 digits round-trip
    assert float("%.17g" % value) == value
