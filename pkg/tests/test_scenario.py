import json
from pathlib import Path

import pytest

from esrpsim import (
    AttackKind,
    ConfigError,
    RunConfig,
    config_manifest,
    load_scenario,
    scenario_digest,
    scenario_to_config,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def test_baseline_file_mirrors_defaults():
    cfg = load_scenario(SCENARIO_DIR / "baseline.toml")
    ref = RunConfig()
    assert cfg.field_width == ref.field_width
    assert cfg.field_height == ref.field_height
    assert cfg.n_nodes == ref.n_nodes
    assert cfg.k_clusters == ref.k_clusters
    assert cfg.iterations == ref.iterations
    assert cfg.horizon_s == ref.horizon_s
    assert cfg.attack_count == ref.attack_count
    assert cfg.security_enabled == ref.security_enabled
    assert cfg.energy == ref.energy


def test_testbed_file_converts_millijoules():
    cfg = load_scenario(SCENARIO_DIR / "testbed28.toml")
    assert cfg.nodes is not None and len(cfg.nodes) == 23
    table = {nid: e for nid, _, _, e in cfg.nodes}
    assert table[0] == pytest.approx(7.14e-3)
    assert table[20] == pytest.approx(0.02e-3)
    assert cfg.sink_position().x == 50.0
    assert cfg.attack_count == 0


def test_overrides_win_over_file(tmp_path):
    p = tmp_path / "s.toml"
    p.write_text("[deploy]\nseed = 3\nn_nodes = 40\n")
    cfg = load_scenario(p, overrides={"seed": 99})
    assert cfg.seed == 99
    assert cfg.n_nodes == 40


def test_json_scenario_loads(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({
        "protocol": {"k_clusters": 3, "iterations": 2, "horizon_s": 60.0},
        "attacks": {"count": 4, "mix": {"black_hole": 1.0}},
    }))
    cfg = load_scenario(p)
    assert cfg.k_clusters == 3
    assert cfg.attack_count == 4
    assert cfg.attack_mix == {AttackKind.BLACK_HOLE: 1.0}


def test_explicit_nodes_and_attack_nodes(tmp_path):
    p = tmp_path / "s.toml"
    p.write_text(
        "[protocol]\nk_clusters = 1\n"
        "[attacks]\n[[attacks.nodes]]\nid = 1\nkind = \"selective_forward\"\ndrop_prob = 0.5\n"
        "[[nodes]]\nid = 0\nx = 10.0\ny = 10.0\nenergy_j = 2.0\n"
        "[[nodes]]\nid = 1\nx = 20.0\ny = 10.0\nenergy_mj = 1500.0\n"
    )
    cfg = load_scenario(p)
    assert cfg.nodes == [(0, 10.0, 10.0, 2.0), (1, 20.0, 10.0, 1.5)]
    prof = cfg.attack_nodes[1]
    assert prof.kind is AttackKind.SELECTIVE_FORWARD
    assert prof.drop_prob == 0.5


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="unknown section"):
        scenario_to_config({"fields": {"width": 10}})


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        scenario_to_config({"protocol": {"k": 5}})
    with pytest.raises(ConfigError, match="unknown key"):
        scenario_to_config({"nodes": [{"id": 0, "x": 1, "y": 1, "energy": 2.0}]})


def test_node_energy_units_are_exclusive():
    row = {"id": 0, "x": 1.0, "y": 1.0}
    with pytest.raises(ConfigError, match="exactly one"):
        scenario_to_config({"nodes": [{**row, "energy_j": 1.0, "energy_mj": 1000.0}]})
    with pytest.raises(ConfigError, match="exactly one"):
        scenario_to_config({"nodes": [row]})


def test_attack_node_validation():
    with pytest.raises(ConfigError, match="unknown attack kind"):
        scenario_to_config({"attacks": {"nodes": [{"id": 1, "kind": "wormhole"}]}})
    with pytest.raises(ConfigError):
        scenario_to_config({"attacks": {"nodes": [
            {"id": 1, "kind": "black_hole"}, {"id": 1, "kind": "self_intruder"},
        ]}})
    with pytest.raises(ConfigError, match="mix"):
        scenario_to_config({"attacks": {"mix": {"black_hole": -1.0}}})


def test_non_table_root_and_bad_types():
    with pytest.raises(ConfigError):
        scenario_to_config([1, 2])
    with pytest.raises(ConfigError, match="placement"):
        scenario_to_config({"deploy": {"placement": 7}})
    with pytest.raises(ConfigError, match="number"):
        scenario_to_config({"protocol": {"horizon_s": "long"}})


def test_energy_section_builds_params():
    cfg = scenario_to_config({"energy": {"e_elec_j_per_bit": 1e-7, "k_data_bits": 512}})
    assert cfg.energy.e_elec_j_per_bit == 1e-7
    assert cfg.energy.k_data_bits == 512
    # untouched constants keep their defaults
    assert cfg.energy.e_amp_j_per_bit_m2 == RunConfig().energy.e_amp_j_per_bit_m2


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_scenario(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[protocol\nk_clusters = 1\n")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_scenario(bad)
    other = tmp_path / "s.yaml"
    other.write_text("a: 1\n")
    with pytest.raises(ConfigError, match="unsupported"):
        load_scenario(other)
    badjson = tmp_path / "b.json"
    badjson.write_text("{")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_scenario(badjson)


def test_invalid_config_values_surface_as_config_errors(tmp_path):
    p = tmp_path / "s.toml"
    p.write_text("[protocol]\nhorizon_s = 1.0\n")
    with pytest.raises(ConfigError):
        load_scenario(p)


def test_manifest_is_json_ready(tmp_path):
    p = tmp_path / "s.toml"
    body = "[deploy]\nseed = 7\n[attacks]\ncount = 2\nmix = { black_hole = 1.0 }\n"
    p.write_text(body)
    cfg = load_scenario(p)
    man = config_manifest(cfg, p)
    text = json.dumps(man)  # must not raise
    assert man["scenario"]["sha256"] == scenario_digest(p)
    assert man["config"]["seed"] == 7
    assert man["config"]["attack_mix"] == {"black_hole": 1.0}
    assert "black_hole" in text
