"""Scenario files: declarative run configuration in TOML or JSON.

A scenario groups settings into sections (field, deploy, protocol, energy,
security, attacks) plus two optional tables: [[nodes]] pins an explicit
deployment and [[attacks.nodes]] pins explicit attacker profiles. Every key
is whitelisted; an unknown section or key is a configuration error, not a
warning, so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .adversary import AttackKind, AttackProfile
from .energy import EnergyParams
from .engine import RunConfig
from .errors import ConfigError

_FIELD_KEYS = {"width", "height", "radio_range", "sink_x", "sink_y", "sink_range"}
_DEPLOY_KEYS = {"n_nodes", "initial_energy_j", "placement", "seed"}
_PROTOCOL_KEYS = {
    "k_clusters", "iterations", "horizon_s", "reformation_period",
    "quorum_fraction", "intra_timeout_s", "link_rate_bps", "proc_delay_s",
    "flat_threshold_j", "termination_fraction", "termination_threshold_j",
    "overhead_budget_bytes",
}
_ENERGY_KEYS = {
    "e_elec_j_per_bit", "e_amp_j_per_bit_m2", "k_data_bits", "k_signal_bits",
    "key_length_bits", "sensing_rate_bits_per_s",
}
_SECURITY_KEYS = {
    "enabled", "mzkp_role_threshold", "trap_threshold", "mine_threshold",
    "dummy_ttl", "loss_rate",
}
_ATTACK_KEYS = {"count", "activation_s", "mix", "nodes"}
_ATTACK_NODE_KEYS = {"id", "kind", "activation_s", "drop_prob", "wrong_secret"}
_NODE_KEYS = {"id", "x", "y", "energy_j", "energy_mj"}
_SECTIONS = {"field", "deploy", "protocol", "energy", "security", "attacks", "nodes"}


def _check_keys(section: str, table: dict, allowed: set[str]) -> None:
    if not isinstance(table, dict):
        raise ConfigError(f"section [{section}] must be a table")
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def _number(section: str, table: dict, key: str, default):
    v = table.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"[{section}] {key} must be a number, got {v!r}")
    return v


def _parse_nodes(rows: list) -> list[tuple[int, float, float, float]]:
    if not isinstance(rows, list):
        raise ConfigError("[[nodes]] must be an array of tables")
    out = []
    for row in rows:
        _check_keys("nodes", row, _NODE_KEYS)
        for req in ("id", "x", "y"):
            if req not in row:
                raise ConfigError(f"[[nodes]] entry missing '{req}': {row!r}")
        has_j, has_mj = "energy_j" in row, "energy_mj" in row
        if has_j == has_mj:
            raise ConfigError(
                f"[[nodes]] entry {row.get('id')!r} needs exactly one of energy_j / energy_mj"
            )
        energy = float(row["energy_j"]) if has_j else float(row["energy_mj"]) / 1000.0
        out.append((int(row["id"]), float(row["x"]), float(row["y"]), energy))
    return out


def _parse_attack_nodes(rows: list) -> dict[int, AttackProfile]:
    if not isinstance(rows, list):
        raise ConfigError("[[attacks.nodes]] must be an array of tables")
    kinds = {k.value: k for k in AttackKind}
    out: dict[int, AttackProfile] = {}
    for row in rows:
        _check_keys("attacks.nodes", row, _ATTACK_NODE_KEYS)
        if "id" not in row or "kind" not in row:
            raise ConfigError(f"[[attacks.nodes]] entry needs id and kind: {row!r}")
        kind = kinds.get(row["kind"])
        if kind is None:
            raise ConfigError(
                f"unknown attack kind {row['kind']!r}; one of: {', '.join(sorted(kinds))}"
            )
        nid = int(row["id"])
        if nid in out:
            raise ConfigError(f"attacker id {nid} listed twice")
        out[nid] = AttackProfile(
            kind,
            activation_s=float(row.get("activation_s", 0.0)),
            drop_prob=float(row.get("drop_prob", 0.5)),
            wrong_secret=row.get("wrong_secret"),
        )
    return out


def _parse_mix(raw: dict) -> dict[AttackKind, float]:
    kinds = {k.value: k for k in AttackKind}
    mix: dict[AttackKind, float] = {}
    if not isinstance(raw, dict):
        raise ConfigError("[attacks] mix must be a table of kind = weight")
    for name, weight in raw.items():
        if name not in kinds:
            raise ConfigError(
                f"unknown attack kind {name!r} in mix; one of: {', '.join(sorted(kinds))}"
            )
        if isinstance(weight, bool) or not isinstance(weight, (int, float)) or weight < 0:
            raise ConfigError(f"mix weight for {name} must be a non-negative number")
        mix[kinds[name]] = float(weight)
    return mix


def scenario_to_config(data: dict, overrides: dict | None = None) -> RunConfig:
    """Turn a parsed scenario mapping into a validated RunConfig.

    `overrides` holds command-line overrides applied after the file
    (keys matching RunConfig field names)."""
    if not isinstance(data, dict):
        raise ConfigError("scenario root must be a table")
    unknown = set(data) - _SECTIONS
    if unknown:
        raise ConfigError(
            f"unknown section(s): {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(_SECTIONS))}"
        )

    fld = data.get("field", {})
    dep = data.get("deploy", {})
    pro = data.get("protocol", {})
    enr = data.get("energy", {})
    sec = data.get("security", {})
    atk = data.get("attacks", {})
    _check_keys("field", fld, _FIELD_KEYS)
    _check_keys("deploy", dep, _DEPLOY_KEYS)
    _check_keys("protocol", pro, _PROTOCOL_KEYS)
    _check_keys("energy", enr, _ENERGY_KEYS)
    _check_keys("security", sec, _SECURITY_KEYS)
    _check_keys("attacks", atk, _ATTACK_KEYS)

    base = RunConfig()
    kwargs = dict(
        field_width=_number("field", fld, "width", base.field_width),
        field_height=_number("field", fld, "height", base.field_height),
        radio_range=_number("field", fld, "radio_range", base.radio_range),
        sink_x=_number("field", fld, "sink_x", None),
        sink_y=_number("field", fld, "sink_y", None),
        sink_range=_number("field", fld, "sink_range", None),
        n_nodes=int(_number("deploy", dep, "n_nodes", base.n_nodes)),
        initial_energy_j=_number("deploy", dep, "initial_energy_j", base.initial_energy_j),
        placement=dep.get("placement", base.placement),
        seed=int(_number("deploy", dep, "seed", base.seed)),
        k_clusters=int(_number("protocol", pro, "k_clusters", base.k_clusters)),
        iterations=int(_number("protocol", pro, "iterations", base.iterations)),
        horizon_s=_number("protocol", pro, "horizon_s", base.horizon_s),
        reformation_period=int(_number("protocol", pro, "reformation_period", base.reformation_period)),
        quorum_fraction=_number("protocol", pro, "quorum_fraction", base.quorum_fraction),
        intra_timeout_s=_number("protocol", pro, "intra_timeout_s", base.intra_timeout_s),
        link_rate_bps=_number("protocol", pro, "link_rate_bps", base.link_rate_bps),
        proc_delay_s=_number("protocol", pro, "proc_delay_s", base.proc_delay_s),
        flat_threshold_j=_number("protocol", pro, "flat_threshold_j", base.flat_threshold_j),
        termination_fraction=_number("protocol", pro, "termination_fraction", base.termination_fraction),
        termination_threshold_j=_number("protocol", pro, "termination_threshold_j", base.termination_threshold_j),
        overhead_budget_bytes=_number("protocol", pro, "overhead_budget_bytes", base.overhead_budget_bytes),
        security_enabled=bool(sec.get("enabled", base.security_enabled)),
        mzkp_role_threshold=_number("security", sec, "mzkp_role_threshold", base.mzkp_role_threshold),
        trap_threshold=_number("security", sec, "trap_threshold", base.trap_threshold),
        mine_threshold=_number("security", sec, "mine_threshold", base.mine_threshold),
        dummy_ttl=int(_number("security", sec, "dummy_ttl", base.dummy_ttl)),
        loss_rate=_number("security", sec, "loss_rate", base.loss_rate),
        attack_count=int(_number("attacks", atk, "count", base.attack_count)),
        attack_activation_s=_number("attacks", atk, "activation_s", base.attack_activation_s),
    )
    if not isinstance(kwargs["placement"], str):
        raise ConfigError("[deploy] placement must be a string")
    if "mix" in atk:
        kwargs["attack_mix"] = _parse_mix(atk["mix"])
    if "nodes" in atk:
        kwargs["attack_nodes"] = _parse_attack_nodes(atk["nodes"])
    if "nodes" in data:
        kwargs["nodes"] = _parse_nodes(data["nodes"])

    energy_kwargs = {k: _number("energy", enr, k, None) for k in _ENERGY_KEYS if k in enr}
    if energy_kwargs:
        if "k_data_bits" in energy_kwargs:
            energy_kwargs["k_data_bits"] = int(energy_kwargs["k_data_bits"])
        if "k_signal_bits" in energy_kwargs:
            energy_kwargs["k_signal_bits"] = int(energy_kwargs["k_signal_bits"])
        if "key_length_bits" in energy_kwargs:
            energy_kwargs["key_length_bits"] = int(energy_kwargs["key_length_bits"])
        defaults = asdict(EnergyParams())
        defaults.update(energy_kwargs)
        kwargs["energy"] = EnergyParams(**defaults)

    if overrides:
        kwargs.update(overrides)
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Read a .toml or .json scenario file and build the run configuration."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"scenario file not found: {p}")
    raw = p.read_bytes()
    if p.suffix == ".toml":
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot parse {p}: {exc}") from exc
    elif p.suffix == ".json":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse {p}: {exc}") from exc
    else:
        raise ConfigError(f"unsupported scenario format {p.suffix!r} (use .toml or .json)")
    return scenario_to_config(data, overrides)


def scenario_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_manifest(config: RunConfig, scenario_path: str | Path | None = None) -> dict:
    """JSON-ready snapshot of a resolved configuration for provenance."""
    body = asdict(config)
    body["attack_mix"] = (
        {k.value: w for k, w in config.attack_mix.items()} if config.attack_mix else None
    )
    body["attack_nodes"] = (
        {
            str(nid): {
                "kind": p.kind.value,
                "activation_s": p.activation_s,
                "drop_prob": p.drop_prob,
                "wrong_secret": p.wrong_secret,
            }
            for nid, p in config.attack_nodes.items()
        }
        if config.attack_nodes
        else None
    )
    out = {"config": body}
    if scenario_path is not None:
        out["scenario"] = {
            "path": str(scenario_path),
            "sha256": scenario_digest(scenario_path),
        }
    return out
