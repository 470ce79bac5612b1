"""Deterministic simulator for a clustered, security-hardened WSN routing
protocol: centralized cluster formation, first-order radio energy
accounting, challenge-response gating on inter-cluster traffic, and attack
injection with per-iteration metrics."""

from .adversary import DEFAULT_MIX, AttackKind, AttackProfile, build_attack_set
from .clustering import (
    Cluster,
    ClusterPlan,
    assign_common_nodes,
    flat_region_check,
    form_clusters,
    reform_clusters,
)
from .codec import (
    ChFrame,
    CmReport,
    SignalPacket,
    decode_ch_frame,
    decode_cm_report,
    decode_signal,
    dequantize_energy,
    encode_ch_frame,
    encode_cm_report,
    encode_signal,
    quantize_energy,
)
from .energy import (
    EnergyLedger,
    EnergyParams,
    cpu_energy,
    fleet_energy_budget,
    idle_radio_power_w,
    mem_read_energy,
    mem_write_energy,
    node_message_energy,
    rx_energy,
    sensor_power_w,
    tx_energy,
)
from .engine import (
    Event,
    EventKind,
    RunConfig,
    RunResult,
    Simulation,
    check_termination,
    hop_delay,
    run_simulation,
)
from .errors import (
    ConfigError,
    EsrpError,
    FormationError,
    MalformedPacketError,
    UnknownNodeError,
)
from .metrics import (
    IterationRow,
    MetricsReport,
    alive_decrease_pct,
    combine_overhead,
    delay_pct,
    energy_pct,
    esrp_overhead,
    ldts_overhead,
    lifetime_decrease_pct,
    overhead_pct,
    survival_pct,
)
from .scenario import config_manifest, load_scenario, scenario_digest, scenario_to_config
from .security import (
    PRIME_MODULI,
    KeyMaterial,
    SecurityAssignment,
    SecurityRole,
    Verdict,
    issue_keys_and_roles,
    mine_detection_sweep,
    mzkp_adjudicate,
    mzkp_answer,
    mzkp_challenge,
    promiscuous_audit,
    spawn_dummy_traffic,
)
from .topology import (
    SINK_ID,
    FieldSpec,
    NodeRecord,
    Position,
    Role,
    SecurityStatus,
    TriState,
    deploy,
    distance,
    neighbors,
)

__version__ = "0.1.0"

__all__ = [
    "AttackKind",
    "AttackProfile",
    "ChFrame",
    "Cluster",
    "ClusterPlan",
    "CmReport",
    "ConfigError",
    "DEFAULT_MIX",
    "EnergyLedger",
    "EnergyParams",
    "EsrpError",
    "Event",
    "EventKind",
    "FieldSpec",
    "FormationError",
    "IterationRow",
    "KeyMaterial",
    "MalformedPacketError",
    "MetricsReport",
    "NodeRecord",
    "PRIME_MODULI",
    "Position",
    "Role",
    "RunConfig",
    "RunResult",
    "SINK_ID",
    "SecurityAssignment",
    "SecurityRole",
    "SecurityStatus",
    "SignalPacket",
    "Simulation",
    "TriState",
    "UnknownNodeError",
    "Verdict",
    "alive_decrease_pct",
    "assign_common_nodes",
    "build_attack_set",
    "check_termination",
    "combine_overhead",
    "config_manifest",
    "cpu_energy",
    "decode_ch_frame",
    "decode_cm_report",
    "decode_signal",
    "delay_pct",
    "deploy",
    "dequantize_energy",
    "distance",
    "encode_ch_frame",
    "encode_cm_report",
    "encode_signal",
    "energy_pct",
    "esrp_overhead",
    "fleet_energy_budget",
    "flat_region_check",
    "form_clusters",
    "hop_delay",
    "idle_radio_power_w",
    "issue_keys_and_roles",
    "ldts_overhead",
    "lifetime_decrease_pct",
    "load_scenario",
    "mem_read_energy",
    "mem_write_energy",
    "mine_detection_sweep",
    "mzkp_adjudicate",
    "mzkp_answer",
    "mzkp_challenge",
    "neighbors",
    "node_message_energy",
    "overhead_pct",
    "promiscuous_audit",
    "quantize_energy",
    "reform_clusters",
    "run_simulation",
    "rx_energy",
    "scenario_digest",
    "scenario_to_config",
    "sensor_power_w",
    "spawn_dummy_traffic",
    "survival_pct",
    "tx_energy",
]
