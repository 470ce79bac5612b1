"""Deterministic discrete-event simulation of the clustered secure-routing
protocol.

Each iteration covers one intra-cluster TDMA collection round, one optional
dummy-probe sweep, one inter-cluster forwarding phase with the security
gates, and the iteration boundary (reformation, metrics row, termination
check). Iteration i occupies [i*T, (i+1)*T) with T = horizon / iterations.

Events are processed off a (time, sequence) heap; handlers append
fine-grained protocol steps to the trace with monotonically increasing
timestamps, so the trace is totally ordered. Identical configuration and
seed give identical traces, metrics and exported bytes.

Accounting rules the rest of the package relies on:

- every radio action goes through the integer-femtojoule ledger; a debit
  larger than the residual drains the node, kills it, and loses the packet
  in flight;
- frames and reports are nominal k_data-bit messages for energy and delay,
  while byte counters use the real encoded length;
- control packets are tallied per category (formation, intra, inter,
  relay, security, flat): intra holds the per-cluster poll/report pairs,
  inter holds the sink's per-head poll, the frame deliveries at the sink
  and one window handshake pair, relay holds head-to-head forwarding hops,
  so an attack-free static run measures exactly m*2(n-1) + 2 + 2m intra
  plus inter packets per iteration;
- the sink is mains powered and unmetered.
"""

from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import dataclass, field
from enum import Enum

from .adversary import AttackKind, AttackProfile, build_attack_set
from .clustering import Cluster, ClusterPlan, form_clusters, reform_clusters
from .codec import ChFrame, CmReport, SignalPacket, encode_ch_frame, encode_cm_report, encode_signal, quantize_energy
from .energy import (
    EnergyLedger,
    EnergyParams,
    cpu_energy,
    idle_radio_power_w,
    mem_read_energy,
    mem_write_energy,
    rx_energy,
    sensor_power_w,
    tx_energy,
)
from .errors import ConfigError
from .metrics import IterationRow, MetricsReport, OVERHEAD_CATEGORIES
from .security import (
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
)

log = logging.getLogger(__name__)

SWEEP_WINDOW_S = 0.5
HANDSHAKE_GAP_S = 0.1
SESSION_WINDOW_S = 0.2


class EventKind(Enum):
    FORMATION = "formation"
    INTRA = "intra"
    POLL = "poll"
    SLOT_TX = "slot_tx"
    AGGREGATE = "aggregate"
    SWEEP_START = "sweep_start"
    SWEEP_ACK = "sweep_ack"
    FLAT_REPORT = "flat_report"
    INTER_TRANSFER = "inter_transfer"
    INTER_OPEN = "inter_open"
    SINK_POLL = "sink_poll"
    CHALLENGE = "challenge"
    ANSWER = "answer"
    VERDICT = "verdict"
    ACK = "ack"
    AUDIT = "audit"
    FRAME_TX = "frame_tx"
    DELIVERY = "delivery"
    DUMMY_HOP = "dummy_hop"
    REFORM = "reform"
    TERMINATE = "terminate"


@dataclass(order=True, slots=True)
class Event:
    time: float
    seq: int
    kind: EventKind = field(compare=False)
    src: int = field(compare=False, default=-1)
    dst: int = field(compare=False, default=-1)
    info: dict = field(compare=False, default_factory=dict)


@dataclass
class FrameRecord:
    origin: int
    reports: int
    size_bytes: int
    hops: int


@dataclass
class RunConfig:
    """Full run parameterization; defaults mirror the benchmark scenario
    (1900x1100 m field, 100 nodes at 2 J, 5 clusters, 3600 s horizon,
    5 iterations, 25 attackers, 2 Mbit/s link)."""

    field_width: float = 1900.0
    field_height: float = 1100.0
    radio_range: float = 50.0
    sink_range: float | None = None
    sink_x: float | None = None
    sink_y: float | None = None
    n_nodes: int = 100
    initial_energy_j: float = 2.0
    placement: str = "random"
    nodes: list[tuple[int, float, float, float]] | None = None
    k_clusters: int = 5
    iterations: int = 5
    horizon_s: float = 3600.0
    reformation_period: int = 1
    quorum_fraction: float = 2.0 / 3.0
    intra_timeout_s: float = 5.0
    link_rate_bps: float = 2_000_000.0
    proc_delay_s: float = 0.0
    energy: EnergyParams = field(default_factory=EnergyParams)
    security_enabled: bool = True
    mzkp_role_threshold: float = 0.25
    trap_threshold: float = 0.50
    mine_threshold: float = 0.10
    dummy_ttl: int = 3
    loss_rate: float = 0.0
    attack_count: int = 25
    attack_mix: dict[AttackKind, float] | None = None
    attack_activation_s: float = 0.0
    attack_nodes: dict[int, AttackProfile] | None = None
    flat_threshold_j: float = 0.5
    termination_fraction: float = 0.85
    termination_threshold_j: float = 0.5
    overhead_budget_bytes: float = 650.0
    seed: int = 1

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ConfigError("iterations cannot be negative")
        if self.horizon_s <= 0:
            raise ConfigError("horizon must be positive")
        if self.k_clusters < 1:
            raise ConfigError("need at least one cluster")
        if not 0 < self.quorum_fraction <= 1:
            raise ConfigError("quorum fraction must be in (0, 1]")
        if self.reformation_period < 0:
            raise ConfigError("reformation period cannot be negative (0 disables)")
        if not 0 <= self.loss_rate < 1:
            raise ConfigError("loss rate must be in [0, 1)")
        if self.dummy_ttl < 1:
            raise ConfigError("dummy ttl must be >= 1")
        if self.link_rate_bps <= 0:
            raise ConfigError("link rate must be positive")
        if self.proc_delay_s < 0:
            raise ConfigError("processing delay cannot be negative")
        for name in ("mzkp_role_threshold", "trap_threshold", "mine_threshold"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name} must be a fraction in [0, 1]")
        if self.iterations > 0:
            span = self.horizon_s / self.iterations
            need = (
                self.intra_timeout_s + SWEEP_WINDOW_S + HANDSHAKE_GAP_S
                + (self.k_clusters + 2) * SESSION_WINDOW_S
            )
            if span <= need:
                raise ConfigError(
                    f"iteration span {span:.3f}s cannot hold the phase windows "
                    f"({need:.3f}s); raise horizon or lower intra_timeout_s"
                )

    def iteration_span(self) -> float:
        return self.horizon_s / self.iterations if self.iterations else self.horizon_s

    def field_spec(self) -> FieldSpec:
        return FieldSpec(self.field_width, self.field_height, self.radio_range)

    def sink_position(self) -> Position:
        spec = self.field_spec()
        x = self.sink_x if self.sink_x is not None else spec.width / 2
        y = self.sink_y if self.sink_y is not None else spec.height / 2
        return Position(x, y)


def hop_delay(k_bits: int | float, link_rate_bps: float, proc_delay_s: float = 0.0) -> float:
    """Seconds for one hop: serialization plus per-hop processing."""
    if k_bits <= 0:
        raise ConfigError("message length must be positive")
    if link_rate_bps <= 0:
        raise ConfigError("link rate must be positive")
    if proc_delay_s < 0:
        raise ConfigError("processing delay cannot be negative")
    return k_bits / link_rate_bps + proc_delay_s


def check_termination(
    records: dict[int, NodeRecord],
    fraction: float = 0.85,
    threshold_j: float = 0.5,
) -> bool:
    """True when at least `fraction` of the sensors sit below threshold_j."""
    sensors = [r for nid, r in records.items() if r.role is not Role.SINK]
    if not sensors:
        return True
    below = sum(1 for r in sensors if r.residual_j < threshold_j)
    return below / len(sensors) >= fraction


@dataclass
class RunResult:
    config: RunConfig
    records: dict[int, NodeRecord]
    ledger: EnergyLedger
    plan: ClusterPlan
    plans: list[ClusterPlan]
    metrics: MetricsReport
    trace: list[Event]
    security_log: list[dict]
    blocked_at: dict[int, float]
    attack_map: dict[int, AttackProfile]


class Simulation:
    """One seeded run. Build, then call run() exactly once."""

    def __init__(self, config: RunConfig) -> None:
        self.cfg = config
        self.params = config.energy
        self._seq = 0
        self._heap: list[Event] = []
        self.trace: list[Event] = []
        self.security_log: list[dict] = []
        self.blocked_at: dict[int, float] = {}
        self.delivered_frames = 0
        self.delivered_reports = 0
        self.cum_delay_ms = 0.0
        self._iter_delay_s = 0.0
        self.packets = {c: 0 for c in OVERHEAD_CATEGORIES}
        self.bytes = {c: 0 for c in OVERHEAD_CATEGORIES}
        self._outbox: dict[int, list[FrameRecord]] = {}
        self._finished = False

        self._attack_rng = random.Random(f"{config.seed}/attack")
        self._security_rng = random.Random(f"{config.seed}/security")
        self._data_rng = random.Random(f"{config.seed}/data")

        self.records = self._deploy()
        n_sensors = len(self.records) - 1
        slot_span = self._signal_delay() + (n_sensors + 1) * self._data_delay()
        if config.iterations > 0 and slot_span > config.intra_timeout_s:
            raise ConfigError(
                f"{n_sensors} report slots need {slot_span:.3f}s but the "
                f"collection timeout is {config.intra_timeout_s}s"
            )
        self.ledger = EnergyLedger()
        for nid in sorted(self.records):
            rec = self.records[nid]
            if rec.role is not Role.SINK:
                self.ledger.register(nid, rec.initial_energy_j)
        self.sink = self.records[SINK_ID]

        self.attack_map = self._place_attackers()
        for nid, profile in self.attack_map.items():
            self.records[nid].attack = profile

        self.statuses: dict[int, SecurityStatus] = {
            nid: self.records[nid].status for nid in sorted(self.records) if nid != SINK_ID
        }
        self.plan = ClusterPlan([], set(), 0)
        self.plans: list[ClusterPlan] = []
        self.assignment: SecurityAssignment | None = None

        budget = sum(
            rec.initial_energy_j for nid, rec in self.records.items() if rec.role is not Role.SINK
        )
        self.metrics = MetricsReport(
            initial_alive=len(self.records) - 1,
            initial_clusters=0,
            horizon_s=config.horizon_s,
            energy_budget_j=budget,
            overhead_budget_bytes=config.overhead_budget_bytes,
        )

    # -- construction ------------------------------------------------------

    def _deploy(self) -> dict[int, NodeRecord]:
        cfg = self.cfg
        if cfg.nodes is not None:
            spec = cfg.field_spec()
            records: dict[int, NodeRecord] = {}
            seen = set()
            for nid, x, y, energy_j in cfg.nodes:
                if nid in seen:
                    raise ConfigError(f"duplicate node id {nid} in node table")
                if nid == SINK_ID:
                    raise ConfigError(f"id {SINK_ID} is reserved for the sink")
                seen.add(nid)
                records[nid] = NodeRecord(nid, Position(x, y), energy_j)
            if not records:
                raise ConfigError("explicit node table is empty")
            records[SINK_ID] = NodeRecord(SINK_ID, cfg.sink_position(), 0.0, role=Role.SINK)
            return records
        return deploy(
            cfg.field_spec(), cfg.n_nodes, cfg.initial_energy_j, cfg.seed,
            placement=cfg.placement, sink_pos=cfg.sink_position(),
        )

    def _place_attackers(self) -> dict[int, AttackProfile]:
        cfg = self.cfg
        if cfg.attack_nodes is not None:
            for nid in cfg.attack_nodes:
                if nid not in self.records or nid == SINK_ID:
                    raise ConfigError(f"attacker id {nid} is not a deployed sensor")
            return dict(sorted(cfg.attack_nodes.items()))
        sensor_ids = [nid for nid in sorted(self.records) if nid != SINK_ID]
        return build_attack_set(
            sensor_ids, cfg.attack_count, self._attack_rng,
            mix=cfg.attack_mix, activation_s=cfg.attack_activation_s,
        )

    # -- small helpers -----------------------------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _push(self, time_s: float, kind: EventKind, src: int = -1, dst: int = -1, **info) -> None:
        heapq.heappush(self._heap, Event(time_s, self._next_seq(), kind, src, dst, info))

    def _trace(self, time_s: float, kind: EventKind, src: int = -1, dst: int = -1, **info) -> None:
        self.trace.append(Event(time_s, self._next_seq(), kind, src, dst, info))

    def _log_security(self, time_s: float, event: str, **fields) -> None:
        self.security_log.append({"t": time_s, "event": event, **fields})

    def _count(self, category: str, n_bytes: int) -> None:
        self.packets[category] += 1
        self.bytes[category] += n_bytes

    def _silenced(self, nid: int) -> bool:
        if nid == SINK_ID:
            return False
        rec = self.records[nid]
        return rec.role in (Role.DEAD, Role.BLOCKED) or rec.residual_j <= 0

    def _charge(self, nid: int, category: str, joules: float) -> bool:
        """Debit a sensor; returns False when the node died paying it."""
        if nid == SINK_ID:
            return True
        self.ledger.charge(nid, category, joules)
        rec = self.records[nid]
        rec.residual_j = self.ledger.residual_j(nid)
        if self.ledger.residual_fj(nid) <= 0:
            if rec.role is not Role.DEAD:
                rec.role = Role.DEAD
            return False
        return True

    def _tx(self, nid: int, bits: float, d: float) -> bool:
        return self._charge(nid, "tx", tx_energy(bits, d, self.params))

    def _rx(self, nid: int, bits: float) -> bool:
        ok = self._charge(nid, "rx", rx_energy(bits, self.params))
        if ok:
            ok = self._charge(nid, "cpu", cpu_energy(bits, self.params))
        return ok

    def _awake(self, nid: int, seconds: float) -> bool:
        if seconds <= 0:
            return True
        ok = self._charge(nid, "idle", idle_radio_power_w(self.params) * seconds)
        if ok:
            ok = self._charge(nid, "sensor", sensor_power_w(self.params) * seconds)
        return ok

    def _d(self, a: int, b: int) -> float:
        return distance(self.records[a], self.records[b])

    def _signal_delay(self) -> float:
        return hop_delay(self.params.k_signal_bits, self.cfg.link_rate_bps, self.cfg.proc_delay_s)

    def _data_delay(self) -> float:
        return hop_delay(self.params.k_data_bits, self.cfg.link_rate_bps, self.cfg.proc_delay_s)

    def _attack(self, nid: int, t: float) -> AttackProfile | None:
        profile = self.records[nid].attack
        if profile is not None and profile.active(t):
            return profile
        return None

    def _block(self, nid: int, t: float, reason: str) -> None:
        rec = self.records[nid]
        if rec.role in (Role.BLOCKED, Role.DEAD):
            return
        rec.role = Role.BLOCKED
        self.blocked_at[nid] = t
        self._log_security(t, "block", node=nid, reason=reason)

    # -- formation ---------------------------------------------------------

    def _apply_plan_roles(self) -> None:
        clustered = self.plan.clustered_ids()
        ch_ids = set(self.plan.ch_ids())
        for nid in sorted(self.records):
            rec = self.records[nid]
            if rec.role in (Role.SINK, Role.DEAD, Role.BLOCKED):
                continue
            if nid in ch_ids:
                rec.role = Role.CH
            elif nid in clustered:
                rec.role = Role.CM
            elif nid in self.plan.flat:
                rec.role = Role.FLAT
            else:
                rec.role = Role.FLAT if rec.alive else Role.DEAD

    def _distribute_plan(self, t: float) -> None:
        """Sink tells each head its assignment, heads intimate their members."""
        ds = self._signal_delay()
        keys = self.assignment.keys if self.assignment else {}
        n_pub = self.assignment.public_n if self.assignment else 0
        for cluster in self.plan.clusters:
            ch = cluster.ch_id
            if self._silenced(ch):
                continue
            key = keys.get(ch)
            pkt = SignalPacket(
                ch_id=ch,
                public_key=n_pub % 256 if key else 0,
                private_key=key.secret_s if key else 0,
                cm_ids=tuple(sorted(cluster.members)[:4]),
                neighbor_ch_id=cluster.upstream_id,
            )
            wire = encode_signal(pkt)
            self._count("formation", len(wire))
            self._trace(t, EventKind.FORMATION, SINK_ID, ch)
            alive = self._rx(ch, self.params.k_signal_bits)
            self._charge(ch, "mem", 2 * mem_write_energy(self.params.key_length_bits, self.params))
            if not alive:
                continue
            t_m = t + ds
            for member in sorted(cluster.members):
                if self._silenced(member):
                    continue
                self._count("formation", len(wire))
                self._trace(t_m, EventKind.FORMATION, ch, member)
                if not self._tx(ch, self.params.k_signal_bits, self._d(ch, member)):
                    break
                if self._rx(member, self.params.k_signal_bits):
                    self._charge(member, "mem", mem_write_energy(self.params.key_length_bits, self.params))
                t_m += ds

    def _form(self, t: float, initial: bool) -> None:
        eligible = None
        self.plan = form_clusters(
            self.records, SINK_ID, self.cfg.k_clusters, self.cfg.radio_range,
            sink_range=self.cfg.sink_range, eligible=eligible,
            epoch=0 if initial else self.plan.epoch + 1,
        )
        self.plans.append(self.plan)
        self._apply_plan_roles()
        if self.cfg.security_enabled:
            self.assignment = issue_keys_and_roles(
                self.plan, self.records, self._security_rng,
                role_threshold_fraction=self.cfg.mzkp_role_threshold,
                previous=self.assignment,
            )
        self._distribute_plan(t)
        if initial:
            self.metrics.initial_clusters = len(self.plan.clusters)

    # -- intra phase -------------------------------------------------------

    def step_intra_round(self, cluster: Cluster, t0: float) -> FrameRecord | None:
        """TDMA collection for one cluster; returns the aggregated frame."""
        cfg = self.cfg
        ch = cluster.ch_id
        if self._silenced(ch):
            return None
        # Head stays awake the whole iteration span.
        if not self._awake(ch, cfg.iteration_span()):
            return None
        ds, dd = self._signal_delay(), self._data_delay()
        members = [m for m in sorted(cluster.members) if not self._silenced(m)]

        polled = []
        for m in members:
            self._count("intra", len(encode_signal(SignalPacket(ch_id=ch))))
            self._trace(t0, EventKind.POLL, ch, m)
            if not self._tx(ch, self.params.k_signal_bits, self._d(ch, m)):
                break
            sweep_on = cfg.security_enabled and self._mine_enabled(ch)
            awake = ds + dd + (2 * ds if sweep_on else 0.0)
            if self._rx(m, self.params.k_signal_bits) and self._awake(m, awake):
                polled.append(m)

        received: list[CmReport] = []
        t_slot = t0 + ds
        for j, m in enumerate(polled):
            t_slot = t0 + ds + (j + 1) * dd
            reading = bytes([self._data_rng.randrange(256)])
            report = CmReport(
                node_id=m,
                energy=quantize_energy(self.records[m].residual_j, self.records[m].initial_energy_j),
                ch_id=ch,
                payload=reading,
            )
            wire = encode_cm_report(report)
            self._count("intra", len(wire))
            self._trace(t_slot, EventKind.SLOT_TX, m, ch)
            if not self._tx(m, self.params.k_data_bits, self._d(m, ch)):
                continue
            if self._silenced(ch):
                continue
            if not self._rx(ch, self.params.k_data_bits):
                continue
            self._charge(ch, "mem", mem_write_energy(self.params.key_length_bits, self.params))
            received.append(report)

        if self._silenced(ch):
            return None
        quorum_needed = math.ceil(cfg.quorum_fraction * len(cluster.members)) if cluster.members else 0
        if len(received) >= quorum_needed:
            t_agg = t_slot if polled else t0 + ds
        else:
            t_agg = t0 + cfg.intra_timeout_s

        # Duplicate readings are suppressed, first reporter wins.
        seen: dict[bytes, int] = {}
        for rep in received:
            if rep.payload not in seen:
                seen[rep.payload] = rep.node_id
        payload = b"".join(sorted(seen))[:255]

        self._charge(ch, "cpu", cpu_energy(self.params.k_data_bits, self.params))
        rec = self.records[ch]
        status = self.statuses[ch]
        role = self.assignment.roles.get(ch, SecurityRole.NONE) if self.assignment else SecurityRole.NONE
        frame = ChFrame(
            node_id=ch,
            energy=quantize_energy(rec.residual_j, rec.initial_energy_j),
            hierarchical=True,
            is_ch=True,
            role=int(role),
            trap_enable=self._trap_enabled(ch),
            mine_enable=self._mine_enabled(ch),
            promisc_enable=bool(role & SecurityRole.PROVER),
            next_ch_id=cluster.upstream_id,
            cm_id=received[-1].node_id if received else 0,
            cm_energy=received[-1].energy if received else 0,
            cm_payload=payload,
            secret_key=self.assignment.keys[ch].secret_s if self.assignment and ch in self.assignment.keys else 0,
            public_key=self.assignment.public_n % 256 if self.assignment else 0,
            cm_energy2=min((r.energy for r in received), default=0),
            mzkp_status=int(status.mzkp),
            promisc_status=int(status.promiscuous),
            mine_status=int(status.mine),
        )
        size = len(encode_ch_frame(frame))
        self._trace(t_agg, EventKind.AGGREGATE, ch, ch, reports=len(received), quorum=quorum_needed)
        return FrameRecord(origin=ch, reports=len(received), size_bytes=size, hops=1 if received else 0)

    def _mine_enabled(self, ch: int) -> bool:
        rec = self.records[ch]
        return rec.residual_j > self.cfg.mine_threshold * rec.initial_energy_j

    def _trap_enabled(self, ch: int) -> bool:
        rec = self.records[ch]
        return rec.residual_j > self.cfg.trap_threshold * rec.initial_energy_j

    def _intra(self, t0: float, iteration: int) -> None:
        self._outbox = {}
        for cluster in self.plan.clusters:
            frame = self.step_intra_round(cluster, t0)
            if frame is not None:
                self._outbox[cluster.ch_id] = [frame]
        # Flat nodes report straight to the sink, paying the long-hop cost.
        dd = self._data_delay()
        t_f = t0
        for j, nid in enumerate(sorted(self.plan.flat)):
            if self._silenced(nid):
                continue
            t_f = t0 + j * dd
            rec = self.records[nid]
            report = CmReport(
                node_id=nid,
                energy=quantize_energy(rec.residual_j, rec.initial_energy_j),
                ch_id=SINK_ID,
                payload=bytes([self._data_rng.randrange(256)]),
            )
            if not self._awake(nid, dd):
                continue
            wire = encode_cm_report(report)
            self._count("flat", len(wire))
            self._trace(t_f, EventKind.FLAT_REPORT, nid, SINK_ID)
            if self._tx(nid, self.params.k_data_bits, self._d(nid, SINK_ID)):
                self.delivered_reports += 1
                self._iter_delay_s = max(self._iter_delay_s, dd)

    # -- sweep phase -------------------------------------------------------

    def _sweep(self, t0: float, iteration: int) -> None:
        if not self.cfg.security_enabled:
            return
        ds = self._signal_delay()
        for cluster in self.plan.clusters:
            ch = cluster.ch_id
            if self._silenced(ch) or not self._mine_enabled(ch) or not cluster.members:
                continue
            probe_attack = self._attack(ch, t0)
            if probe_attack is not None and probe_attack.kind is AttackKind.BLACK_HOLE:
                continue  # a silent head never probes
            self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
            self._trace(t0, EventKind.SWEEP_START, ch)
            if not self._tx(ch, self.params.k_signal_bits, self.cfg.radio_range):
                continue
            acked: set[int] = set()
            t_a = t0 + ds
            for m in sorted(cluster.members):
                if self._silenced(m):
                    continue
                if not self._rx(m, self.params.k_signal_bits):
                    continue
                profile = self._attack(m, t_a)
                if profile is not None and profile.kind in (AttackKind.SELF_INTRUDER, AttackKind.BLACK_HOLE):
                    t_a += ds
                    continue  # stays silent; still paid for hearing the probe
                self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
                self._trace(t_a, EventKind.SWEEP_ACK, m, ch)
                if self._tx(m, self.params.k_signal_bits, self._d(m, ch)):
                    if not self._silenced(ch):
                        self._rx(ch, self.params.k_signal_bits)
                        acked.add(m)
                t_a += ds
            flagged = mine_detection_sweep(set(cluster.members), acked)
            for m in sorted(flagged):
                self.statuses[m].mine = TriState.FAIL
                self._log_security(t_a, "mine_flag", cluster=ch, node=m)
            for m in sorted(set(cluster.members) - flagged):
                if self.statuses[m].mine is not TriState.FAIL:
                    self.statuses[m].mine = TriState.PASS

    # -- inter phase -------------------------------------------------------

    def _depths(self) -> dict[int, int]:
        upstream = self.plan.upstream_map()
        depths: dict[int, int] = {}

        def depth(ch: int) -> int:
            if ch == SINK_ID:
                return 0
            if ch not in depths:
                depths[ch] = 1 + depth(upstream[ch])
            return depths[ch]

        for ch in upstream:
            depth(ch)
        return depths

    def step_inter_round(self, t0: float, iteration: int) -> None:
        """Forward every head's frame upstream through the security gates."""
        if not self.plan.clusters:
            return
        live_chs = [c.ch_id for c in self.plan.clusters if not self._silenced(c.ch_id)]
        if not live_chs:
            return
        ds = self._signal_delay()
        sig_bytes = len(encode_signal(SignalPacket(ch_id=0)))

        # One window-open/ack handshake with the head nearest the sink.
        opener = sorted(live_chs, key=lambda c: (self._d(c, SINK_ID), c))[0]
        self._count("inter", sig_bytes)
        self._trace(t0, EventKind.INTER_OPEN, SINK_ID, opener)
        if self._rx(opener, self.params.k_signal_bits):
            self._count("inter", sig_bytes)
            self._trace(t0 + ds, EventKind.INTER_OPEN, opener, SINK_ID)
            self._tx(opener, self.params.k_signal_bits, self._d(opener, SINK_ID))

        # Sink polls each head for its aggregate.
        t_p = t0 + HANDSHAKE_GAP_S / 2
        for cluster in self.plan.clusters:
            ch = cluster.ch_id
            if self._silenced(ch):
                continue
            self._count("inter", sig_bytes)
            self._trace(t_p, EventKind.SINK_POLL, SINK_ID, ch)
            self._rx(ch, self.params.k_signal_bits)

        depths = self._depths()
        order = sorted(
            (c.ch_id for c in self.plan.clusters),
            key=lambda ch: (-depths[ch], ch),
        )
        t_base = t0 + HANDSHAKE_GAP_S
        for idx, ch in enumerate(order):
            self._session(ch, t_base + idx * SESSION_WINDOW_S, iteration)

    def _session(self, ch: int, t_s: float, iteration: int) -> None:
        if self._silenced(ch):
            self._outbox.pop(ch, None)
            return
        frames = self._outbox.pop(ch, [])
        if not frames:
            return
        attack = self._attack(ch, t_s)
        if attack is not None and attack.kind is AttackKind.BLACK_HOLE:
            return  # swallows everything it collected, transmits nothing
        verifier = self.plan.upstream_map()[ch]
        if verifier != SINK_ID and self.records[verifier].role is Role.BLOCKED:
            return  # upstream was blocked mid-phase; frames are lost
        self._trace(t_s, EventKind.INTER_TRANSFER, ch, verifier, frames=len(frames))
        gated = self._gate(ch, verifier, t_s, iteration)
        if gated is None:
            return  # gate failed; frames lost
        self._forward_frames(ch, verifier, frames, t_s + 6 * self._signal_delay(), gated)
        self._spawn_dummy(ch, t_s + SESSION_WINDOW_S / 2)

    def _gate(self, ch: int, verifier: int, t_s: float, iteration: int) -> bool | None:
        """Run the challenge-response gate. Returns True when audited
        (gated), False when the hop is ungated, None when the transfer must
        be abandoned."""
        cfg = self.cfg
        ds = self._signal_delay()
        if not cfg.security_enabled or self.assignment is None:
            return False
        role = self.assignment.roles.get(ch, SecurityRole.NONE)
        if not role & SecurityRole.PROVER:
            return False
        if verifier != SINK_ID:
            v_role = self.assignment.roles.get(verifier, SecurityRole.NONE)
            if not v_role & SecurityRole.VERIFIER:
                return False

        if verifier != SINK_ID:
            v_attack = self._attack(verifier, t_s)
            if self._silenced(verifier) or (v_attack is not None and v_attack.kind is AttackKind.BLACK_HOLE):
                # No challenge ever arrives; the prover flags its upstream.
                promiscuous_audit(self.statuses[verifier], False)
                self._trace(t_s, EventKind.AUDIT, ch, verifier, heard=False)
                self._log_security(t_s, "audit_fail", prover=ch, verifier=verifier, cause="silent_upstream")
                return None

        key = self.assignment.keys.get(ch)
        if key is None:
            return False
        q = mzkp_challenge(self._security_rng, self.assignment.public_n)
        self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
        self._trace(t_s, EventKind.CHALLENGE, verifier, ch, q=q)
        if verifier != SINK_ID:
            if not self._tx(verifier, self.params.k_signal_bits, self._d(verifier, ch)):
                return None
        if not self._rx(ch, self.params.k_signal_bits):
            return None

        attack = self._attack(ch, t_s)
        answer: int | None
        if attack is not None and attack.kind is AttackKind.BLACK_HOLE:
            answer = None
        else:
            self._charge(ch, "mem", 2 * mem_read_energy(self.params.key_length_bits, self.params))
            self._charge(ch, "cpu", cpu_energy(self.params.k_signal_bits, self.params))
            secret = key.secret_s
            if attack is not None and attack.kind is AttackKind.COMPROMISED:
                secret = attack.wrong_secret if attack.wrong_secret is not None else (key.secret_s + 1) % 256
            answer = mzkp_answer(secret, self.assignment.public_n, q)
            sig_bytes = len(encode_signal(SignalPacket(ch_id=ch)))
            self._count("security", sig_bytes)
            self._trace(t_s + ds, EventKind.ANSWER, ch, verifier, answer=answer)
            if not self._tx(ch, self.params.k_signal_bits, self._d(ch, verifier)):
                return None
            if verifier != SINK_ID:
                if not self._rx(verifier, self.params.k_signal_bits):
                    return None
                # Verifier relays the answer to the sink for adjudication.
                self._count("security", sig_bytes)
                self._trace(t_s + 2 * ds, EventKind.ANSWER, verifier, SINK_ID)
                if not self._tx(verifier, self.params.k_signal_bits, self._d(verifier, SINK_ID)):
                    return None

        verdict = mzkp_adjudicate(key.secret_s, self.assignment.public_n, q, answer)
        self._trace(t_s + 3 * ds, EventKind.VERDICT, SINK_ID, ch, verdict=verdict.value)
        self._log_security(
            t_s, "challenge", prover=ch, verifier=verifier, q=q,
            answer=answer, verdict=verdict.value, epoch=self.assignment.epoch,
        )
        if verdict is Verdict.BLOCK:
            self.statuses[ch].mzkp = TriState.FAIL
            self._block(ch, t_s + 3 * ds, "mzkp")
            if verifier != SINK_ID:
                self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
                self._rx(verifier, self.params.k_signal_bits)
            return None
        if self.statuses[ch].mzkp is not TriState.FAIL:
            self.statuses[ch].mzkp = TriState.PASS
        # Sink tells the verifier to accept, verifier clears the prover.
        if verifier != SINK_ID:
            self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
            self._rx(verifier, self.params.k_signal_bits)
            self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
            self._trace(t_s + 4 * ds, EventKind.ACK, verifier, ch, phase="clearance")
            if not self._tx(verifier, self.params.k_signal_bits, self._d(verifier, ch)):
                return None
            if not self._rx(ch, self.params.k_signal_bits):
                return None
        return True

    def _forward_frames(
        self, ch: int, verifier: int, frames: list[FrameRecord], t_f: float, gated: bool
    ) -> None:
        dd = self._data_delay()
        ds = self._signal_delay()
        v_attack = self._attack(verifier, t_f) if verifier != SINK_ID else None
        for frame in frames:
            self._trace(t_f, EventKind.FRAME_TX, ch, verifier, origin=frame.origin)
            if not self._tx(ch, self.params.k_data_bits, self._d(ch, verifier)):
                break
            if verifier == SINK_ID:
                frame.hops += 1
                self.delivered_frames += 1
                self.delivered_reports += frame.reports
                self._iter_delay_s = max(self._iter_delay_s, frame.hops * dd)
                self._count("inter", frame.size_bytes)
                self._trace(t_f + dd, EventKind.DELIVERY, ch, SINK_ID, origin=frame.origin, hops=frame.hops)
            else:
                if self._silenced(verifier) or not self._rx(verifier, self.params.k_data_bits):
                    t_f += dd
                    continue
                dropped = False
                if v_attack is not None:
                    if v_attack.kind is AttackKind.BLACK_HOLE:
                        dropped = True
                    elif v_attack.kind is AttackKind.SELECTIVE_FORWARD:
                        dropped = self._attack_rng.random() < v_attack.drop_prob
                if not dropped:
                    frame.hops += 1
                    self._count("relay", frame.size_bytes)
                    self._outbox.setdefault(verifier, []).append(frame)
                if gated:
                    ack_sent = not dropped
                    heard = ack_sent and not (
                        self.cfg.loss_rate > 0 and self._security_rng.random() < self.cfg.loss_rate
                    )
                    if ack_sent:
                        self._count("security", len(encode_signal(SignalPacket(ch_id=ch))))
                        self._trace(t_f + dd, EventKind.ACK, verifier, ch, phase="delivery", origin=frame.origin)
                        self._tx(verifier, self.params.k_signal_bits, self._d(verifier, ch))
                        if not self._silenced(ch):
                            self._rx(ch, self.params.k_signal_bits)
                    outcome = promiscuous_audit(self.statuses[verifier], heard)
                    self._trace(t_f + dd + ds, EventKind.AUDIT, ch, verifier, heard=heard)
                    if outcome is TriState.FAIL and not heard:
                        self._log_security(
                            t_f, "audit_fail", prover=ch, verifier=verifier,
                            cause="no_ack", origin=frame.origin,
                        )
            t_f += dd

    def _spawn_dummy(self, ch: int, t_d: float) -> None:
        if not self.cfg.security_enabled or self._silenced(ch) or not self._trap_enabled(ch):
            return
        packet = spawn_dummy_traffic(ch, self.cfg.dummy_ttl, self._security_rng)
        upstream = self.plan.upstream_map()
        ds = self._signal_delay()
        sig_bytes = len(encode_signal(SignalPacket(ch_id=ch)))
        cur, ttl, t = ch, packet.ttl, t_d
        while ttl > 0 and not self._silenced(cur):
            children = sorted(
                c for c, up in upstream.items()
                if up == cur and not self._silenced(c)
            )
            target = children[0] if children else None
            self._count("security", sig_bytes)
            self._trace(t, EventKind.DUMMY_HOP, cur, target if target is not None else -1, ttl=ttl)
            d = self._d(cur, target) if target is not None else self.cfg.radio_range
            if not self._tx(cur, self.params.k_signal_bits, d):
                break
            ttl -= 1
            if target is None:
                break
            if not self._rx(target, self.params.k_signal_bits):
                break
            cur = target
            t += ds

    # -- boundary ----------------------------------------------------------

    def _boundary(self, t_b: float, iteration: int) -> bool:
        """Reform if due, record the metrics row, check termination.
        Returns True when the run should continue."""
        cfg = self.cfg
        if cfg.reformation_period > 0 and (iteration + 1) % cfg.reformation_period == 0:
            self._trace(t_b, EventKind.REFORM, SINK_ID, -1, epoch=self.plan.epoch + 1)
            for nid in sorted(self.statuses):
                if self.statuses[nid].any_fail():
                    self._block(nid, t_b, "reformation")
            self.plan = reform_clusters(
                self.plan, self.records, self.statuses, SINK_ID,
                cfg.k_clusters, cfg.radio_range,
                flat_threshold_j=cfg.flat_threshold_j, sink_range=cfg.sink_range,
            )
            self.plans.append(self.plan)
            self._apply_plan_roles()
            for nid in sorted(self.statuses):
                if self.records[nid].role is not Role.BLOCKED:
                    self.statuses[nid].reset()
            if cfg.security_enabled:
                self.assignment = issue_keys_and_roles(
                    self.plan, self.records, self._security_rng,
                    role_threshold_fraction=cfg.mzkp_role_threshold,
                    previous=self.assignment,
                )
            self._distribute_plan(t_b)

        self.cum_delay_ms += self._iter_delay_s * 1000.0
        self._iter_delay_s = 0.0
        alive = sum(
            1 for nid, r in self.records.items()
            if nid != SINK_ID and r.residual_j > 0 and r.role is not Role.DEAD
        )
        blocked = sum(1 for r in self.records.values() if r.role is Role.BLOCKED)
        flat = sum(1 for r in self.records.values() if r.role is Role.FLAT)
        self.metrics.rows.append(IterationRow(
            iteration=iteration + 1,
            time_s=t_b,
            alive=alive,
            clusters=len(self.plan.clusters),
            blocked=blocked,
            flat=flat,
            delivered_frames=self.delivered_frames,
            delivered_reports=self.delivered_reports,
            energy_j=self.ledger.total_spent_j(),
            delay_ms=self.cum_delay_ms,
            overhead_packets=sum(self.packets.values()),
            overhead_bytes=sum(self.bytes.values()),
            packets_by_category=dict(self.packets),
            bytes_by_category=dict(self.bytes),
        ))

        if check_termination(self.records, cfg.termination_fraction, cfg.termination_threshold_j):
            self.metrics.terminated_early = True
            self.metrics.terminated_at_iteration = iteration + 1
            self._trace(t_b, EventKind.TERMINATE, SINK_ID, -1, iteration=iteration + 1)
            return False
        return iteration + 1 < cfg.iterations

    # -- main loop ---------------------------------------------------------

    def run(self) -> RunResult:
        if self._finished:
            raise ConfigError("simulation already ran; build a fresh one")
        self._finished = True
        cfg = self.cfg
        self._trace(0.0, EventKind.FORMATION, SINK_ID, -1, epoch=0)
        self._form(0.0, initial=True)

        early = check_termination(self.records, cfg.termination_fraction, cfg.termination_threshold_j)
        if early:
            self.metrics.terminated_early = True
            self.metrics.terminated_at_iteration = 0
            self._trace(0.0, EventKind.TERMINATE, SINK_ID, -1, iteration=0)
        elif cfg.iterations > 0:
            self._schedule_iteration(0)

        while self._heap:
            ev = heapq.heappop(self._heap)
            if ev.kind is EventKind.INTRA:
                self._intra(ev.time, ev.info["iteration"])
            elif ev.kind is EventKind.SWEEP_START:
                self._sweep(ev.time, ev.info["iteration"])
            elif ev.kind is EventKind.INTER_TRANSFER:
                self.step_inter_round(ev.time, ev.info["iteration"])
            elif ev.kind is EventKind.REFORM:
                if self._boundary(ev.time, ev.info["iteration"]):
                    self._schedule_iteration(ev.info["iteration"] + 1)
        # Clusters progress in parallel; the per-cluster appends interleave.
        self.trace.sort()
        return RunResult(
            config=cfg,
            records=self.records,
            ledger=self.ledger,
            plan=self.plan,
            plans=self.plans,
            metrics=self.metrics,
            trace=self.trace,
            security_log=self.security_log,
            blocked_at=self.blocked_at,
            attack_map=self.attack_map,
        )

    def _schedule_iteration(self, iteration: int) -> None:
        span = self.cfg.iteration_span()
        t0 = iteration * span
        self._push(t0, EventKind.INTRA, iteration=iteration)
        self._push(t0 + self.cfg.intra_timeout_s, EventKind.SWEEP_START, iteration=iteration)
        self._push(t0 + self.cfg.intra_timeout_s + SWEEP_WINDOW_S, EventKind.INTER_TRANSFER, iteration=iteration)
        self._push(t0 + span, EventKind.REFORM, iteration=iteration)


def run_simulation(config: RunConfig | None = None) -> RunResult:
    return Simulation(config or RunConfig()).run()
