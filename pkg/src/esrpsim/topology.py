"""Field geometry, node records, deployment and unit-disk neighbor queries."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum, IntEnum

from .errors import ConfigError, UnknownNodeError

# The sink is a mains-powered root and owns the top of the 1-byte id space.
SINK_ID = 255
MAX_SENSOR_COUNT = 255


class Role(Enum):
    SINK = "sink"
    CH = "ch"
    CM = "cm"
    FLAT = "flat"
    DEAD = "dead"
    BLOCKED = "blocked"


class TriState(IntEnum):
    UNKNOWN = 0
    PASS = 1
    FAIL = 2


@dataclass
class SecurityStatus:
    """Sink-side view of one node: identity check, overheard acks, sweep."""

    mzkp: TriState = TriState.UNKNOWN
    promiscuous: TriState = TriState.UNKNOWN
    mine: TriState = TriState.UNKNOWN

    def any_fail(self) -> bool:
        return TriState.FAIL in (self.mzkp, self.promiscuous, self.mine)

    def reset(self) -> None:
        self.mzkp = TriState.UNKNOWN
        self.promiscuous = TriState.UNKNOWN
        self.mine = TriState.UNKNOWN


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.dist((self.x, self.y), (other.x, other.y))


@dataclass(frozen=True)
class FieldSpec:
    width: float
    height: float
    radio_range: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ConfigError(f"field must have positive area, got {self.width}x{self.height}")
        if self.radio_range <= 0:
            raise ConfigError(f"radio range must be positive, got {self.radio_range}")

    def center(self) -> Position:
        return Position(self.width / 2, self.height / 2)


@dataclass
class NodeRecord:
    node_id: int
    pos: Position
    initial_energy_j: float
    residual_j: float = -1.0
    role: Role = Role.CM
    status: SecurityStatus = field(default_factory=SecurityStatus)
    attack: object | None = None  # adversary.AttackProfile when assigned

    def __post_init__(self) -> None:
        if not 0 <= self.node_id <= SINK_ID:
            raise ConfigError(f"node id {self.node_id} outside 0..{SINK_ID}")
        if self.initial_energy_j < 0:
            raise ConfigError(f"node {self.node_id}: negative initial energy")
        if self.residual_j < 0:
            self.residual_j = self.initial_energy_j

    @property
    def alive(self) -> bool:
        return self.role is not Role.DEAD and self.residual_j > 0


def distance(a: NodeRecord | Position, b: NodeRecord | Position) -> float:
    pa = a.pos if isinstance(a, NodeRecord) else a
    pb = b.pos if isinstance(b, NodeRecord) else b
    return pa.distance_to(pb)


def deploy(
    spec: FieldSpec,
    n_nodes: int,
    initial_energy_j: float,
    seed: int,
    placement: str = "random",
    sink_pos: Position | None = None,
) -> dict[int, NodeRecord]:
    """Place n_nodes sensors plus the sink; identical seed, identical layout.

    placement="random" draws i.i.d. uniform positions from a dedicated stream;
    "grid" lays nodes row-major on a ceil(sqrt(n)) lattice with equal margins.
    """
    if n_nodes < 1:
        raise ConfigError("need at least one sensor node")
    if n_nodes > MAX_SENSOR_COUNT:
        raise ConfigError(f"{n_nodes} nodes exceed the {MAX_SENSOR_COUNT}-id space (sink holds {SINK_ID})")
    if initial_energy_j <= 0:
        raise ConfigError("initial energy must be positive")

    records: dict[int, NodeRecord] = {}
    if placement == "random":
        rng = random.Random(f"{seed}/deploy")
        for nid in range(n_nodes):
            pos = Position(rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height))
            records[nid] = NodeRecord(nid, pos, initial_energy_j)
    elif placement == "grid":
        cols = math.ceil(math.sqrt(n_nodes))
        rows = math.ceil(n_nodes / cols)
        for nid in range(n_nodes):
            r, c = divmod(nid, cols)
            pos = Position((c + 1) * spec.width / (cols + 1), (r + 1) * spec.height / (rows + 1))
            records[nid] = NodeRecord(nid, pos, initial_energy_j)
    else:
        raise ConfigError(f"unknown placement {placement!r}")

    sink = NodeRecord(SINK_ID, sink_pos or spec.center(), 0.0, role=Role.SINK)
    records[SINK_ID] = sink
    return records


def neighbors(node_id: int, records: dict[int, NodeRecord], radio_range: float) -> set[int]:
    """Ids within radio_range of node_id (boundary inclusive), excluding the
    node itself and any Dead or Blocked record."""
    if node_id not in records:
        raise UnknownNodeError(f"node {node_id} not deployed")
    me = records[node_id]
    if me.role in (Role.DEAD, Role.BLOCKED):
        return set()
    out = set()
    for nid, rec in records.items():
        if nid == node_id or rec.role in (Role.DEAD, Role.BLOCKED):
            continue
        if distance(me, rec) <= radio_range:
            out.add(nid)
    return out
