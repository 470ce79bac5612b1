"""Centralized cluster formation, membership assignment and reformation.

The sink picks the first cluster head as the highest-energy node it can
reach. Each further head is the node, not yet covered by any head's radio
range, that maximizes (distance to the nearest existing head, residual
energy, lowest id) lexicographically, which spreads heads across the field.
Non-head nodes within range of exactly one head join it; nodes covered by
several heads are balanced by (cluster size, distance, head id); nodes
covered by none fall back to flat routing. Every head forwards to the
nearest head strictly closer to the sink, or straight to the sink, so
upstream links can never form a cycle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .errors import FormationError
from .topology import NodeRecord, Role, SecurityStatus, SINK_ID, distance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cluster:
    ch_id: int
    members: tuple[int, ...]
    upstream_id: int

    def node_ids(self) -> set[int]:
        return {self.ch_id, *self.members}

    @property
    def size(self) -> int:
        return 1 + len(self.members)


@dataclass
class ClusterPlan:
    clusters: list[Cluster]
    flat: set[int] = field(default_factory=set)
    epoch: int = 0

    def ch_ids(self) -> list[int]:
        return [c.ch_id for c in self.clusters]

    def cluster_of(self, node_id: int) -> Cluster | None:
        for c in self.clusters:
            if node_id in c.node_ids():
                return c
        return None

    def clustered_ids(self) -> set[int]:
        out: set[int] = set()
        for c in self.clusters:
            out |= c.node_ids()
        return out

    def upstream_map(self) -> dict[int, int]:
        return {c.ch_id: c.upstream_id for c in self.clusters}

    def as_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "clusters": [
                {"ch_id": c.ch_id, "members": sorted(c.members), "upstream_id": c.upstream_id}
                for c in self.clusters
            ],
            "flat": sorted(self.flat),
        }


def _eligible_sensors(records: dict[int, NodeRecord], eligible: set[int] | None) -> list[NodeRecord]:
    out = []
    for nid in sorted(records):
        rec = records[nid]
        if rec.role in (Role.SINK, Role.DEAD, Role.BLOCKED, Role.FLAT):
            continue
        if rec.residual_j <= 0:
            continue
        if eligible is not None and nid not in eligible:
            continue
        out.append(rec)
    return out


def assign_common_nodes(
    common: dict[int, list[int]],
    records: dict[int, NodeRecord],
    sizes: dict[int, int],
) -> dict[int, int]:
    """Assign nodes covered by several heads; smallest cluster wins, then
    distance, then lowest head id. Sizes update as assignments are made."""
    sizes = dict(sizes)
    assignment: dict[int, int] = {}
    for nid in sorted(common):
        choices = sorted(
            common[nid],
            key=lambda ch: (sizes[ch], distance(records[nid], records[ch]), ch),
        )
        chosen = choices[0]
        assignment[nid] = chosen
        sizes[chosen] += 1
    return assignment


def form_clusters(
    records: dict[int, NodeRecord],
    sink_id: int = SINK_ID,
    k: int = 5,
    radio_range: float = 50.0,
    *,
    sink_range: float | None = None,
    eligible: set[int] | None = None,
    epoch: int = 0,
) -> ClusterPlan:
    """Build a plan with up to k clusters over the eligible live sensors.

    Degrades to fewer clusters (with a warning) when eligible nodes run out
    or every remaining node is already covered by a chosen head.
    """
    if k < 1:
        raise FormationError(f"cluster count must be >= 1, got {k}")
    sink = records[sink_id]
    candidates = _eligible_sensors(records, eligible)
    if not candidates:
        raise FormationError("no live eligible node to cluster")

    in_sink_range = [
        r for r in candidates
        if sink_range is None or distance(r, sink) <= sink_range
    ]
    if not in_sink_range:
        raise FormationError("no node within the sink's radio range")

    first = sorted(in_sink_range, key=lambda r: (-r.residual_j, r.node_id))[0]
    chs: list[NodeRecord] = [first]
    ch_chosen = {first.node_id}

    while len(chs) < k:
        uncovered = [
            r for r in candidates
            if r.node_id not in ch_chosen
            and all(distance(r, ch) > radio_range for ch in chs)
        ]
        if not uncovered:
            log.warning("cluster formation exhausted candidates at %d of %d heads", len(chs), k)
            break
        best = sorted(
            uncovered,
            key=lambda r: (-min(distance(r, ch) for ch in chs), -r.residual_j, r.node_id),
        )[0]
        chs.append(best)
        ch_chosen.add(best.node_id)

    ch_ids = [c.node_id for c in chs]
    single: dict[int, int] = {}
    common: dict[int, list[int]] = {}
    flat: set[int] = set()
    for rec in candidates:
        if rec.node_id in ch_ids:
            continue
        covering = [ch.node_id for ch in chs if distance(rec, ch) <= radio_range]
        if not covering:
            flat.add(rec.node_id)
        elif len(covering) == 1:
            single[rec.node_id] = covering[0]
        else:
            common[rec.node_id] = covering

    members: dict[int, list[int]] = {cid: [] for cid in ch_ids}
    for nid, cid in single.items():
        members[cid].append(nid)
    sizes = {cid: 1 + len(ms) for cid, ms in members.items()}
    for nid, cid in assign_common_nodes(common, records, sizes).items():
        members[cid].append(nid)

    sink_dist = {cid: distance(records[cid], sink) for cid in ch_ids}
    clusters = []
    for cid in ch_ids:
        closer = [c2 for c2 in ch_ids if sink_dist[c2] < sink_dist[cid]]
        if closer:
            upstream = sorted(closer, key=lambda c2: (distance(records[cid], records[c2]), c2))[0]
        else:
            upstream = sink_id
        clusters.append(Cluster(cid, tuple(sorted(members[cid])), upstream))

    return ClusterPlan(clusters, flat, epoch)


def flat_region_check(
    node_ids: set[int] | list[int],
    records: dict[int, NodeRecord],
    threshold_j: float = 0.5,
) -> bool:
    """True when at least ceil(2/3 * |region|) nodes sit below threshold_j."""
    ids = [nid for nid in node_ids]
    if not ids:
        return False
    need = math.ceil(len(ids) * 2 / 3)
    low = sum(1 for nid in ids if records[nid].residual_j < threshold_j)
    return low >= need


def reform_clusters(
    plan: ClusterPlan,
    records: dict[int, NodeRecord],
    statuses: dict[int, SecurityStatus],
    sink_id: int = SINK_ID,
    k: int = 5,
    radio_range: float = 50.0,
    *,
    flat_threshold_j: float = 0.5,
    sink_range: float | None = None,
) -> ClusterPlan:
    """Rebuild the plan: drop flagged nodes, flat-route depleted regions,
    re-cluster the rest. Flat routing is sticky across reformations."""
    excluded: set[int] = set()
    for nid, status in statuses.items():
        if status.any_fail():
            excluded.add(nid)

    was_flat = plan.flat | {
        nid for nid, rec in records.items() if rec.role is Role.FLAT
    }
    sticky_flat = {
        nid for nid in was_flat
        if records[nid].alive and nid not in excluded
    }
    newly_flat: set[int] = set()
    for cluster in plan.clusters:
        survivors = {
            nid for nid in cluster.node_ids()
            if nid not in excluded and records[nid].alive
        }
        if survivors and flat_region_check(survivors, records, flat_threshold_j):
            newly_flat |= survivors

    flat = sticky_flat | newly_flat
    eligible = {
        nid for nid, rec in records.items()
        if rec.role not in (Role.SINK, Role.DEAD, Role.BLOCKED)
        and rec.alive and nid not in excluded and nid not in flat
    }
    if not eligible:
        return ClusterPlan([], flat, plan.epoch + 1)
    try:
        new_plan = form_clusters(
            records, sink_id, k, radio_range,
            sink_range=sink_range, eligible=eligible, epoch=plan.epoch + 1,
        )
    except FormationError:
        return ClusterPlan([], flat | eligible, plan.epoch + 1)
    new_plan.flat |= flat
    return new_plan
