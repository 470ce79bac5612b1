"""
Centralized cluster formation, step by step
===========================================

The sink picks the highest-energy node as the first head, then grows
the head set by taking whichever uncovered node lies farthest from the
heads chosen so far. Everyone else joins the smallest nearby cluster,
and nodes out of range of every head fall back to reporting flat.
"""

import json

from esrpsim import (
    SINK_ID,
    FieldSpec,
    Position,
    SecurityStatus,
    TriState,
    deploy,
    form_clusters,
    reform_clusters,
)

field = FieldSpec(width=300.0, height=300.0, radio_range=60.0)
records = deploy(field, n_nodes=30, initial_energy_j=2.0, seed=11,
                 sink_pos=Position(150.0, 150.0))

plan = form_clusters(records, k=4, radio_range=60.0)
print("heads     :", plan.ch_ids())
for cluster in plan.clusters:
    up = "sink" if cluster.upstream_id == SINK_ID else f"head {cluster.upstream_id}"
    print(f"  head {cluster.ch_id:3d} -> {up:8s} members {sorted(cluster.members)}")
print("flat      :", sorted(plan.flat))
print()

# flag two heads as caught misbehaving and rebuild; the plan drops them
# and their members get reassigned
statuses = {nid: SecurityStatus() for nid in records if nid != SINK_ID}
bad = plan.ch_ids()[:2]
for nid in bad:
    statuses[nid].promiscuous = TriState.FAIL

plan2 = reform_clusters(plan, records, statuses, k=4, radio_range=60.0)
print("dropped   :", bad)
print("new heads :", plan2.ch_ids())
print("epoch     :", plan.epoch, "->", plan2.epoch)
print()

# the plan serializes for the CLI and the manifest
print(json.dumps(plan2.as_dict(), indent=2)[:400], "...")
