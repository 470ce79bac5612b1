import random

import pytest

from esrpsim import (
    AttackKind,
    AttackProfile,
    ConfigError,
    EventKind,
    Role,
    RunConfig,
    SINK_ID,
    Simulation,
    check_termination,
    hop_delay,
    run_simulation,
)
from esrpsim.topology import NodeRecord, Position

from conftest import blob_nodes


def chain_nodes():
    """Three clusters strung away from the sink at (60, 10): heads 0, 3, 6
    with two members each sitting sink-side of their head, so the heads are
    both the highest-energy and the most spread-out picks; upstream chain
    6 -> 3 -> 0 -> sink."""
    return [
        (0, 60.0, 100.0, 3.0), (1, 60.0, 95.0, 2.0), (2, 65.0, 95.0, 2.0),
        (3, 60.0, 300.0, 3.0), (4, 60.0, 295.0, 2.0), (5, 65.0, 295.0, 2.0),
        (6, 60.0, 500.0, 3.0), (7, 60.0, 495.0, 2.0), (8, 65.0, 495.0, 2.0),
    ]


def chain_config(**overrides):
    defaults = dict(
        field_width=120.0, field_height=700.0, radio_range=50.0,
        sink_x=60.0, sink_y=10.0, nodes=chain_nodes(), k_clusters=3,
        iterations=4, horizon_s=48.0, reformation_period=1,
        security_enabled=True, attack_count=0, seed=2,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


def per_iteration(rows, field):
    out, prev = [], 0
    for r in rows:
        cur = getattr(r, field)
        out.append(cur - prev)
        prev = cur
    return out


def test_hop_delay_worked_value():
    assert hop_delay(1000, 2_000_000.0) == pytest.approx(0.5e-3, rel=1e-12)
    assert hop_delay(1000, 2_000_000.0, 0.001) == pytest.approx(1.5e-3, rel=1e-12)
    with pytest.raises(ConfigError):
        hop_delay(0, 1e6)


def test_micro_run_one_report_per_iteration():
    # one head, one member: each iteration exactly one reading reaches the sink
    cfg = RunConfig(
        field_width=100, field_height=100, radio_range=50,
        nodes=[(0, 45.0, 45.0, 3.0), (1, 50.0, 45.0, 2.0)],
        k_clusters=1, iterations=5, horizon_s=60.0, reformation_period=0,
        security_enabled=False, attack_count=0, seed=1,
    )
    res = run_simulation(cfg)
    rows = res.metrics.rows
    assert per_iteration(rows, "delivered_reports") == [1] * 5
    assert per_iteration(rows, "delivered_frames") == [1] * 5
    assert res.metrics.terminated_early is False


def test_upstream_chain_and_depth_order():
    res = run_simulation(chain_config())
    up = res.plans[0].upstream_map()
    assert up == {0: SINK_ID, 3: 0, 6: 3}
    # a relayed frame takes member->head->head->head->sink = 4 hops => 2 ms
    assert res.metrics.rows[0].delay_ms == pytest.approx(4 * 0.5)


def test_relay_counters_separate_from_deliveries():
    res = run_simulation(chain_config(security_enabled=False))
    row = res.metrics.rows[0]
    # far frame relays twice, mid frame once: 3 relay hops per iteration
    assert row.packets_by_category["relay"] == 3
    # all three frames surface at the sink
    assert per_iteration(res.metrics.rows, "delivered_frames") == [3, 3, 3, 3]


def test_black_hole_head_swallows_and_is_blocked_at_reformation():
    cfg = chain_config(
        attack_nodes={3: AttackProfile(AttackKind.BLACK_HOLE)},
    )
    res = run_simulation(cfg)
    # iteration 0: only the near head's frame arrives (mid swallows its own
    # and the far head's traffic); afterwards the mid head is quarantined
    # and its members re-cluster, restoring three frames per iteration
    assert per_iteration(res.metrics.rows, "delivered_frames") == [1, 3, 3, 3]
    assert res.blocked_at[3] == pytest.approx(12.0)
    reasons = {e["node"]: e["reason"] for e in res.security_log if e["event"] == "block"}
    assert reasons[3] == "reformation"
    assert res.records[3].role is Role.BLOCKED
    assert 3 not in res.plans[-1].clustered_ids()


def test_black_hole_not_detected_with_security_off():
    cfg = chain_config(
        security_enabled=False,
        attack_nodes={3: AttackProfile(AttackKind.BLACK_HOLE)},
    )
    res = run_simulation(cfg)
    # losses persist: nobody audits, nobody blocks
    assert res.blocked_at == {}
    assert per_iteration(res.metrics.rows, "delivered_frames") == [1, 1, 1, 1]


def test_compromised_head_blocked_at_first_adjudication():
    cfg = chain_config(
        attack_nodes={6: AttackProfile(AttackKind.COMPROMISED, wrong_secret=77)},
    )
    res = run_simulation(cfg)
    assert 6 in res.blocked_at
    assert 0 < res.blocked_at[6] < 12.0  # inside iteration 0's forwarding phase
    reasons = {e["node"]: e["reason"] for e in res.security_log if e["event"] == "block"}
    assert reasons[6] == "mzkp"
    # its own frame is lost that iteration; the chain recovers after reform
    assert per_iteration(res.metrics.rows, "delivered_frames")[0] == 2
    assert per_iteration(res.metrics.rows, "delivered_frames")[-1] == 3


def test_selective_forwarder_audited_and_blocked():
    cfg = chain_config(
        attack_nodes={3: AttackProfile(AttackKind.SELECTIVE_FORWARD, drop_prob=1.0)},
    )
    res = run_simulation(cfg)
    # drops every relayed frame but still sends its own: 2 deliveries, then
    # the missing acks pin it and reformation quarantines it
    assert per_iteration(res.metrics.rows, "delivered_frames") == [2, 3, 3, 3]
    assert res.blocked_at[3] == pytest.approx(12.0)
    fails = [e for e in res.security_log if e["event"] == "audit_fail"]
    assert any(e["verifier"] == 3 for e in fails)


def test_self_intruder_flagged_by_sweep_then_blocked():
    cfg = chain_config(
        attack_nodes={4: AttackProfile(AttackKind.SELF_INTRUDER)},
    )
    res = run_simulation(cfg)
    flags = [e for e in res.security_log if e["event"] == "mine_flag"]
    assert any(e["node"] == 4 for e in flags)
    assert res.blocked_at[4] == pytest.approx(12.0)
    assert res.records[4].role is Role.BLOCKED


def test_attacker_inert_before_activation():
    cfg = chain_config(
        attack_nodes={3: AttackProfile(AttackKind.BLACK_HOLE, activation_s=1e9)},
    )
    res = run_simulation(cfg)
    assert res.blocked_at == {}
    assert per_iteration(res.metrics.rows, "delivered_frames") == [3, 3, 3, 3]


def test_blocked_node_is_silent_afterwards():
    cfg = chain_config(
        attack_nodes={3: AttackProfile(AttackKind.BLACK_HOLE)},
    )
    res = run_simulation(cfg)
    t_block = res.blocked_at[3]
    after = [ev for ev in res.trace if ev.time > t_block and 3 in (ev.src, ev.dst)]
    assert after == []


def test_quorum_shortfall_defers_aggregation_to_timeout():
    # member 3 dies receiving its poll, so a full quorum never arrives
    cfg = RunConfig(
        field_width=100, field_height=100, radio_range=50,
        nodes=[(0, 50, 50, 3.0), (1, 55, 50, 2.0), (2, 45, 50, 2.0), (3, 50, 55, 1e-6)],
        k_clusters=1, iterations=1, horizon_s=12.0, reformation_period=0,
        quorum_fraction=1.0, security_enabled=False, attack_count=0, seed=1,
    )
    res = run_simulation(cfg)
    agg = [ev for ev in res.trace if ev.kind is EventKind.AGGREGATE]
    assert len(agg) == 1
    assert agg[0].time == pytest.approx(5.0)  # the collection timeout
    assert agg[0].info["reports"] == 2
    assert res.metrics.rows[0].delivered_reports == 2


def test_aggregation_at_last_slot_when_quorum_met():
    cfg = RunConfig(
        field_width=100, field_height=100, radio_range=50,
        nodes=[(0, 50, 50, 3.0), (1, 55, 50, 2.0), (2, 45, 50, 2.0)],
        k_clusters=1, iterations=1, horizon_s=12.0, reformation_period=0,
        security_enabled=False, attack_count=0, seed=1,
    )
    res = run_simulation(cfg)
    agg = next(ev for ev in res.trace if ev.kind is EventKind.AGGREGATE)
    ds, dd = 64 / 2e6, 1000 / 2e6
    assert agg.time == pytest.approx(ds + 2 * dd)


def test_duplicate_readings_suppressed_in_aggregate():
    # 29 one-byte readings collide often; the frame keeps uniques only
    nodes = [(0, 50.0, 50.0, 3.0)]
    nodes += [(j, 32.0 + ((j - 1) % 6) * 6, 38.0 + ((j - 1) // 6) * 6, 2.0)
              for j in range(1, 30)]
    cfg = RunConfig(
        field_width=100, field_height=100, radio_range=50, nodes=nodes,
        k_clusters=1, iterations=2, horizon_s=24.0, reformation_period=0,
        security_enabled=False, attack_count=0, seed=12,
    )
    res = run_simulation(cfg)
    # replay the reading stream to predict the deduplicated frame sizes
    rng = random.Random("12/data")
    frame_sizes = []
    for _ in range(2):
        readings = [rng.randrange(256) for _ in range(29)]
        frame_sizes.append(13 + len(set(readings)))
    assert any(s < 13 + 29 for s in frame_sizes), "seed produced no duplicates"
    sig = 11
    # per iteration the sink side carries 3 signals plus the frame itself
    expect = [3 * sig + frame_sizes[0], 3 * sig + frame_sizes[1]]
    got, prev = [], 0
    for row in res.metrics.rows:
        got.append(row.bytes_by_category["inter"] - prev)
        prev = row.bytes_by_category["inter"]
    assert got == expect


def test_flat_nodes_report_directly():
    nodes = blob_nodes(1, 4) + [(90, 620.0, 620.0, 2.0)]
    cfg = RunConfig(
        field_width=760, field_height=760, radio_range=50, nodes=nodes,
        k_clusters=1, iterations=3, horizon_s=60.0, reformation_period=0,
        security_enabled=False, attack_count=0, seed=6,
    )
    res = run_simulation(cfg)
    assert 90 in res.plans[0].flat
    assert res.records[90].role is Role.FLAT
    assert per_iteration(res.metrics.rows, "delivered_reports") == [4, 4, 4]
    assert res.metrics.rows[0].packets_by_category["flat"] == 1


def test_head_death_loses_frame_and_cluster_reforms():
    # the richest node wins the head role but sits 70 m from the sink; the
    # 490 uJ amplifier bill for its frame overdraws the 1.2 mJ battery, so
    # the frame dies in flight and the sink-side members take over next round
    nodes = [(0, 50.0, 120.0, 1.2e-3), (1, 50.0, 71.0, 1.19e-3), (2, 55.0, 71.0, 1.19e-3)]
    cfg = RunConfig(
        field_width=100, field_height=130, radio_range=50, sink_x=50.0, sink_y=50.0,
        nodes=nodes, k_clusters=1, iterations=2, horizon_s=14.0, reformation_period=1,
        security_enabled=False, attack_count=0, seed=3,
        flat_threshold_j=0.0, termination_threshold_j=0.0,
    )
    res = run_simulation(cfg)
    assert res.records[0].role is Role.DEAD
    # iteration 0 delivers nothing; the survivors re-form and deliver after
    frames = per_iteration(res.metrics.rows, "delivered_frames")
    assert frames[0] == 0
    assert frames[1] == 1
    assert res.plans[1].ch_ids() == [1]
    assert res.ledger.conservation_holds()
    assert res.ledger.residual_fj(0) == 0


def test_reformation_period_controls_plan_history():
    assert len(run_simulation(chain_config(reformation_period=0)).plans) == 1
    assert len(run_simulation(chain_config(reformation_period=1)).plans) == 5
    assert len(run_simulation(chain_config(reformation_period=2)).plans) == 3


def test_keys_rotate_between_epochs():
    res = run_simulation(chain_config(reformation_period=1))
    epochs = [e["epoch"] for e in res.security_log if e["event"] == "challenge"]
    assert len(set(epochs)) > 1


def test_termination_at_first_failing_check():
    # 17 of 20 sensors start a hair above threshold and dip during iteration 1
    nodes = [(0, 50.0, 50.0, 3.0), (1, 55.0, 50.0, 2.0), (2, 45.0, 50.0, 2.0)]
    nodes += [(i, 50.0 + (i % 5), 40.0 + i // 5, 0.50005) for i in range(3, 20)]
    base = dict(
        field_width=100, field_height=100, radio_range=50, nodes=nodes,
        k_clusters=1, iterations=4, horizon_s=40.0, reformation_period=0,
        security_enabled=True, attack_count=0, seed=9,
    )
    res = run_simulation(RunConfig(**base))
    assert res.metrics.terminated_early is True
    assert res.metrics.terminated_at_iteration == 1
    assert len(res.metrics.rows) == 1

    # with one more wealthy node only 80% dip: the run goes the distance
    nodes_b = list(nodes)
    nodes_b[3] = (3, 50.0 + 3 % 5, 41.0, 2.0)
    res_b = run_simulation(RunConfig(**{**base, "nodes": nodes_b}))
    assert res_b.metrics.terminated_early is False
    assert len(res_b.metrics.rows) == 4


def test_termination_check_at_start_gives_zero_iterations():
    nodes = [(i, 40.0 + i, 50.0, 0.4) for i in range(10)]
    cfg = RunConfig(
        field_width=100, field_height=100, radio_range=50, nodes=nodes,
        k_clusters=1, iterations=5, horizon_s=60.0,
        security_enabled=False, attack_count=0, seed=1,
    )
    res = run_simulation(cfg)
    assert res.metrics.terminated_at_iteration == 0
    assert res.metrics.rows == []
    assert any(ev.kind is EventKind.TERMINATE for ev in res.trace)


def test_check_termination_fraction_boundary():
    def records_with(poor, rich):
        recs = {}
        for i in range(poor):
            recs[i] = NodeRecord(i, Position(0, 0), 1.0)
            recs[i].residual_j = 0.3
        for i in range(poor, poor + rich):
            recs[i] = NodeRecord(i, Position(0, 0), 1.0)
        recs[SINK_ID] = NodeRecord(SINK_ID, Position(0, 0), 0.0, role=Role.SINK)
        return recs

    assert check_termination(records_with(85, 15)) is True
    assert check_termination(records_with(84, 16)) is False


def test_run_is_reproducible_and_seed_sensitive():
    a = run_simulation(RunConfig(seed=21))
    b = run_simulation(RunConfig(seed=21))
    c = run_simulation(RunConfig(seed=22))
    assert a.metrics.csv_text() == b.metrics.csv_text()
    assert a.metrics.summary_json() == b.metrics.summary_json()
    assert {n: a.ledger.residual_fj(n) for n in a.ledger.node_ids()} == \
        {n: b.ledger.residual_fj(n) for n in b.ledger.node_ids()}
    assert a.metrics.csv_text() != c.metrics.csv_text()


def test_ledger_conserves_and_energy_monotone():
    res = run_simulation(chain_config(attack_count=0))
    assert res.ledger.conservation_holds()
    energies = [r.energy_j for r in res.metrics.rows]
    assert energies == sorted(energies)
    for nid in res.ledger.node_ids():
        assert res.ledger.residual_fj(nid) >= 0


def test_simulation_runs_once_only():
    sim = Simulation(chain_config())
    sim.run()
    with pytest.raises(ConfigError):
        sim.run()


def test_config_rejects_unworkable_windows():
    with pytest.raises(ConfigError):
        RunConfig(horizon_s=10.0, iterations=5)  # 2 s spans cannot fit phases
    with pytest.raises(ConfigError):
        RunConfig(reformation_period=-1)
    with pytest.raises(ConfigError):
        RunConfig(quorum_fraction=0.0)


def test_explicit_node_table_validation():
    with pytest.raises(ConfigError):
        run_simulation(RunConfig(nodes=[(1, 0, 0, 1.0), (1, 5, 5, 1.0)], attack_count=0))
    with pytest.raises(ConfigError):
        run_simulation(RunConfig(nodes=[(255, 0, 0, 1.0)], attack_count=0))
    with pytest.raises(ConfigError):
        run_simulation(RunConfig(nodes=[], attack_count=0))


def test_trace_is_time_sorted_and_deterministic():
    res = run_simulation(chain_config())
    times = [ev.time for ev in res.trace]
    assert times == sorted(times)
