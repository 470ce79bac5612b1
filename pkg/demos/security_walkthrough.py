"""
The four gates on the forwarding path
=====================================

A head proves its identity with a squared-residue challenge before its
frames are accepted, neighbors listen for dropped relays, heads sweep
their members for silent squatters, and idle heads spawn decoy traffic
so a listener cannot tell which routes are real.
"""

import random

from esrpsim import (
    AttackKind,
    AttackProfile,
    RunConfig,
    SecurityStatus,
    Verdict,
    mzkp_answer,
    mzkp_adjudicate,
    mzkp_challenge,
    promiscuous_audit,
    run_simulation,
)

# --- identity proof ----------------------------------------------------
# keys: secret s, public modulus n; the verifier sends a challenge q and
# the prover answers q * s^2 mod n, which the sink checks without s ever
# leaving the node

s, n = 7, 11
rng = random.Random(3)
q = mzkp_challenge(rng, n)
answer = mzkp_answer(s, n, q)
print(f"s={s} n={n} q={q} -> answer {answer}")
print("honest prover :", mzkp_adjudicate(s, n, q, answer))

# an impostor who guessed s'=5 fails unless s'^2 happens to match s^2 mod n
fake = mzkp_answer(5, n, q)
print("impostor      :", mzkp_adjudicate(s, n, q, fake))

# silence is treated the same as a wrong answer
print("silent prover :", mzkp_adjudicate(s, n, q, None))
print()

# --- overheard acknowledgements ----------------------------------------
# each relayed frame should produce an ack from the next hop; one miss
# flags the neighbor and the flag is sticky until the next epoch

status = SecurityStatus()
promiscuous_audit(status, ack_heard=True)
print("after ack     :", status.promiscuous)
promiscuous_audit(status, ack_heard=False)
promiscuous_audit(status, ack_heard=True)
print("after a miss  :", status.promiscuous)
print()

# --- the whole pipeline under attack -------------------------------------
# drop a black-hole head into a three-cluster chain; its upstream audit
# fails on the first forwarding round and the next reformation drops it

cfg = RunConfig(
    field_width=120.0, field_height=700.0, radio_range=50.0,
    sink_x=60.0, sink_y=10.0,
    nodes=[
        (0, 60.0, 100.0, 3.0), (1, 60.0, 95.0, 2.0), (2, 65.0, 95.0, 2.0),
        (3, 60.0, 300.0, 3.0), (4, 60.0, 295.0, 2.0), (5, 65.0, 295.0, 2.0),
        (6, 60.0, 500.0, 3.0), (7, 60.0, 495.0, 2.0), (8, 65.0, 495.0, 2.0),
    ],
    k_clusters=3, iterations=3, horizon_s=36.0,
    attack_count=0, attack_nodes={3: AttackProfile(AttackKind.BLACK_HOLE)},
    seed=2,
)
res = run_simulation(cfg)
for entry in res.security_log:
    print({k: v for k, v in entry.items() if k != "t"})
print()
print("blocked at    :", res.blocked_at)
through = [row.delivered_frames for row in res.metrics.rows]
print("frames through per iteration:",
      [b - a for a, b in zip([0] + through, through)])
