"""Security mechanisms: challenge-response identity checks between cluster
heads, promiscuous ack audits, decoy (trap) traffic, and the dummy-probe
sweep that exposes silent members.

The identity check is a modular challenge-response: the sink hands every
head a 1-byte secret s and publishes an odd modulus n; a verifier sends a
challenge q and the prover answers (s^2 * q) mod n. The sink, which knows
s, recomputes the answer and blocks the prover on mismatch. Moduli are
drawn from odd primes in [101, 251]: tiny or composite moduli make wrong
secrets collide with the right answer far too often to be useful.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum, IntFlag

from .clustering import ClusterPlan
from .errors import ConfigError
from .topology import NodeRecord, SecurityStatus, TriState, SINK_ID

PRIME_MODULI = (
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
    173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
)


class SecurityRole(IntFlag):
    NONE = 0
    PROVER = 1
    VERIFIER = 2
    PROVER_VERIFIER = 3


class Verdict(Enum):
    ACCEPT = "accept"
    BLOCK = "block"


@dataclass(frozen=True)
class KeyMaterial:
    secret_s: int
    public_n: int
    epoch: int


@dataclass(frozen=True)
class DummyPacket:
    origin: int
    ttl: int
    nonce: int


@dataclass
class SecurityAssignment:
    keys: dict[int, KeyMaterial]
    roles: dict[int, SecurityRole]
    public_n: int
    epoch: int


def _validate_modulus(public_n: int) -> None:
    if public_n < 3 or public_n % 2 == 0:
        raise ConfigError(f"modulus must be odd and >= 3, got {public_n}")


def mzkp_answer(secret_s: int, public_n: int, challenge_q: int) -> int:
    """Prover's response (s^2 * q) mod n."""
    _validate_modulus(public_n)
    if not 0 <= secret_s <= 255:
        raise ConfigError(f"secret must fit one byte, got {secret_s}")
    if challenge_q < 1:
        raise ConfigError(f"challenge must be >= 1, got {challenge_q}")
    return (secret_s * secret_s % public_n) * challenge_q % public_n


def mzkp_challenge(rng: random.Random, public_n: int) -> int:
    """Fresh challenge in [1, n-1]; multiples of n would accept any secret."""
    _validate_modulus(public_n)
    return rng.randrange(1, public_n)


def mzkp_adjudicate(secret_s: int, public_n: int, challenge_q: int, answer: int | None) -> Verdict:
    """Sink-side comparison against the registered secret. A missing answer
    (silent prover) is a failure."""
    if answer is None:
        return Verdict.BLOCK
    expected = mzkp_answer(secret_s, public_n, challenge_q)
    return Verdict.ACCEPT if answer == expected else Verdict.BLOCK


def issue_keys_and_roles(
    plan: ClusterPlan,
    records: dict[int, NodeRecord],
    rng: random.Random,
    *,
    role_threshold_fraction: float = 0.25,
    previous: SecurityAssignment | None = None,
) -> SecurityAssignment:
    """Draw fresh keys and assign prover/verifier roles for one epoch.

    Every head proves to its upstream (the sink challenges top-level heads
    itself); a head verifies when other heads forward through it. Roles are
    granted only above the residual-energy threshold. A freshly drawn key
    equal to last epoch's is nudged so consecutive epochs never share keys.
    """
    public_n = PRIME_MODULI[rng.randrange(len(PRIME_MODULI))]
    if previous is not None and public_n == previous.public_n:
        public_n = PRIME_MODULI[(PRIME_MODULI.index(public_n) + 1) % len(PRIME_MODULI)]
    epoch = max(plan.epoch, previous.epoch + 1) if previous is not None else plan.epoch

    has_downstream = {c.upstream_id for c in plan.clusters if c.upstream_id != SINK_ID}
    keys: dict[int, KeyMaterial] = {}
    roles: dict[int, SecurityRole] = {}
    for cluster in plan.clusters:
        ch = cluster.ch_id
        secret = rng.randrange(256)
        if previous is not None and ch in previous.keys and secret == previous.keys[ch].secret_s:
            secret = (secret + 1) % 256
        keys[ch] = KeyMaterial(secret, public_n, epoch)

        rec = records[ch]
        role = SecurityRole.NONE
        if rec.residual_j > role_threshold_fraction * rec.initial_energy_j:
            role |= SecurityRole.PROVER
            if ch in has_downstream:
                role |= SecurityRole.VERIFIER
        roles[ch] = role
    return SecurityAssignment(keys, roles, public_n, epoch)


def promiscuous_audit(status: SecurityStatus, ack_heard: bool) -> TriState:
    """Record the outcome of one overheard-ack audit; failures stick."""
    if not ack_heard:
        status.promiscuous = TriState.FAIL
    elif status.promiscuous is not TriState.FAIL:
        status.promiscuous = TriState.PASS
    return status.promiscuous


def spawn_dummy_traffic(origin: int, ttl: int, rng: random.Random) -> DummyPacket:
    """Decoy packet routed away from the sink to confuse traffic analysis."""
    if ttl < 1:
        raise ConfigError(f"dummy ttl must be >= 1, got {ttl}")
    return DummyPacket(origin, ttl, rng.randrange(256))


def mine_detection_sweep(member_ids: set[int] | list[int], acked_ids: set[int]) -> set[int]:
    """Members that stayed silent after the dummy probe."""
    return {nid for nid in member_ids if nid not in acked_ids}
