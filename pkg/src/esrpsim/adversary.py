"""Attack profiles and seeded attacker placement."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError


class AttackKind(Enum):
    COMPROMISED = "compromised"
    SELECTIVE_FORWARD = "selective_forward"
    BLACK_HOLE = "black_hole"
    SELF_INTRUDER = "self_intruder"


@dataclass(frozen=True)
class AttackProfile:
    kind: AttackKind
    activation_s: float = 0.0
    drop_prob: float = 0.5
    wrong_secret: int | None = None

    def __post_init__(self) -> None:
        if self.activation_s < 0:
            raise ConfigError("activation time cannot be negative")
        if not 0.0 <= self.drop_prob <= 1.0:
            raise ConfigError(f"drop probability {self.drop_prob} outside [0, 1]")
        if self.wrong_secret is not None and not 0 <= self.wrong_secret <= 255:
            raise ConfigError("wrong_secret must fit one byte")

    def active(self, t: float) -> bool:
        return t >= self.activation_s


DEFAULT_MIX = {
    AttackKind.COMPROMISED: 1.0,
    AttackKind.SELECTIVE_FORWARD: 1.0,
    AttackKind.BLACK_HOLE: 1.0,
    AttackKind.SELF_INTRUDER: 1.0,
}


def build_attack_set(
    node_ids: list[int] | set[int],
    count: int,
    rng: random.Random,
    mix: dict[AttackKind, float] | None = None,
    activation_s: float = 0.0,
) -> dict[int, AttackProfile]:
    """Pick `count` distinct attacker nodes and draw a profile for each."""
    ids = sorted(node_ids)
    if count < 0:
        raise ConfigError("attacker count cannot be negative")
    if count > len(ids):
        raise ConfigError(f"cannot place {count} attackers on {len(ids)} nodes")
    mix = dict(mix or DEFAULT_MIX)
    if any(w < 0 for w in mix.values()) or sum(mix.values()) <= 0:
        raise ConfigError("attack mix weights must be non-negative and not all zero")

    kinds = sorted(mix, key=lambda k: k.value)
    weights = [mix[k] for k in kinds]
    chosen = rng.sample(ids, count)
    out: dict[int, AttackProfile] = {}
    for nid in sorted(chosen):
        kind = rng.choices(kinds, weights=weights)[0]
        wrong = rng.randrange(256) if kind is AttackKind.COMPROMISED else None
        out[nid] = AttackProfile(kind, activation_s, wrong_secret=wrong)
    return out
