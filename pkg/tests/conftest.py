import logging

import pytest

from esrpsim import RunConfig


def blob_nodes(m, n, spacing=220.0, head_energy=3.0, member_energy=2.0):
    """m well-separated blobs of n nodes; node 0 of each blob has the most
    energy so it becomes that region's head. Every blob fits inside one
    radio range and no blob reaches another."""
    nodes = []
    nid = 0
    for b in range(m):
        bx = (b % 3) * spacing + 30.0
        by = (b // 3) * spacing + 30.0
        for j in range(n):
            energy = head_energy if j == 0 else member_energy
            nodes.append((nid, bx + (j % 5) * 8.0, by + (j // 5) * 8.0, energy))
            nid += 1
    return nodes


def blob_config(m, n, **overrides):
    side = 3 * 220.0 + 100.0
    defaults = dict(
        field_width=side,
        field_height=side,
        radio_range=50.0,
        nodes=blob_nodes(m, n),
        k_clusters=m,
        iterations=3,
        horizon_s=60.0,
        reformation_period=0,
        security_enabled=False,
        attack_count=0,
        seed=5,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


@pytest.fixture(autouse=True)
def _quiet_formation_warnings():
    logger = logging.getLogger("esrpsim.clustering")
    before = logger.level
    logger.setLevel(logging.ERROR)
    yield
    logger.setLevel(before)
