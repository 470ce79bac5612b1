"""Run metrics: per-iteration series, summary percentages, and the
closed-form control-overhead counts used to compare routing schemes.

The percentage summary follows the published reporting conventions:
decrease figures are complements (100 - surviving share), delay is the
cumulative delay over the horizon, energy is spend over the deployed
budget, and overhead is bytes over a fixed per-scheme byte budget.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import ConfigError

OVERHEAD_CATEGORIES = ("formation", "intra", "inter", "relay", "security", "flat")
DEFAULT_OVERHEAD_BUDGET_BYTES = 650


def esrp_overhead(m: int, n: int) -> tuple[int, int, int]:
    """(per-cluster intra, inter, total) control packets per collection round
    for m clusters of n nodes each."""
    if m < 1 or n < 1:
        raise ConfigError("need at least one cluster of one node")
    intra = 2 * (n - 1)
    inter = 2 + 2 * m
    return intra, inter, combine_overhead(m, intra, inter)


def ldts_overhead(m: int, n: int) -> tuple[int, int, int]:
    """Reference scheme for comparison: quadratic intra and inter terms."""
    if m < 1 or n < 1:
        raise ConfigError("need at least one cluster of one node")
    intra = 2 * (n - 2) * (n - 1) + 2 * n
    inter = 2 * (m - 1) ** 2 + 2 * m
    return intra, inter, combine_overhead(m, intra, inter)


def combine_overhead(m: int, intra: int, inter: int) -> int:
    """Total = per-cluster intra replicated over m clusters, plus inter."""
    return m * intra + inter


def survival_pct(alive_start: int, alive_end: int) -> float:
    if alive_start <= 0:
        raise ConfigError("baseline alive count must be positive")
    if alive_end < 0:
        raise ConfigError("alive count cannot be negative")
    return alive_end / alive_start * 100.0


def alive_decrease_pct(alive_start: int, alive_end: int) -> float:
    return 100.0 - survival_pct(alive_start, alive_end)


def delay_pct(total_delay_ms: float, horizon_s: float) -> float:
    if horizon_s <= 0:
        raise ConfigError("horizon must be positive")
    if total_delay_ms < 0:
        raise ConfigError("delay cannot be negative")
    return (total_delay_ms / 1000.0) / horizon_s * 100.0


def energy_pct(spent_j: float, budget_j: float) -> float:
    if budget_j <= 0:
        raise ConfigError("energy budget must be positive")
    if spent_j < 0:
        raise ConfigError("spent energy cannot be negative")
    return spent_j / budget_j * 100.0


def lifetime_decrease_pct(clusters_start: int, clusters_end: int) -> float:
    if clusters_start <= 0:
        raise ConfigError("baseline cluster count must be positive")
    if clusters_end < 0:
        raise ConfigError("cluster count cannot be negative")
    return 100.0 - clusters_end / clusters_start * 100.0


def clusters_retained_pct(clusters_start: int, clusters_end: int) -> float:
    return 100.0 - lifetime_decrease_pct(clusters_start, clusters_end)


def overhead_pct(overhead_bytes: float, budget_bytes: float = DEFAULT_OVERHEAD_BUDGET_BYTES) -> float:
    if budget_bytes <= 0:
        raise ConfigError("overhead budget must be positive")
    if overhead_bytes < 0:
        raise ConfigError("overhead cannot be negative")
    return overhead_bytes / budget_bytes * 100.0


@dataclass
class IterationRow:
    """State at the end of one iteration; energy/delay/overhead/delivery
    columns are cumulative since the start of the run."""

    iteration: int
    time_s: float
    alive: int
    clusters: int
    blocked: int
    flat: int
    delivered_frames: int
    delivered_reports: int
    energy_j: float
    delay_ms: float
    overhead_packets: int
    overhead_bytes: int
    packets_by_category: dict[str, int] = field(default_factory=dict)
    bytes_by_category: dict[str, int] = field(default_factory=dict)


CSV_COLUMNS = (
    ["kind", "iteration", "time_s", "alive", "clusters", "blocked", "flat",
     "delivered_frames", "delivered_reports", "energy_j", "delay_ms",
     "overhead_packets", "overhead_bytes"]
    + [f"packets_{c}" for c in OVERHEAD_CATEGORIES]
    + [f"bytes_{c}" for c in OVERHEAD_CATEGORIES]
    + ["alive_decrease_pct", "delay_pct", "energy_pct",
       "lifetime_decrease_pct", "overhead_pct"]
)


@dataclass
class MetricsReport:
    initial_alive: int
    initial_clusters: int
    horizon_s: float
    energy_budget_j: float
    overhead_budget_bytes: float = DEFAULT_OVERHEAD_BUDGET_BYTES
    rows: list[IterationRow] = field(default_factory=list)
    terminated_early: bool = False
    terminated_at_iteration: int | None = None

    def final_row(self) -> IterationRow | None:
        return self.rows[-1] if self.rows else None

    def summary(self) -> dict:
        last = self.final_row()
        alive_end = last.alive if last else self.initial_alive
        clusters_end = last.clusters if last else self.initial_clusters
        energy = last.energy_j if last else 0.0
        delay = last.delay_ms if last else 0.0
        oh_bytes = last.overhead_bytes if last else 0
        return {
            "iterations_run": len(self.rows),
            "terminated_early": self.terminated_early,
            "terminated_at_iteration": self.terminated_at_iteration,
            "alive_start": self.initial_alive,
            "alive_end": alive_end,
            "clusters_start": self.initial_clusters,
            "clusters_end": clusters_end,
            "delivered_frames": last.delivered_frames if last else 0,
            "delivered_reports": last.delivered_reports if last else 0,
            "energy_spent_j": energy,
            "delay_ms": delay,
            "overhead_packets": last.overhead_packets if last else 0,
            "overhead_bytes": oh_bytes,
            "alive_decrease_pct": alive_decrease_pct(self.initial_alive, alive_end),
            "survival_pct": survival_pct(self.initial_alive, alive_end),
            "delay_pct": delay_pct(delay, self.horizon_s),
            "energy_pct": energy_pct(energy, self.energy_budget_j),
            "lifetime_decrease_pct": lifetime_decrease_pct(self.initial_clusters, clusters_end),
            "clusters_retained_pct": clusters_retained_pct(self.initial_clusters, clusters_end),
            "overhead_pct": overhead_pct(oh_bytes, self.overhead_budget_bytes),
        }

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            cells = ["iteration", row.iteration, repr(row.time_s), row.alive, row.clusters,
                     row.blocked, row.flat, row.delivered_frames, row.delivered_reports,
                     repr(row.energy_j), repr(row.delay_ms),
                     row.overhead_packets, row.overhead_bytes]
            cells += [row.packets_by_category.get(c, 0) for c in OVERHEAD_CATEGORIES]
            cells += [row.bytes_by_category.get(c, 0) for c in OVERHEAD_CATEGORIES]
            cells += ["", "", "", "", ""]
            writer.writerow(cells)
        s = self.summary()
        cells = ["summary", len(self.rows), "", s["alive_end"], s["clusters_end"], "", "",
                 s["delivered_frames"], s["delivered_reports"], repr(s["energy_spent_j"]),
                 repr(s["delay_ms"]), s["overhead_packets"], s["overhead_bytes"]]
        cells += ["" for _ in OVERHEAD_CATEGORIES] + ["" for _ in OVERHEAD_CATEGORIES]
        cells += [f"{s['alive_decrease_pct']:.6f}", f"{s['delay_pct']:.6f}",
                  f"{s['energy_pct']:.6f}", f"{s['lifetime_decrease_pct']:.6f}",
                  f"{s['overhead_pct']:.6f}"]
        writer.writerow(cells)
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"
