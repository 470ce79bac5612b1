import csv
import io
import json

import pytest

from esrpsim import ConfigError
from esrpsim.metrics import (
    CSV_COLUMNS,
    OVERHEAD_CATEGORIES,
    IterationRow,
    MetricsReport,
    alive_decrease_pct,
    combine_overhead,
    delay_pct,
    energy_pct,
    esrp_overhead,
    ldts_overhead,
    lifetime_decrease_pct,
    overhead_pct,
    survival_pct,
)


def test_overhead_closed_form():
    intra, inter, total = esrp_overhead(5, 20)
    assert (intra, inter, total) == (38, 12, 202)
    assert esrp_overhead(2, 4) == (6, 6, 18)
    assert esrp_overhead(3, 5) == (8, 8, 32)


def test_ldts_overhead_closed_form():
    intra, inter, total = ldts_overhead(5, 20)
    assert intra == 724
    assert inter == 42
    assert total == 5 * 724 + 42
    # with the published intra figure the published total comes out exactly
    assert combine_overhead(5, 233_968, 42) == 1_169_882


def test_overhead_rejects_degenerate_sizes():
    with pytest.raises(ConfigError):
        esrp_overhead(0, 5)
    with pytest.raises(ConfigError):
        ldts_overhead(3, 0)


def test_percentages_worked_values():
    assert alive_decrease_pct(100, 37) == pytest.approx(63.0)
    assert survival_pct(100, 37) == pytest.approx(37.0)
    assert energy_pct(72.0, 200.0) == pytest.approx(36.0)
    assert overhead_pct(450.0, 650.0) == pytest.approx(69.2, abs=0.05)
    assert lifetime_decrease_pct(5, 4) == pytest.approx(20.0)
    assert delay_pct(1000.0, 3600.0) == pytest.approx(1 / 3600 * 100)


def test_percentage_validation():
    with pytest.raises(ConfigError):
        energy_pct(1.0, 0.0)
    with pytest.raises(ConfigError):
        alive_decrease_pct(0, 0)


def build_report():
    rows = [
        IterationRow(
            iteration=i + 1, time_s=(i + 1) * 10.0, alive=10 - i, clusters=2,
            blocked=i, flat=0, delivered_frames=2 * (i + 1),
            delivered_reports=6 * (i + 1), energy_j=0.5 * (i + 1),
            delay_ms=1.5 * (i + 1), overhead_packets=20 * (i + 1),
            overhead_bytes=130 * (i + 1),
            packets_by_category={c: i + 1 for c in OVERHEAD_CATEGORIES},
            bytes_by_category={c: 10 * (i + 1) for c in OVERHEAD_CATEGORIES},
        )
        for i in range(3)
    ]
    return MetricsReport(
        initial_alive=10, initial_clusters=2, horizon_s=30.0,
        energy_budget_j=20.0, overhead_budget_bytes=650.0, rows=rows,
    )


def test_csv_shape_and_summary_row():
    report = build_report()
    text = report.csv_text()
    reader = list(csv.reader(io.StringIO(text)))
    assert reader[0] == CSV_COLUMNS
    assert len(reader) == 1 + 3 + 1
    assert reader[1][0] == "iteration"
    summary_row = reader[-1]
    assert summary_row[0] == "summary"
    # summary carries the percentage columns that iteration rows leave blank
    assert reader[1][-5:] == [""] * 5
    assert summary_row[-5:] != [""] * 5


def test_summary_numbers():
    report = build_report()
    s = report.summary()
    assert s["alive_start"] == 10 and s["alive_end"] == 8
    assert s["alive_decrease_pct"] == pytest.approx(20.0)
    assert s["energy_spent_j"] == pytest.approx(1.5)
    assert s["energy_pct"] == pytest.approx(7.5)
    assert s["overhead_bytes"] == 390
    assert s["overhead_pct"] == pytest.approx(60.0)
    assert s["iterations_run"] == 3
    assert not s["terminated_early"]


def test_summary_json_round_trips():
    report = build_report()
    data = json.loads(report.summary_json())
    assert data["clusters_start"] == 2
    assert data["delivered_reports"] == 18


def test_empty_run_yields_header_and_summary_only():
    report = MetricsReport(
        initial_alive=5, initial_clusters=1, horizon_s=10.0, energy_budget_j=10.0,
    )
    reader = list(csv.reader(io.StringIO(report.csv_text())))
    assert len(reader) == 2
    assert reader[1][0] == "summary"
    s = report.summary()
    assert s["iterations_run"] == 0
    assert s["alive_end"] == 5


def test_csv_is_deterministic():
    assert build_report().csv_text() == build_report().csv_text()
