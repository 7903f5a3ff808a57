import hashlib
import math
import os

import pytest

from conftest import (
    REAL_SCENARIO,
    SIMPLE_PAIR,
    oriented,
    random_config,
    sun_at,
)
from helioshade.field import (
    FieldLayout,
    HeliostatSpec,
    LayoutError,
    OrientedField,
    RadialStaggerSpec,
    _subject_efficiency,
    evaluate_field,
    format_report,
    load_layout,
    save_layout,
    synthetic_field,
    write_report,
)
from helioshade.linalg3 import Vec3
from helioshade.shading import efficiency


# -- layout I/O --------------------------------------------------------------


def test_load_simple_pair_layout():
    layout = load_layout(SIMPLE_PAIR)
    assert layout.latitude_deg == 40.08
    assert len(layout.heliostats) == 3
    assert layout.receiver_map()["tower"] == Vec3(0.0, 0.0, 100.0)


def test_load_real_scenario_layout():
    layout = load_layout(REAL_SCENARIO)
    assert len(layout.heliostats) == 25
    assert layout.receiver_map()["tower"] == Vec3(0.0, 0.0, 150.0)
    assert layout.heliostats[0].width == 12.88
    assert layout.heliostats[0].height == 9.489


def test_empty_heliostat_list_is_valid(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("plant lat=40\nreceiver id=t x=0 y=0 z=100\n")
    layout = load_layout(str(p))
    assert layout.heliostats == ()
    report = evaluate_field(layout, sun_at(21, 12.0, 40.0))
    assert report.average == 1.0


@pytest.mark.parametrize(
    "body,message",
    [
        ("receiver id=t x=0 y=0 z=100\n", "missing 'plant"),
        (
            "plant lat=40\nreceiver id=t x=0 y=0 z=100\n"
            "heliostat id=a x=0 y=0 z=5 w=10 h=10 receiver=t\n"
            "heliostat id=a x=9 y=0 z=5 w=10 h=10 receiver=t\n",
            "duplicate heliostat id",
        ),
        (
            "plant lat=40\nreceiver id=t x=0 y=0 z=100\n"
            "heliostat id=a x=0 y=0 z=5 w=10 h=10 receiver=zz\n",
            "unknown receiver",
        ),
        (
            "plant lat=40\nreceiver id=t x=0 y=0 z=100\n"
            "heliostat id=a x=0 y=0 z=5 w=-1 h=10 receiver=t\n",
            "non-positive dimensions",
        ),
        (
            "plant lat=40\nreceiver id=t x=0 y=0 z=100\n"
            "heliostat id=a x=0 y=0 z=5 w=oops h=10 receiver=t\n",
            "line 3",
        ),
        (
            "plant lat=40\nreceiver id=t x=0 y=0 z=100\n"
            "heliostat id=a x=0 y=0 z=5 h=10 receiver=t\n",
            "missing field",
        ),
        (
            "plant lat=40\nwidget id=t\n",
            "unknown record type",
        ),
    ],
)
def test_layout_diagnostics(tmp_path, body, message):
    p = tmp_path / "bad.txt"
    p.write_text(body)
    with pytest.raises(LayoutError, match=message):
        load_layout(str(p))


def test_save_load_roundtrip(tmp_path):
    layout = load_layout(REAL_SCENARIO)
    p = tmp_path / "copy.txt"
    save_layout(layout, str(p))
    again = load_layout(str(p))
    assert again == layout


# -- synthetic generator -----------------------------------------------------


def test_synthetic_single_heliostat():
    layout = synthetic_field(1)
    assert len(layout.heliostats) == 1
    report = evaluate_field(layout, sun_at(21, 12.0, layout.latitude_deg))
    assert report.average == 1.0


def test_synthetic_deterministic_hash(tmp_path):
    digests = []
    for name in ("a.txt", "b.txt"):
        p = tmp_path / name
        save_layout(synthetic_field(200), str(p))
        digests.append(hashlib.sha256(p.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_synthetic_no_overlaps():
    layout = synthetic_field(500)
    diag = math.hypot(12.88, 9.489)
    pts = [(h.center.x, h.center.y) for h in layout.heliostats]
    for i in range(0, len(pts), 25):  # spot-check rows against all others
        for k in range(len(pts)):
            if k == i:
                continue
            d = math.hypot(pts[i][0] - pts[k][0], pts[i][1] - pts[k][1])
            assert d > diag


def test_synthetic_infeasible_spacing_rejected():
    with pytest.raises(LayoutError, match="infeasible spacing"):
        synthetic_field(10, RadialStaggerSpec(radial_step=5.0))


# -- batch engine ------------------------------------------------------------


def test_evaluate_simple_pair_noon():
    layout = load_layout(SIMPLE_PAIR)
    report = evaluate_field(layout, sun_at(21, 12.0, layout.latitude_deg))
    assert len(report.records) == 3
    by_id = {r.id: r for r in report.records}
    assert by_id["c"].efficiency == pytest.approx(0.76, abs=0.02)
    assert by_id["c"].area_total == pytest.approx(100.0)
    assert report.average == pytest.approx(
        sum(r.efficiency for r in report.records) / 3.0
    )


def test_batch_matches_scalar_engine():
    layout = load_layout(REAL_SCENARIO)
    for hour in (8.0, 12.0, 16.25):
        sun = sun_at(21, hour, layout.latitude_deg)
        of = OrientedField(layout, sun)
        field = oriented(layout.to_heliostats(), sun)
        for j in (0, 4, 11):
            e_batch = _subject_efficiency(of, j)
            e_scalar = efficiency(field[j], field, sun).efficiency
            assert e_batch == pytest.approx(e_scalar, abs=1e-12)


def test_removing_heliostat_never_hurts_others(rng):
    for _ in range(10):
        helios, sun = random_config(rng)
        layout = FieldLayout(
            latitude_deg=38.0,
            receivers=(("t", helios[0].aim),),
            heliostats=tuple(
                HeliostatSpec(
                    id=h.id, center=h.center, width=h.width, height=h.height,
                    receiver="t",
                )
                for h in helios
            ),
        )
        full = {r.id: r.efficiency for r in evaluate_field(layout, sun).records}
        reduced_layout = FieldLayout(
            latitude_deg=38.0,
            receivers=(("t", helios[0].aim),),
            heliostats=layout.heliostats[:-1],
        )
        reduced = {
            r.id: r.efficiency for r in evaluate_field(reduced_layout, sun).records
        }
        for hid, e in reduced.items():
            assert e >= full[hid] - 1e-9


def test_report_format(tmp_path):
    layout = load_layout(SIMPLE_PAIR)
    report = evaluate_field(layout, sun_at(21, 12.0, layout.latitude_deg))
    p = tmp_path / "report.txt"
    write_report(report, str(p))
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# sun eta=")
    assert lines[1].startswith("# date")
    assert lines[2].startswith("# elapsed")
    assert lines[3] == "# id efficiency area_reflecting area_total"
    assert lines[-1].startswith("# average ")
    data = [ln for ln in lines if not ln.startswith("#")]
    assert [ln.split()[0] for ln in data] == ["c", "h1", "h2"]
    for ln in data:
        cols = ln.split()
        assert float(cols[2]) == pytest.approx(float(cols[1]) * float(cols[3]))


def test_reports_identical_across_workers():
    layout = synthetic_field(40)
    sun = sun_at(21, 12.0, layout.latitude_deg)
    texts = []
    for workers in (1, 4):
        report = evaluate_field(layout, sun, workers=workers)
        texts.append(format_report(report, include_timing=False))
    assert texts[0] == texts[1]


def test_worker_env_override(monkeypatch):
    from helioshade.field import default_workers

    monkeypatch.setenv("HELIOSHADE_WORKERS", "7")
    assert default_workers() == 7
    monkeypatch.delenv("HELIOSHADE_WORKERS")
    assert default_workers() == 1
