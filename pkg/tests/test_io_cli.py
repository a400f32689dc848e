import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from freqplace import cli
from freqplace.errors import ValidationError
from freqplace.layout import LayoutFile, config_from_dict, config_to_dict
from freqplace.legalizer import overlaps, rilc
from freqplace.model import GHZ, Design, Instance, Kind, Placement, PlacerConfig, Topology
from freqplace.pipeline import mode_config, run_pipeline
from freqplace.render import render_svg
from freqplace.topology import gen_grid

from conftest import pipeline

SVG = "{http://www.w3.org/2000/svg}"


def test_config_echo_round_trip():
    cfg = PlacerConfig(segment_size=0.25, freq_weight=0.2, lambda_freq=3.0, seed=4)
    d = config_to_dict(cfg)
    assert "delta_c_hz" in d and "segment_size_mm" in d
    assert config_from_dict(d) == cfg


def test_layout_round_trip_is_identity():
    layout, _ = pipeline("grid:5x5", "qplacer")
    text = layout.dumps()
    again = LayoutFile.loads(text)
    assert again.dumps() == text
    assert again.design.instances == layout.design.instances
    # lengths are stored at file precision; after one parse the content is a fixed point
    for r0, r1 in zip(layout.design.resonators, again.design.resonators):
        assert (r0.id, r0.endpoints, r0.frequency, r0.segment_ids) == (r1.id, r1.endpoints, r1.frequency,
                                                                       r1.segment_ids)
        assert r1.length == pytest.approx(r0.length, rel=1e-8)
    assert LayoutFile.loads(again.dumps()).design.resonators == again.design.resonators
    assert np.array_equal(again.placement.positions, layout.placement.positions)
    assert again.polylines == layout.polylines
    assert again.config == layout.config


def test_layout_ids_resolve():
    layout, _ = pipeline("grid:5x5", "qplacer")
    doc = json.loads(layout.dumps())
    n = len(doc["instances"])
    for r in doc["resonators"]:
        assert all(0 <= s < n for s in r["segment_ids"])
        assert all(0 <= q < doc["topology"]["qubits"] for q in r["endpoints"])
    doc["resonators"][0]["segment_ids"].append(0)  # a qubit is not a segment
    with pytest.raises(ValidationError):
        LayoutFile.from_dict(doc)


def test_malformed_layouts_rejected():
    with pytest.raises(ValidationError):
        LayoutFile.loads("{not json")
    with pytest.raises(ValidationError):
        LayoutFile.loads('{"version": "something-else"}')
    with pytest.raises(ValidationError):
        LayoutFile.loads('{"version": "freqplace-layout/1"}')


@pytest.mark.slow
def test_pipeline_modes_grid25():
    q, rq = pipeline("grid:5x5", "qplacer")
    c, rc = pipeline("grid:5x5", "classic")
    h, rh = pipeline("grid:5x5", "human")
    for lay in (q, c, h):
        assert overlaps(lay.placement, lay.design.instances) == []
    assert q.integrated and c.integrated
    assert all(rilc(r, q.placement, 0.5) for r in q.design.resonators)
    assert rc.p_h > rq.p_h
    assert rh.p_h == 0.0
    assert rh.a_mer > max(rq.a_mer, rc.a_mer)
    assert set(q.polylines) == {r.id for r in q.design.resonators}


def test_classic_differs_only_in_frequency_term():
    q, _ = pipeline("grid:5x5", "qplacer")
    c, _ = pipeline("grid:5x5", "classic")
    a, b = config_to_dict(q.config), config_to_dict(c.config)
    assert {k for k in a if a[k] != b[k]} == {"use_freq"}
    assert mode_config(PlacerConfig(lambda_freq=2.0), "classic").lambda_freq is None
    with pytest.raises(ValueError):
        mode_config(PlacerConfig(), "fancy")


def test_pipeline_deterministic():
    cfg = PlacerConfig(seed=11)
    a, _ = run_pipeline(gen_grid(3, 3), cfg, "qplacer")
    b, _ = run_pipeline(gen_grid(3, 3), cfg, "qplacer")
    assert a.dumps() == b.dumps()


def _rects(svg):
    root = ET.fromstring(svg)
    return root, [r for r in root.iter(f"{SVG}rect") if "instance" in r.get("class", "")]


def test_render_empty_layout():
    empty = LayoutFile("qplacer", PlacerConfig(), Design(Topology(0, ()), [], [], []),
                       Placement(np.zeros((0, 2)), (0, 0, 1, 1)))
    root, rects = _rects(render_svg(empty))
    assert rects == []
    assert root.find(f"{SVG}g[@id='legend']") is not None


def test_render_single_qubit_has_halo():
    inst = [Instance(0, Kind.QUBIT, 0.4, 0.4, 0.4, 5 * GHZ, qubit_id=0)]
    lay = LayoutFile("human", PlacerConfig(), Design(Topology(1, ()), inst, [], []),
                     Placement(np.zeros((1, 2)), (0, 0, 1, 1)))
    root, rects = _rects(render_svg(lay))
    assert len(rects) == 1
    halos = [r for r in root.iter(f"{SVG}rect") if r.get("class") == "halo"]
    assert len(halos) == 1 and float(halos[0].get("width")) > float(rects[0].get("width"))


def test_render_grid25_counts():
    lay, rep = pipeline("grid:5x5", "classic")
    root, rects = _rects(render_svg(lay))
    assert len(rects) == len(lay.design.instances)
    lines = [x for x in root.iter(f"{SVG}line") if x.get("class") == "hotspot"]
    assert len(lines) > 0 and rep.p_h > 0


def test_cli_place_eval_render_gen(tmp_path, capsys):
    out = tmp_path / "l.json"
    rc = cli.main(["place", "--topology", "grid:3x3", "--mode", "qplacer", "--lb", "0.3", "--seed", "7",
                   "--out", str(out), "--trace", str(tmp_path / "t.csv")])
    assert rc == 0 and out.exists() and (tmp_path / "t.csv").exists()
    rep = tmp_path / "r.json"
    assert cli.main(["eval", "--layout", str(out), "--program", "bv:3", "--mappings", "5", "--out", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert len(data["fidelities"]) == 5 and 0 < data["fidelity_mean"] <= 1
    assert cli.main(["render", "--layout", str(out), "--out", str(tmp_path / "l.svg")]) == 0
    ET.fromstring((tmp_path / "l.svg").read_text())
    edge = tmp_path / "g.txt"
    assert cli.main(["gen", "--topology", "octagon:2", "--out", str(edge)]) == 0
    assert cli.main(["place", "--topology", str(edge), "--mode", "human", "--out", str(tmp_path / "h.json")]) == 0


def test_cli_fixture_flag(tmp_path):
    out = tmp_path / "f.json"
    assert cli.main(["place", "--fixture", "falcon-27", "--mode", "human", "--out", str(out)]) == 0
    assert LayoutFile.read(out).design.topology.qubit_count == 27


@pytest.mark.parametrize("argv", [
    ["place", "--topology", "grid:0x3", "--out", "x.json"],
    ["place", "--topology", "grid:3x3", "--target-density", "2", "--out", "x.json"],
    ["place", "--topology", "/nonexistent/edges.txt", "--out", "x.json"],
    ["eval", "--layout", "/nonexistent.json"],
])
def test_cli_validation_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.main(argv) == 2


def test_cli_integration_failure_exits_3(tmp_path, monkeypatch):
    real = cli.run_pipeline

    def failing(*a, **kw):
        layout, report = real(*a, **kw)
        layout.failed_resonators = [0]
        return layout, report

    monkeypatch.setattr(cli, "run_pipeline", failing)
    out = tmp_path / "l.json"
    assert cli.main(["place", "--topology", "grid:2x2", "--out", str(out)]) == 3
    assert out.exists() and LayoutFile.read(out).failed_resonators == [0]
    assert cli.main(["eval", "--layout", str(out), "--mappings", "1", "--program", "bv:1"]) == 3
