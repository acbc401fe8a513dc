import xml.etree.ElementTree as ET

import numpy as np

from warpfield.cli import main
from warpfield.profile import flat_profile, sine_profile
from warpfield.svg import curve_figure, line_chart, profile_figure, torpedo_figure
from warpfield.torpedo import TorpedoSpec, torpedo_profile


def test_chart_is_valid_xml_with_one_polyline_per_series():
    svg = line_chart([("a", [0, 1, 2], [0, 1, 0]), ("b & c", [0, 2], [1, 1])], "t<1>", dashed=("a",))
    root = ET.fromstring(svg)
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 2
    assert lines[0].get("stroke-dasharray") == "6 4"
    assert "b &amp; c" in svg


def test_degenerate_ranges_do_not_divide_by_zero():
    svg = line_chart([("const", [1, 1], [2, 2])])
    assert "nan" not in svg and "inf" not in svg


def test_torpedo_outline_is_symmetric():
    svg = torpedo_figure([("t", torpedo_profile(TorpedoSpec(0.2, 1.0)))])
    pts = ET.fromstring(svg).find("{http://www.w3.org/2000/svg}polyline").get("points").split()
    assert len(pts) % 2 == 0


def test_figures_are_deterministic():
    profs = [("flat", flat_profile(1.0)), ("sine", sine_profile(0.5, 0.7))]
    assert profile_figure(profs) == profile_figure(profs)
    rows = [("v", 0.0, r) for r in np.linspace(0, 1, 5)]
    assert curve_figure([("c", rows)]) == curve_figure([("c", rows)])


def test_figures_command(tmp_path):
    first, second = tmp_path / "a_", tmp_path / "b_"
    assert main(["figures", "--prefix", str(first)]) == 0
    assert main(["figures", "--prefix", str(second)]) == 0
    for name in ("torpedo.svg", "bend.svg", "retract.svg"):
        a = (tmp_path / f"a_{name}").read_bytes()
        assert a == (tmp_path / f"b_{name}").read_bytes()
        ET.fromstring(a)
