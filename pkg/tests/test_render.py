import re
import xml.etree.ElementTree as ET

from pweikonal.catalog import two_diamonds
from pweikonal.distance import distance_solution
from pweikonal.geometry import diamond, rect
from pweikonal.render import render_svg

NS = "{http://www.w3.org/2000/svg}"


def test_deterministic():
    v = distance_solution(two_diamonds()[0])
    assert render_svg(v, show_levels=3) == render_svg(v, show_levels=3)


def test_groups():
    v = distance_solution(rect(0, 0, 4, 2))
    root = ET.fromstring(render_svg(v, show_levels=2))
    ids = [g.get("id") for g in root.iter(NS + "g")]
    assert ids == ["domain", "levels", "jump1", "jump2"]
    root = ET.fromstring(render_svg(v, show_jumps=False))
    assert [g.get("id") for g in root.iter(NS + "g")] == ["domain"]


def test_world_coordinates():
    # diamond of radius 1: world vertices (+-1, 0), (0, +-1), drawn with a 5% margin
    svg = render_svg(distance_solution(diamond(1)), size=440)
    root = ET.fromstring(svg)
    assert root.get("width") == "440"
    poly = next(root.iter(NS + "polygon")).get("points")
    pts = {tuple(map(float, p.split(","))) for p in poly.split()}
    assert pts == {(20.0, 220.0), (420.0, 220.0), (220.0, 20.0), (220.0, 420.0)}
    # the ridge of d runs along the world axes: x1 = 0 breaks d/dx1, x2 = 0 breaks d/dx2
    assert re.search(r'id="jump1"[^>]*>\n<polyline points="220,420 220,20"/>', svg)
    assert re.search(r'id="jump2"[^>]*>\n<polyline points="20,220 420,220"/>', svg)
