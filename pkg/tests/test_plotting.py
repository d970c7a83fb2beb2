import xml.etree.ElementTree as ET

import numpy as np

from bandclust import cluster, from_dense
from bandclust.plotting import render_svg, render_text
from conftest import random_band


def test_text_m3(m3):
    text = render_text(cluster(m3))
    assert text.count("merge") == 2
    assert text.count("leaf") == 3
    assert "0.5" in text


def test_text_single_leaf():
    empty = np.empty(0)
    from bandclust.engine import Dendrogram
    d = Dendrogram(p=1, left=empty, right=empty, heights=empty,
                   starts=empty, splits=empty, ends=empty)
    assert render_text(d) == "leaf 1\n"


def test_svg_well_formed(m3):
    svg = render_svg(cluster(m3), m3)
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")


def test_svg_nonmonotone_heights_layout():
    # drawing must not fail when heights decrease along the merge order
    rng = np.random.default_rng(2)
    m = random_band(15, 4, rng, definite=False)
    svg = render_svg(cluster(m))
    ET.fromstring(svg)


def test_svg_single_leaf():
    from bandclust.engine import Dendrogram
    empty = np.empty(0)
    d = Dendrogram(p=1, left=empty, right=empty, heights=empty,
                   starts=empty, splits=empty, ends=empty)
    ET.fromstring(render_svg(d))
