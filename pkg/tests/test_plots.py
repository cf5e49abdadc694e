"""Tests for ccshell.plots – homology bar charts and face-poset diagrams."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pytest  # noqa: E402

from ccshell.fixtures import load_fixture  # noqa: E402
from ccshell.homology import FGModule, homology  # noqa: E402
from ccshell.plots import plot_face_poset, plot_homology  # noqa: E402


@pytest.fixture(autouse=True)
def _close_figures():
    yield
    plt.close("all")


def test_homology_bars_follow_free_rank():
    fig = plot_homology([FGModule(1, (2,)), FGModule(0), FGModule(3)])
    (ax,) = fig.axes
    heights = [bar.get_height() for bar in ax.patches]
    assert heights == [1, 0, 3]
    assert [t.get_text() for t in ax.get_xticklabels()] == ["H_0", "H_1", "H_2"]


def test_torsion_is_annotated():
    fig = plot_homology([FGModule(1, (2, 4))])
    texts = [t.get_text() for t in fig.axes[0].texts]
    assert texts == ["/2 ⊕ /4"]


def test_expected_homology_adds_legend():
    groups = homology(load_fixture("double_disc"))
    fig = plot_homology(groups, expected=groups, title="double_disc")
    ax = fig.axes[0]
    assert ax.get_legend() is not None
    assert ax.get_title() == "double_disc"


def test_homology_plot_is_saved(tmp_path):
    out = tmp_path / "plots" / "homology.png"
    plot_homology([FGModule(1)], output_path=out)
    assert out.is_file()


def test_face_poset_draws_every_element(tmp_path):
    complex_ = load_fixture("two_triangles")
    out = tmp_path / "poset.png"
    fig = plot_face_poset(complex_, output_path=out)
    ax = fig.axes[0]
    assert len(ax.collections) == sum(complex_.rank_profile())
    assert {t.get_text() for t in ax.texts} == {str(e) for e in complex_.elements()}
    assert out.is_file()


def test_face_poset_dashes_non_unit_coefficients():
    fig = plot_face_poset(load_fixture("torsion_edge"))
    styles = sorted(line.get_linestyle() for line in fig.axes[0].lines)
    assert styles == ["--", "--"]
