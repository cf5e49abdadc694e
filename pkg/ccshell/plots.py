"""Plotting helpers for ccshell reports.

Two figures are currently supported:

* :func:`plot_homology`: bar chart of the free rank of each homology group,
  with the torsion coefficients written above the bars.
* :func:`plot_face_poset`: Hasse diagram of the basis, one row per degree,
  with an edge from every element to each member of its boundary set.

Maximal elements are drawn in red (``tab:red``), everything else in blue
(``tab:blue``).
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterable, Optional, Sequence, Tuple

import matplotlib.pyplot as plt

from ccshell import config as cfg
from ccshell.complex import BasisElement, ChainComplex, maximal_elements

if TYPE_CHECKING:
    from matplotlib.figure import Figure

    from ccshell.homology import FGModule

logger = logging.getLogger(__name__)

_MAXIMAL_COLOUR = "tab:red"
_OTHER_COLOUR = "tab:blue"


def _save(fig: "Figure", output_path: str | Path | None, what: str) -> None:
    if output_path is None:
        return
    out = Path(output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(str(out), dpi=cfg.PLOT_DPI)
    logger.info("Saved %s plot to %s", what, out)


def plot_homology(
    groups: Sequence["FGModule"],
    expected: Optional[Sequence["FGModule"]] = None,
    title: str = "Homology",
    output_path: str | Path | None = None,
) -> "Figure":  # type: ignore[name-defined]
    """Bar chart of rank H_ν against ν.

    Parameters
    ----------
    groups:
        H_0, …, H_d as returned by :func:`~ccshell.homology.homology`.
    expected:
        Predicted groups, drawn as red markers over the bars.
    title:
        Axes title.
    output_path:
        If given, the figure is saved to this path.

    Returns
    -------
    matplotlib.figure.Figure
    """
    groups = list(groups)
    degrees = list(range(len(groups)))
    ranks = [g.free_rank for g in groups]

    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(groups) + 2), 4), constrained_layout=True)
    bars = ax.bar(degrees, ranks, color=_OTHER_COLOUR, width=0.6, label="free rank")
    for bar, group in zip(bars, groups):
        if group.torsion:
            ax.annotate(
                " ⊕ ".join(f"/{t}" for t in group.torsion),
                (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                xytext=(0, 4),
                textcoords="offset points",
                ha="center",
                fontsize=9,
            )

    if expected is not None:
        ax.scatter(
            degrees,
            [g.free_rank for g in expected],
            color=_MAXIMAL_COLOUR,
            marker="_",
            s=400,
            linewidths=2,
            zorder=3,
            label="predicted",
        )
        ax.legend(fontsize=9, framealpha=0.9)

    ax.set_xticks(degrees)
    ax.set_xticklabels([f"H_{nu}" for nu in degrees])
    ax.set_ylabel("Free rank", fontsize=11)
    ax.set_ylim(0, max(ranks + [1]) + 1)
    ax.yaxis.get_major_locator().set_params(integer=True)
    ax.spines[["top", "right"]].set_visible(False)
    ax.set_title(title, fontsize=12)

    _save(fig, output_path, "homology")
    return fig


def _layout(complex_: ChainComplex) -> Dict[BasisElement, Tuple[float, float]]:
    widest = max(complex_.rank_profile())
    positions = {}
    for nu in range(complex_.order + 1):
        basis = complex_.basis(nu)
        offset = (widest - len(basis)) / 2
        for j, e in enumerate(basis):
            positions[e] = (offset + j, float(nu))
    return positions


def plot_face_poset(
    complex_: ChainComplex,
    gamma: Optional[Iterable[BasisElement]] = None,
    output_path: str | Path | None = None,
) -> "Figure":  # type: ignore[name-defined]
    """Hasse diagram of Ω: one row per degree, edges for ``bd`` membership.

    *gamma* defaults to the maximal elements of the complex.  Edges whose
    boundary coefficient is not ±1 are dashed.
    """
    highlighted = set(maximal_elements(complex_) if gamma is None else gamma)
    positions = _layout(complex_)
    widest = max(complex_.rank_profile())

    fig, ax = plt.subplots(
        figsize=(max(4, 1.1 * widest + 1), 1.6 * (complex_.order + 1) + 1), constrained_layout=True
    )
    for e in complex_.elements():
        chain = complex_.boundary_of(e)
        x0, y0 = positions[e]
        for f, value in chain.coefficients.items():
            x1, y1 = positions[f]
            ax.plot(
                [x0, x1],
                [y0, y1],
                color="gray",
                linewidth=1,
                linestyle="-" if complex_.ring.is_unit(value) else "--",
                zorder=1,
            )
    for e, (x, y) in positions.items():
        colour = _MAXIMAL_COLOUR if e in highlighted else _OTHER_COLOUR
        ax.scatter([x], [y], s=220, color=colour, zorder=2)
        ax.annotate(str(e), (x, y), xytext=(0, 10), textcoords="offset points", ha="center", fontsize=8)

    ax.set_yticks(range(complex_.order + 1))
    ax.set_yticklabels([f"Ω_{nu}" for nu in range(complex_.order + 1)])
    ax.set_xticks([])
    ax.set_ylim(-0.5, complex_.order + 0.7)
    ax.spines[["top", "right", "bottom"]].set_visible(False)
    ax.set_title("Face poset (maximal elements in red)", fontsize=12)

    _save(fig, output_path, "face poset")
    return fig
