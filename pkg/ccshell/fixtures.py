"""Bundled example complexes and the properties they are known to have.

The ``.ccx`` files live in ``ccshell/data``.  :func:`examples_manifest`
pairs each one with the expected homology and property verdicts, and
:func:`run_examples` recomputes everything and returns a diff table.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from ccshell import config as cfg
from ccshell.complex import ChainComplex
from ccshell.documents import load_document, to_complex
from ccshell.errors import DanglingReference
from ccshell.homology import FGModule
from ccshell.reports import FAILS, HOLDS, AnalysisReport, analyse
from ccshell.rings import RingSpec

logger = logging.getLogger(__name__)

Z = FGModule(1)
ZERO = FGModule(0)


def _z(rank: int, *torsion: int) -> FGModule:
    return FGModule(rank, tuple(torsion))


@dataclass(frozen=True)
class FixtureExpectation:
    """Expected fragment of the report for one fixture.

    ``properties`` maps ``acyclic``, ``augmentation`` or one of the report's
    property names to the verdict it must have.  Properties left out are not
    compared.
    """

    name: str
    homology: Tuple[FGModule, ...]
    properties: Mapping[str, bool] = field(default_factory=dict)


# Alternative names accepted by :func:`fixture_path` for the bundled
# complexes.  The ``.ccx`` files themselves only exist under the name on the
# right.
FIXTURE_ALIASES: Mapping[str, str] = {
    "ex_3_3": "loop_to_vertex",
    "ex_4_1": "two_triangles",
    "ex_4_2": "triangle",
    "ex_4_3": "pinched_disc",
    "ex_4_4": "strip_cone",
    "ex_4_5": "square",
    "ex_4_k2_acyclic": "coprime_edge",
    "ex_4_k2_torsion": "torsion_edge",
    "ex_5_1_1": "tripod_edge",
    "ex_5_1_2": "twin_tripod_edges",
    "ex_5_1_3": "twisted_tripod_edges",
    "ex_6_1_1": "independent_edges",
    "ex_6_1_2": "swap_regular",
    "ex_6_1_3": "lopsided_edges",
    "ex_6_1_4": "regular_with_loop",
    "ex_6_1_5": "half_open_edge",
    "ex_6_1_6": "regular_strip",
    "ex_6_1_7": "regular_disc",
    "ex_6_1_8": "double_disc",
}


_MANIFEST: Tuple[FixtureExpectation, ...] = (
    FixtureExpectation("loop_to_vertex", (ZERO, ZERO), {"augmentation": False, "cone": False, "acyclic": False}),
    FixtureExpectation(
        "two_triangles",
        (Z, ZERO, ZERO),
        {"acyclic": True, "shelling": True, "totally_regular": True, "cone": True},
    ),
    FixtureExpectation("triangle", (Z, ZERO, ZERO), {"acyclic": True, "cone": True}),
    FixtureExpectation("pinched_disc", (Z, ZERO, ZERO), {"acyclic": True, "cone": True}),
    FixtureExpectation("strip_cone", (Z, ZERO, ZERO), {"acyclic": True, "cone": True}),
    FixtureExpectation("square", (Z, ZERO, ZERO), {"acyclic": True, "regular": True, "cone": False}),
    FixtureExpectation("coprime_edge", (Z, ZERO), {"acyclic": True, "cone": False}),
    FixtureExpectation("torsion_edge", (_z(1, 2), ZERO), {"acyclic": False, "cone": False}),
    FixtureExpectation("tripod_edge", (_z(2), ZERO), {"shelling": True, "regular": True}),
    FixtureExpectation("twin_tripod_edges", (_z(2), Z), {"shelling": True, "regular": True}),
    FixtureExpectation("twisted_tripod_edges", (_z(1, 2), ZERO), {"shelling": True, "regular": False}),
    FixtureExpectation(
        "independent_edges", (_z(0, 3), ZERO), {"acyclic": False, "shelling": True, "regular": False}
    ),
    FixtureExpectation(
        "swap_regular",
        (Z, ZERO, ZERO),
        {"acyclic": True, "shelling": True, "regular": True, "totally_regular": False, "cone": True},
    ),
    FixtureExpectation(
        "lopsided_edges",
        (Z, ZERO),
        {"acyclic": True, "shelling": True, "regular": False, "cone": False},
    ),
    FixtureExpectation(
        "regular_with_loop",
        (Z, Z, ZERO),
        {"acyclic": False, "shelling": True, "regular": True, "totally_regular": False},
    ),
    FixtureExpectation(
        "half_open_edge",
        (Z, ZERO),
        {"acyclic": True, "shelling": True, "regular": True, "totally_regular": False, "cone": False},
    ),
    FixtureExpectation(
        "regular_strip",
        (Z, ZERO, ZERO),
        {"acyclic": True, "shelling": True, "regular": True, "totally_regular": True, "cone": True},
    ),
    FixtureExpectation(
        "regular_disc",
        (Z, ZERO, ZERO),
        {"acyclic": True, "shelling": True, "regular": True, "totally_regular": True, "cone": True},
    ),
    FixtureExpectation(
        "double_disc",
        (Z, ZERO, Z),
        {"acyclic": False, "shelling": True, "regular": True, "totally_regular": True},
    ),
)


def examples_manifest() -> List[FixtureExpectation]:
    return list(_MANIFEST)


def fixture_names(include_aliases: bool = False) -> List[str]:
    names = [
        entry.name[: -len(cfg.DOCUMENT_SUFFIX)]
        for entry in resources.files("ccshell").joinpath("data").iterdir()
        if entry.name.endswith(cfg.DOCUMENT_SUFFIX)
    ]
    if include_aliases:
        names += [alias for alias, target in FIXTURE_ALIASES.items() if target in names]
    return sorted(names)


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture, given with or without its suffix.

    Names in :data:`FIXTURE_ALIASES` resolve to their target.
    """
    stem = name[: -len(cfg.DOCUMENT_SUFFIX)] if name.endswith(cfg.DOCUMENT_SUFFIX) else name
    stem = FIXTURE_ALIASES.get(stem, stem)
    path = Path(str(resources.files("ccshell").joinpath("data").joinpath(stem + cfg.DOCUMENT_SUFFIX)))
    if not path.is_file():
        raise DanglingReference(f"no bundled fixture named {name!r}")
    return path


def load_fixture(name: str, ring: RingSpec | None = None) -> ChainComplex:
    return to_complex(load_document(fixture_path(name)), ring)


# ---------------------------------------------------------------------------
# Running the manifest
# ---------------------------------------------------------------------------


def _format_groups(groups: Sequence[FGModule]) -> str:
    return "[" + ", ".join(str(g) for g in groups) + "]"


def _actual(report: AnalysisReport, prop: str) -> Optional[bool]:
    if prop == "acyclic":
        return report.acyclic
    if prop == "augmentation":
        return report.augmentation is not None
    entry = report.status(prop)
    if entry.status == HOLDS:
        return True
    if entry.status == FAILS:
        return False
    return None


def compare(expectation: FixtureExpectation, report: AnalysisReport) -> List[dict]:
    """Diff rows (fixture, check, expected, actual, match) for one report."""
    rows = [
        {
            "fixture": expectation.name,
            "check": "homology",
            "expected": _format_groups(expectation.homology),
            "actual": _format_groups(report.homology),
            "match": tuple(report.homology) == tuple(expectation.homology),
        }
    ]
    for prop, expected in expectation.properties.items():
        actual = _actual(report, prop)
        rows.append(
            {
                "fixture": expectation.name,
                "check": prop,
                "expected": expected,
                "actual": report.status(prop).status if actual is None else actual,
                "match": actual is expected,
            }
        )
    return rows


def run_examples(budget: int | None = None) -> pd.DataFrame:
    """Analyse every manifest fixture and diff the results against the manifest."""
    started = time.perf_counter()
    rows: List[dict] = []
    for expectation in _MANIFEST:
        doc = load_document(fixture_path(expectation.name))
        report = analyse(to_complex(doc), budget, name=expectation.name, metadata=doc.metadata)
        rows.extend(compare(expectation, report))
    table = pd.DataFrame(rows, columns=["fixture", "check", "expected", "actual", "match"])
    logger.info(
        "Checked %d fixtures in %.2f s: %d of %d checks match",
        len(_MANIFEST),
        time.perf_counter() - started,
        int(table["match"].sum()),
        len(table),
    )
    return table
