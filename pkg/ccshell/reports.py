"""Analysis reports for a single complex.

:func:`analyse` runs every check the package knows and collects the results
in an :class:`AnalysisReport`.  A property that holds carries the
certificate that proves it, so a saved JSON report can be re-verified later
with :func:`recheck` without trusting the search that produced it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import pandas as pd

from ccshell.classification import ElementClass, classify_degree
from ccshell.complex import BasisElement, ChainComplex, is_pure, maximal_elements
from ccshell.cones import ConeAssignment, search_cone, verify_cone
from ccshell.documents import Certificate, certificate_from_dict, certificate_to_dict, element_ref, scalar_to_json
from ccshell.errors import CCShellError, SearchBudgetExceeded
from ccshell.homology import Augmentation, FGModule, build_augmentation, homology, is_acyclic
from ccshell.regularity import (
    RegularOrderCertificate,
    expected_totally_regular_homology,
    first_non_acyclic_subcomplex,
    is_totally_regular,
    search_regular,
    verify_regular,
)
from ccshell.rings import RingSpec
from ccshell.shelling import ShellingCertificate, search_shelling, verify_shelling

logger = logging.getLogger(__name__)

HOLDS = "holds"
FAILS = "fails"
BUDGET_EXCEEDED = "budget-exceeded"

PROPERTIES = ("shelling", "regular", "totally_regular", "cone")


@dataclass(frozen=True)
class PropertyStatus:
    status: str
    certificate: Optional[Certificate] = None
    violation: Optional[str] = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"status": self.status}
        if self.certificate is not None:
            out["certificate"] = certificate_to_dict(self.certificate)
        if self.violation is not None:
            out["violation"] = self.violation
        return out


def _searched(search: Callable[[], Any], absent: str) -> PropertyStatus:
    try:
        found = search()
    except SearchBudgetExceeded as exc:
        logger.warning("%s", exc)
        return PropertyStatus(BUDGET_EXCEEDED, violation=str(exc))
    if found is None:
        return PropertyStatus(FAILS, violation=absent)
    return PropertyStatus(HOLDS, certificate=found)


@dataclass(frozen=True)
class AnalysisReport:
    name: str
    ring: RingSpec
    rank_profile: Tuple[int, ...]
    pure: bool
    gamma: Tuple[BasisElement, ...]
    classification: Mapping[int, Tuple[ElementClass, ...]]
    homology: Tuple[FGModule, ...]
    acyclic: bool
    augmentation: Optional[Augmentation]
    shelling: PropertyStatus
    regular: PropertyStatus
    totally_regular: PropertyStatus
    cone: PropertyStatus
    expected_homology: Optional[Tuple[FGModule, ...]] = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.rank_profile) - 1

    def status(self, prop: str) -> PropertyStatus:
        if prop not in PROPERTIES:
            raise KeyError(prop)
        return getattr(self, prop)

    # -- tables -----------------------------------------------------------------

    def homology_table(self) -> pd.DataFrame:
        """One row per degree: ``degree, free_rank, torsion, group``."""
        return pd.DataFrame(
            [
                {
                    "degree": nu,
                    "free_rank": group.free_rank,
                    "torsion": list(group.torsion),
                    "group": str(group),
                }
                for nu, group in enumerate(self.homology)
            ],
            columns=["degree", "free_rank", "torsion", "group"],
        )

    def classification_table(self) -> pd.DataFrame:
        """One row per maximal element, classified within its degree."""
        rows = []
        for nu, classes in sorted(self.classification.items()):
            for c in classes:
                rows.append(
                    {
                        "degree": nu,
                        "element": str(c.element),
                        "class": c.tag.value,
                        "by_convention": c.by_convention,
                    }
                )
        return pd.DataFrame(rows, columns=["degree", "element", "class", "by_convention"])

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        classification = {}
        for nu, classes in sorted(self.classification.items()):
            classification[str(nu)] = [
                {
                    "element": element_ref(c.element),
                    "class": c.tag.value,
                    "by_convention": c.by_convention,
                    "witness": None
                    if c.witness is None
                    else {
                        "scale": scalar_to_json(c.witness.scale),
                        "coefficients": [scalar_to_json(x) for x in c.witness.coefficients],
                    },
                }
                for c in classes
            ]
        return {
            "name": self.name,
            "ring": str(self.ring),
            "order": self.order,
            "rank_profile": list(self.rank_profile),
            "pure": self.pure,
            "gamma": [element_ref(g) for g in self.gamma],
            "classification": classification,
            "homology": [
                {"degree": nu, "free_rank": g.free_rank, "torsion": list(g.torsion), "group": str(g)}
                for nu, g in enumerate(self.homology)
            ],
            "acyclic": self.acyclic,
            "augmentation": None
            if self.augmentation is None
            else [[element_ref(e), scalar_to_json(v)] for e, v in sorted(
                self.augmentation.values.items(), key=lambda item: item[0].key
            )],
            **{prop: self.status(prop).to_dict() for prop in PROPERTIES},
            "expected_homology": None
            if self.expected_homology is None
            else [str(g) for g in self.expected_homology],
            "metadata": dict(self.metadata),
        }

    def format_text(self) -> str:
        title = self.name or "complex"
        lines = [
            f"{title:=^60}",
            f"ring {self.ring}, order {self.order}, ranks {list(self.rank_profile)}, "
            f"{'pure' if self.pure else 'not pure'}",
            "maximal elements: " + ", ".join(str(g) for g in self.gamma),
            "",
            "Homology",
        ]
        for nu, group in enumerate(self.homology):
            lines.append(f"  H_{nu} = {group}")
        lines.append(f"  acyclic: {'yes' if self.acyclic else 'no'}")
        if self.augmentation is None:
            lines.append("  augmentation: none with all values nonzero")
        else:
            values = ", ".join(f"{e}={v}" for e, v in sorted(
                self.augmentation.values.items(), key=lambda item: item[0].key
            ))
            lines.append(f"  augmentation: {values}")
        lines += ["", "Classification"]
        table = self.classification_table()
        lines += ["  " + line for line in table.to_string(index=False).splitlines()] if not table.empty else ["  (none)"]
        lines += ["", "Properties"]
        for prop in PROPERTIES:
            entry = self.status(prop)
            detail = f" ({entry.violation})" if entry.violation else ""
            lines.append(f"  {prop.replace('_', ' '):<16} {entry.status}{detail}")
            if isinstance(entry.certificate, (ShellingCertificate, RegularOrderCertificate)):
                order = ", ".join(str(g) for g in entry.certificate.gamma_order)
                lines.append(f"  {'':<16} order: {order}")
            elif isinstance(entry.certificate, ConeAssignment):
                sets = "; ".join(
                    f"S_{nu}={{{', '.join(str(e) for e in sorted(s, key=lambda e: e.key))}}}"
                    for nu, s in sorted(entry.certificate.sets.items())
                )
                lines.append(f"  {'':<16} {sets}")
        if self.expected_homology is not None:
            lines.append("  predicted homology: " + ", ".join(str(g) for g in self.expected_homology))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Building and re-checking reports
# ---------------------------------------------------------------------------


def analyse(
    complex_: ChainComplex,
    budget: int | None = None,
    name: str = "",
    metadata: Mapping[str, Any] | None = None,
) -> AnalysisReport:
    """Compute every property of *complex_*.

    Each search gets its own node budget; running out is recorded as
    ``budget-exceeded`` and never as a failure.
    """
    groups = tuple(homology(complex_))
    classification = {
        nu: tuple(classify_degree(complex_, nu)[1]) for nu in range(complex_.order + 1)
    }
    shelling = _searched(lambda: search_shelling(complex_, budget), "no shelling order exists")
    if shelling.status == FAILS:
        regular = PropertyStatus(FAILS, violation="not shellable")
    else:
        regular = _searched(lambda: search_regular(complex_, budget), "no regular order exists")

    expected = None
    if regular.holds:
        if is_totally_regular(complex_, regular.certificate):
            totally = PropertyStatus(HOLDS, certificate=regular.certificate)
            expected = tuple(expected_totally_regular_homology(complex_, regular.certificate))
        else:
            offending = first_non_acyclic_subcomplex(complex_)
            totally = PropertyStatus(FAILS, violation=f"C_{offending} is not acyclic")
    else:
        totally = PropertyStatus(regular.status, violation=regular.violation)

    cone = _searched(lambda: search_cone(complex_, budget), "no cone assignment exists")
    report = AnalysisReport(
        name=name,
        ring=complex_.ring,
        rank_profile=complex_.rank_profile(),
        pure=is_pure(complex_),
        gamma=tuple(maximal_elements(complex_)),
        classification=classification,
        homology=groups,
        acyclic=is_acyclic(complex_),
        augmentation=build_augmentation(complex_),
        shelling=shelling,
        regular=regular,
        totally_regular=totally,
        cone=cone,
        expected_homology=expected,
        metadata=dict(metadata or {}),
    )
    logger.info(
        "Analysed %s: shelling %s, regular %s, totally regular %s, cone %s",
        name or "complex",
        shelling.status,
        regular.status,
        totally.status,
        cone.status,
    )
    return report


def _reverify(complex_: ChainComplex, prop: str, cert: Certificate) -> bool:
    if prop == "shelling":
        return isinstance(cert, ShellingCertificate) and verify_shelling(complex_, cert) is None
    if prop == "regular":
        return isinstance(cert, RegularOrderCertificate) and verify_regular(complex_, cert) is None
    if prop == "totally_regular":
        if not isinstance(cert, RegularOrderCertificate) or verify_regular(complex_, cert) is not None:
            return False
        return is_totally_regular(complex_, cert)
    return isinstance(cert, ConeAssignment) and verify_cone(complex_, cert) is None


def recheck(complex_: ChainComplex, report: Mapping[str, Any]) -> List[Dict[str, Any]]:
    """Re-verify every certificate embedded in a JSON report.

    Returns one row per property whose status is ``holds``: the property name
    and whether its certificate verifies on *complex_*.
    """
    rows = []
    for prop in PROPERTIES:
        entry = report.get(prop) or {}
        if entry.get("status") != HOLDS:
            continue
        data = entry.get("certificate")
        if data is None:
            rows.append({"property": prop, "verified": False, "reason": "no certificate"})
            continue
        try:
            ok = _reverify(complex_, prop, certificate_from_dict(complex_, data))
            reason = "" if ok else "certificate does not verify"
        except CCShellError as exc:
            ok, reason = False, str(exc)
        rows.append({"property": prop, "verified": ok, "reason": reason})
    logger.info("Re-verified %d certificates, %d failed", len(rows), sum(not r["verified"] for r in rows))
    return rows
