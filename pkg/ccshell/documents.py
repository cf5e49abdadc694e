"""``.ccx`` complex documents and certificate JSON.

A document is JSON Lines::

    {"kind": "header", "format_version": "1", "ring": "Z", "metadata": {}}
    {"kind": "degree", "degree": 0, "basis": ["a", "b"]}
    {"kind": "degree", "degree": 1, "basis": ["ab"]}
    {"kind": "boundary", "degree": 1, "from": "ab", "entries": [["a", -1], ["b", 1]]}

Blank lines and lines starting with ``#`` are skipped.  Certificates refer
to basis elements as ``[degree, label]`` pairs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ccshell import config as cfg
from ccshell.classification import Witness
from ccshell.complex import BasisElement, Chain, ChainComplex, build_complex, maximal_elements
from ccshell.cones import ConeAssignment
from ccshell.errors import (
    BoundaryConditionViolated,
    CCShellError,
    ComplexError,
    DanglingReference,
    MalformedCertificate,
    ParseError,
    ValidationError,
)
from ccshell.regularity import RegularOrderCertificate
from ccshell.rings import RATIONALS, RingSpec, Scalar
from ccshell.shelling import ShellingCertificate

logger = logging.getLogger(__name__)

Certificate = Union[ShellingCertificate, RegularOrderCertificate, ConeAssignment]


@dataclass(frozen=True)
class BoundaryColumn:
    degree: int
    source: str
    entries: Tuple[Tuple[str, Scalar], ...]


@dataclass(frozen=True)
class ComplexDocument:
    ring: str
    degrees: Tuple[Tuple[str, ...], ...]
    boundary: Tuple[BoundaryColumn, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)
    format_version: str = cfg.FORMAT_VERSION


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _column_of(line: str, value: Any) -> int:
    position = line.find(json.dumps(value, ensure_ascii=False))
    return position + 1 if position >= 0 else 1


def _scalar_from_json(value: Any, line: str, number: int) -> Scalar:
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(number, _column_of(line, value), f"coefficient {value!r} is not an exact number")


def _require(record: Mapping[str, Any], key: str, kind: type, line: str, number: int) -> Any:
    if key not in record:
        raise ParseError(number, 1, f"missing field {key!r}")
    value = record[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ParseError(number, _column_of(line, value), f"field {key!r} has the wrong type")
    return value


def parse_document(text: str) -> ComplexDocument:
    """Parse ``.ccx`` text.

    Raises
    ------
    ParseError
        For malformed JSON or records, with the 1-based line and column.
    ValidationError
        For duplicate labels, dangling references or missing degrees.
    """
    header: Optional[Dict[str, Any]] = None
    degrees: Dict[int, Tuple[str, ...]] = {}
    columns: List[Tuple[int, BoundaryColumn]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(number, exc.colno, exc.msg) from exc
        if not isinstance(record, dict):
            raise ParseError(number, 1, "each line must be a JSON object")
        kind = record.get("kind")
        if header is None:
            if kind != "header":
                raise ParseError(number, 1, "the first record must be the header")
            header = record
            continue
        if kind == "degree":
            degree = _require(record, "degree", int, line, number)
            basis = _require(record, "basis", list, line, number)
            if not all(isinstance(label, str) for label in basis):
                raise ParseError(number, 1, "basis labels must be strings")
            if degree in degrees:
                raise ValidationError(f"degree {degree} declared twice", degree)
            if len(set(basis)) != len(basis):
                raise ValidationError(f"duplicate labels in degree {degree}", degree)
            degrees[degree] = tuple(basis)
        elif kind == "boundary":
            degree = _require(record, "degree", int, line, number)
            source = _require(record, "from", str, line, number)
            raw = _require(record, "entries", list, line, number)
            entries = []
            for entry in raw:
                if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
                    raise ParseError(number, _column_of(line, entry), "entries are [label, coefficient] pairs")
                entries.append((entry[0], _scalar_from_json(entry[1], line, number)))
            if len({label for label, _ in entries}) != len(entries):
                raise ValidationError(f"column {source} of d_{degree} repeats a label", degree, source)
            columns.append((number, BoundaryColumn(degree, source, tuple(entries))))
        elif kind == "header":
            raise ParseError(number, 1, "a second header record")
        else:
            raise ParseError(number, _column_of(line, kind), f"unknown record kind {kind!r}")

    if header is None:
        raise ParseError(1, 1, "empty document")
    version = str(header.get("format_version", ""))
    if version != cfg.FORMAT_VERSION:
        raise ValidationError(f"unsupported format version {version!r}")
    if not degrees:
        raise ValidationError("no degree records")
    order = max(degrees)
    missing = [nu for nu in range(order + 1) if nu not in degrees]
    if missing or min(degrees) < 0:
        raise ValidationError(f"degrees must run 0..{order} without gaps", missing[0] if missing else None)
    for number, column in columns:
        if not 1 <= column.degree <= order:
            raise ValidationError(f"line {number}: boundary in degree {column.degree}", column.degree)
        if column.source not in degrees[column.degree]:
            raise ValidationError(
                f"line {number}: unknown label {column.source!r} in degree {column.degree}",
                column.degree,
                column.source,
            )
        for label, _ in column.entries:
            if label not in degrees[column.degree - 1]:
                raise ValidationError(
                    f"line {number}: unknown label {label!r} in degree {column.degree - 1}",
                    column.degree,
                    column.source,
                )
    sources = [(c.degree, c.source) for _, c in columns]
    if len(set(sources)) != len(sources):
        raise ValidationError("a boundary column is given twice")
    return ComplexDocument(
        ring=str(header.get("ring", cfg.DEFAULT_RING)),
        degrees=tuple(degrees[nu] for nu in range(order + 1)),
        boundary=tuple(c for _, c in columns),
        metadata=dict(header.get("metadata") or {}),
        format_version=version,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def scalar_to_json(value: Scalar) -> Union[int, str]:
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    return int(value)


def serialize_document(doc: ComplexDocument) -> str:
    """Normalized text: degrees ascending, columns and entries in basis order, zeros dropped."""
    positions = [{label: i for i, label in enumerate(labels)} for labels in doc.degrees]
    lines = [
        json.dumps(
            {
                "kind": "header",
                "format_version": doc.format_version,
                "ring": doc.ring,
                "metadata": dict(doc.metadata),
            },
            ensure_ascii=False,
        )
    ]
    for nu, labels in enumerate(doc.degrees):
        lines.append(json.dumps({"kind": "degree", "degree": nu, "basis": list(labels)}, ensure_ascii=False))
    columns = sorted(doc.boundary, key=lambda c: (c.degree, positions[c.degree][c.source]))
    for column in columns:
        entries = sorted(
            (e for e in column.entries if e[1] != 0),
            key=lambda e: positions[column.degree - 1][e[0]],
        )
        if not entries:
            continue
        record = {
            "kind": "boundary",
            "degree": column.degree,
            "from": column.source,
            "entries": [[label, scalar_to_json(value)] for label, value in entries],
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def to_complex(doc: ComplexDocument, ring: RingSpec | None = None) -> ChainComplex:
    """Build the complex a document describes, optionally over another ring.

    Raises
    ------
    ValidationError
        When the boundary data do not form a chain complex.
    """
    if ring is None:
        ring = RingSpec.parse(doc.ring)
    positions = [{label: i for i, label in enumerate(labels, start=1)} for labels in doc.degrees]
    entries = []
    for column in doc.boundary:
        col = positions[column.degree][column.source]
        for label, value in column.entries:
            if isinstance(value, Fraction) and ring.kind != RATIONALS and value.denominator != 1:
                raise ValidationError(
                    f"coefficient {value} of column {column.source} needs the ring Q",
                    column.degree,
                    column.source,
                )
            entries.append((column.degree, col, positions[column.degree - 1][label], value))
    try:
        return build_complex(ring, [list(labels) for labels in doc.degrees], entries)
    except BoundaryConditionViolated as exc:
        label = doc.degrees[exc.degree + 1][exc.column - 1]
        raise ValidationError(
            f"d_{exc.degree} o d_{exc.degree + 1} is nonzero on column {label}",
            exc.degree + 1,
            label,
        ) from exc
    except ComplexError as exc:
        raise ValidationError(str(exc)) from exc


def document_from_complex(complex_: ChainComplex, metadata: Mapping[str, Any] | None = None) -> ComplexDocument:
    degrees = tuple(tuple(str(e) for e in complex_.basis(nu)) for nu in range(complex_.order + 1))
    columns = []
    for nu in range(1, complex_.order + 1):
        for e in complex_.basis(nu):
            chain = complex_.boundary_of(e)
            if chain.is_zero:
                continue
            entries = tuple(
                (str(f), chain[f]) for f in complex_.basis(nu - 1) if f in chain.coefficients
            )
            columns.append(BoundaryColumn(nu, str(e), entries))
    return ComplexDocument(str(complex_.ring), degrees, tuple(columns), dict(metadata or {}))


def load_document(path: Union[str, Path]) -> ComplexDocument:
    return parse_document(Path(path).read_text(encoding="utf-8"))


def load_complex(path: Union[str, Path], ring: RingSpec | None = None) -> ChainComplex:
    complex_ = to_complex(load_document(path), ring)
    logger.info("Loaded %s: order %d, ranks %s", path, complex_.order, complex_.rank_profile())
    return complex_


def save_document(doc: ComplexDocument, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_document(doc), encoding="utf-8")
    logger.info("Wrote %s", path)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def element_ref(e: BasisElement) -> List[Any]:
    return [e.degree, str(e)]


def _resolve(complex_: ChainComplex, ref: Any) -> BasisElement:
    if not (isinstance(ref, list) and len(ref) == 2 and isinstance(ref[0], int) and isinstance(ref[1], str)):
        raise MalformedCertificate(f"bad element reference {ref!r}")
    try:
        return complex_.find(ref[1], ref[0])
    except CCShellError as exc:
        raise MalformedCertificate(str(exc)) from exc


def _scalar_in(complex_: ChainComplex, value: Any) -> Scalar:
    try:
        if isinstance(value, str):
            value = Fraction(value)
        return complex_.ring.normalize(value)
    except (ValueError, ZeroDivisionError, CCShellError) as exc:
        raise MalformedCertificate(f"bad scalar {value!r}") from exc


def shelling_to_dict(cert: ShellingCertificate) -> Dict[str, Any]:
    return {
        "order": [element_ref(e) for e in cert.gamma_order],
        "sub_shellings": [
            {"element": element_ref(e), "shelling": shelling_to_dict(sub)}
            for e, sub in sorted(cert.sub_shellings.items(), key=lambda item: item[0].key)
        ],
    }


def shelling_from_dict(complex_: ChainComplex, data: Mapping[str, Any]) -> ShellingCertificate:
    try:
        order = tuple(_resolve(complex_, ref) for ref in data["order"])
        subs = {
            _resolve(complex_, item["element"]): shelling_from_dict(complex_, item["shelling"])
            for item in data.get("sub_shellings", [])
        }
    except (KeyError, TypeError) as exc:
        raise MalformedCertificate(f"malformed shelling certificate: {exc}") from exc
    return ShellingCertificate(order, subs)


def _witness_to_dict(witness: Witness) -> Dict[str, Any]:
    return {
        "scale": scalar_to_json(witness.scale),
        "coefficients": [scalar_to_json(c) for c in witness.coefficients],
    }


def regular_to_dict(cert: RegularOrderCertificate) -> Dict[str, Any]:
    witnesses = []
    for (e, f), witness in sorted(
        cert.witnesses.items(), key=lambda item: (item[0][0].key, item[0][1].key if item[0][1] else (-1, 0))
    ):
        entry = {"element": element_ref(e), "face": element_ref(f) if f is not None else None}
        entry.update(_witness_to_dict(witness))
        witnesses.append(entry)
    return {
        "shelling": shelling_to_dict(cert.shelling),
        "degree_orderings": {
            str(nu): [element_ref(e) for e in order] for nu, order in sorted(cert.degree_orderings.items())
        },
        "boundary_shellings": [
            {"element": element_ref(e), "shelling": shelling_to_dict(s)}
            for e, s in sorted(cert.boundary_shellings.items(), key=lambda item: item[0].key)
        ],
        "witnesses": witnesses,
    }


def regular_from_dict(complex_: ChainComplex, data: Mapping[str, Any]) -> RegularOrderCertificate:
    try:
        shelling = shelling_from_dict(complex_, data["shelling"])
        orderings = {
            int(nu): tuple(_resolve(complex_, ref) for ref in refs)
            for nu, refs in data["degree_orderings"].items()
        }
        boundary = {
            _resolve(complex_, item["element"]): shelling_from_dict(complex_, item["shelling"])
            for item in data["boundary_shellings"]
        }
        witnesses = {}
        for item in data.get("witnesses", []):
            face = item.get("face")
            key = (_resolve(complex_, item["element"]), _resolve(complex_, face) if face is not None else None)
            witnesses[key] = Witness(
                _scalar_in(complex_, item["scale"]),
                tuple(_scalar_in(complex_, c) for c in item["coefficients"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedCertificate(f"malformed regular-order certificate: {exc}") from exc
    return RegularOrderCertificate(shelling, orderings, boundary, witnesses)


def cone_to_dict(assign: ConeAssignment) -> Dict[str, Any]:
    return {
        "sets": {
            str(nu): [element_ref(e) for e in sorted(s, key=lambda e: e.key)]
            for nu, s in sorted(assign.sets.items())
        },
        "witnesses": [
            {
                "element": element_ref(e),
                "chain": [
                    [element_ref(f), scalar_to_json(v)]
                    for f, v in sorted(tau.coefficients.items(), key=lambda item: item[0].key)
                ],
            }
            for e, tau in sorted(assign.witnesses.items(), key=lambda item: item[0].key)
        ],
    }


def cone_from_dict(complex_: ChainComplex, data: Mapping[str, Any]) -> ConeAssignment:
    try:
        sets = {
            int(nu): frozenset(_resolve(complex_, ref) for ref in refs) for nu, refs in data["sets"].items()
        }
        witnesses = {}
        for item in data.get("witnesses", []):
            element = _resolve(complex_, item["element"])
            terms = {_resolve(complex_, ref): _scalar_in(complex_, v) for ref, v in item["chain"]}
            witnesses[element] = Chain(element.degree + 1, terms, complex_.ring)
    except (KeyError, TypeError, ValueError, ComplexError) as exc:
        raise MalformedCertificate(f"malformed cone assignment: {exc}") from exc
    return ConeAssignment(sets, witnesses)


def certificate_to_dict(cert: Certificate) -> Dict[str, Any]:
    """Tagged JSON form: ``{"kind": "shelling" | "regular" | "cone", ...}``."""
    if isinstance(cert, ShellingCertificate):
        return {"kind": "shelling", **shelling_to_dict(cert)}
    if isinstance(cert, RegularOrderCertificate):
        return {"kind": "regular", **regular_to_dict(cert)}
    if isinstance(cert, ConeAssignment):
        return {"kind": "cone", **cone_to_dict(cert)}
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def certificate_from_dict(complex_: ChainComplex, data: Mapping[str, Any]) -> Certificate:
    kind = data.get("kind") if isinstance(data, Mapping) else None
    if kind == "shelling":
        return shelling_from_dict(complex_, data)
    if kind == "regular":
        return regular_from_dict(complex_, data)
    if kind == "cone":
        return cone_from_dict(complex_, data)
    raise MalformedCertificate(f"unknown certificate kind {kind!r}")


def load_certificate(path: Union[str, Path], complex_: ChainComplex) -> Certificate:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.colno, exc.msg) from exc
    return certificate_from_dict(complex_, data)


def parse_order(complex_: ChainComplex, spec: str) -> Tuple[BasisElement, ...]:
    """``"natural"`` (Γ in its listed order) or a comma list of labels."""
    if spec.strip() == "natural":
        return tuple(maximal_elements(complex_))
    try:
        return tuple(complex_.find(label.strip()) for label in spec.split(",") if label.strip())
    except DanglingReference as exc:
        raise MalformedCertificate(str(exc)) from exc
