"""Command-line entry point for the ccshell package.

Run with::

    python -m ccshell COMMAND COMPLEX [options]

or, if installed::

    ccshell COMMAND COMPLEX [options]

COMPLEX is a ``.ccx`` file or the name of a bundled fixture (``regular_with_loop``).

Commands:

* ``validate``, ``analyse``, ``homology``, ``classify``
* ``shelling verify|search|monotonize``, ``regular verify|search``,
  ``totally-regular``, ``cone verify|search``
* ``skeleton``, ``from-simplicial``, ``examples``, ``check-certificate``
* ``dev fuzz``

Exit codes: 0 when the property holds (or the computation succeeded), 1 when
it provably fails, 2 on input errors and exhausted search budgets.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from ccshell import config as cfg
from ccshell.classification import classify_degree
from ccshell.complex import ChainComplex, from_simplicial, maximal_elements, skeleton
from ccshell.cones import ConeAssignment, ConeViolation, search_cone, simplicial_cone_assignment, verify_cone
from ccshell.documents import (
    ComplexDocument,
    certificate_to_dict,
    document_from_complex,
    load_certificate,
    load_document,
    parse_order,
    save_document,
    serialize_document,
    to_complex,
)
from ccshell.errors import CCShellError, HomologyError, MalformedCertificate, SearchBudgetExceeded
from ccshell.fixtures import fixture_path, run_examples
from ccshell.homology import build_augmentation, homology, reduced_homology
from ccshell.oracle import fuzz
from ccshell.plots import plot_homology
from ccshell.regularity import (
    RegularOrderCertificate,
    complete_regular_order,
    expected_totally_regular_homology,
    first_non_acyclic_subcomplex,
    is_totally_regular,
    search_regular,
    skeleton_regular,
    verify_regular,
)
from ccshell.reports import BUDGET_EXCEEDED, FAILS, HOLDS, PROPERTIES, analyse, recheck
from ccshell.rings import RingSpec
from ccshell.shelling import (
    ShellingCertificate,
    failures,
    monotonize,
    monotonize_steps,
    search_shelling,
    shelling_for_order,
    skeleton_shelling,
    verify_shelling,
)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """What a command produced: exit code, JSON-ready report and text form."""

    exit_code: int
    report: Dict[str, Any] = field(default_factory=dict)
    text: str = ""
    output_format: str = "text"


Outcome = Tuple[int, Dict[str, Any], List[str]]


def _verdict(holds: bool) -> Tuple[int, str]:
    return (cfg.EXIT_HOLDS, HOLDS) if holds else (cfg.EXIT_FAILS, FAILS)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def _open(args: argparse.Namespace) -> Tuple[ComplexDocument, ChainComplex, str]:
    """The document named by ``args.complex``: a file path or a bundled fixture."""
    source = Path(args.complex)
    path = source if source.is_file() else fixture_path(args.complex)
    doc = load_document(path)
    ring = RingSpec.parse(args.ring) if args.ring else None
    complex_ = to_complex(doc, ring)
    name = doc.metadata.get("name") or path.stem
    logger.info("Loaded %s: ring %s, ranks %s", name, complex_.ring, list(complex_.rank_profile()))
    return doc, complex_, name


def _certificate(args: argparse.Namespace, complex_: ChainComplex, kind: type):
    cert = load_certificate(args.certificate, complex_)
    if not isinstance(cert, kind):
        raise MalformedCertificate(f"{args.certificate} holds a {type(cert).__name__}, expected {kind.__name__}")
    return cert


def _shelling_from_args(args: argparse.Namespace, complex_: ChainComplex) -> Optional[ShellingCertificate]:
    if getattr(args, "certificate", None):
        return _certificate(args, complex_, ShellingCertificate)
    if getattr(args, "order", None):
        return shelling_for_order(complex_, parse_order(complex_, args.order), args.budget)
    return None


def _order_line(order) -> str:
    return "order: " + ", ".join(str(g) for g in order)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> Outcome:
    doc, complex_, name = _open(args)
    gamma = maximal_elements(complex_)
    report = {
        "name": name,
        "valid": True,
        "ring": str(complex_.ring),
        "order": complex_.order,
        "rank_profile": list(complex_.rank_profile()),
        "gamma": [str(g) for g in gamma],
    }
    lines = [
        f"{name}: valid complex over {complex_.ring}",
        f"order {complex_.order}, ranks {list(complex_.rank_profile())}",
        "maximal elements: " + ", ".join(str(g) for g in gamma),
    ]
    return cfg.EXIT_HOLDS, report, lines


def _cmd_analyse(args: argparse.Namespace) -> Outcome:
    doc, complex_, name = _open(args)
    report = analyse(complex_, args.budget, name=name, metadata=doc.metadata)
    if args.plot:
        plot_homology(
            report.homology, report.expected_homology, f"Homology of {name} over {complex_.ring}", args.plot
        )
    exceeded = any(report.status(prop).status == BUDGET_EXCEEDED for prop in PROPERTIES)
    return (cfg.EXIT_ERROR if exceeded else cfg.EXIT_HOLDS), report.to_dict(), [report.format_text()]


def _cmd_homology(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    if args.reduced:
        augmentation = build_augmentation(complex_)
        if augmentation is None:
            raise HomologyError("no augmentation with all values nonzero exists")
        groups = reduced_homology(complex_, augmentation)
        symbol = "H~"
    else:
        groups = homology(complex_)
        symbol = "H"
    if args.plot:
        plot_homology(groups, title=f"Homology of {name} over {complex_.ring}", output_path=args.plot)
    report = {
        "name": name,
        "ring": str(complex_.ring),
        "reduced": args.reduced,
        "homology": [
            {"degree": nu, "free_rank": g.free_rank, "torsion": list(g.torsion), "group": str(g)}
            for nu, g in enumerate(groups)
        ],
    }
    lines = [f"{symbol}_{nu} = {g}" for nu, g in reversed(list(enumerate(groups)))]
    return cfg.EXIT_HOLDS, report, lines


def _cmd_classify(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    rows = []
    for nu in range(complex_.order + 1):
        _, classes = classify_degree(complex_, nu)
        rows += [
            {"degree": nu, "element": str(c.element), "class": c.tag.value, "by_convention": c.by_convention}
            for c in classes
        ]
    lines = [
        f"{row['element']:<10} {row['class']}{' (first position)' if row['by_convention'] else ''}"
        for row in rows
    ]
    return cfg.EXIT_HOLDS, {"name": name, "classification": rows}, lines


def _cmd_shelling(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    if args.action == "search":
        cert = search_shelling(complex_, args.budget)
        if cert is None:
            return cfg.EXIT_FAILS, {"name": name, "status": FAILS}, ["no shelling order exists"]
        return (
            cfg.EXIT_HOLDS,
            {"name": name, "status": HOLDS, "certificate": certificate_to_dict(cert)},
            ["shellable", _order_line(cert.gamma_order)],
        )

    cert = _shelling_from_args(args, complex_)
    if args.action == "verify":
        if cert is None:
            raise MalformedCertificate("shelling verify needs --certificate or --order")
        violation = verify_shelling(complex_, cert)
        code, status = _verdict(violation is None)
        report: Dict[str, Any] = {"name": name, "status": status}
        if violation is not None:
            report["violation"] = violation.describe()
            return code, report, [f"not a shelling: {violation.describe()}"]
        report["certificate"] = certificate_to_dict(cert)
        return code, report, ["valid shelling", _order_line(cert.gamma_order)]

    # monotonize
    if cert is None:
        cert = search_shelling(complex_, args.budget)
        if cert is None:
            return cfg.EXIT_FAILS, {"name": name, "status": FAILS}, ["no shelling order exists"]
    lines = [f"start: {len(failures(cert))} failures; {_order_line(cert.gamma_order)}"]
    final = cert
    for step, final in enumerate(monotonize_steps(complex_, cert, args.budget), start=1):
        lines.append(f"swap {step}: {len(failures(final))} failures; {_order_line(final.gamma_order)}")
    report = {"name": name, "status": HOLDS, "swaps": len(lines) - 1, "certificate": certificate_to_dict(final)}
    return cfg.EXIT_HOLDS, report, lines


def _cmd_regular(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    if args.action == "search":
        cert = search_regular(complex_, args.budget)
        if cert is None:
            return cfg.EXIT_FAILS, {"name": name, "status": FAILS}, ["no regular order exists"]
        return (
            cfg.EXIT_HOLDS,
            {"name": name, "status": HOLDS, "certificate": certificate_to_dict(cert)},
            ["regular", _order_line(cert.gamma_order)],
        )

    if args.certificate:
        cert = _certificate(args, complex_, RegularOrderCertificate)
        violation = verify_regular(complex_, cert)
    elif args.order:
        shelling = shelling_for_order(complex_, parse_order(complex_, args.order), args.budget)
        completed = complete_regular_order(complex_, shelling, args.budget)
        if isinstance(completed, RegularOrderCertificate):
            cert, violation = completed, None
        else:
            cert, violation = None, completed
    else:
        raise MalformedCertificate("regular verify needs --certificate or --order")
    code, status = _verdict(violation is None)
    if violation is not None:
        return code, {"name": name, "status": status, "violation": violation.describe()}, [
            f"not a regular order: {violation.describe()}"
        ]
    return (
        code,
        {"name": name, "status": status, "certificate": certificate_to_dict(cert)},
        ["regular order", _order_line(cert.gamma_order)],
    )


def _cmd_totally_regular(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    if args.certificate:
        cert = _certificate(args, complex_, RegularOrderCertificate)
        violation = verify_regular(complex_, cert)
        if violation is not None:
            return cfg.EXIT_FAILS, {"name": name, "status": FAILS, "violation": violation.describe()}, [
                f"not a regular order: {violation.describe()}"
            ]
    else:
        cert = search_regular(complex_, args.budget)
        if cert is None:
            return cfg.EXIT_FAILS, {"name": name, "status": FAILS, "violation": "no regular order exists"}, [
                "not totally regular: no regular order exists"
            ]
    if not is_totally_regular(complex_, cert):
        offending = first_non_acyclic_subcomplex(complex_)
        detail = f"C_{offending} is not acyclic"
        return cfg.EXIT_FAILS, {"name": name, "status": FAILS, "violation": detail}, [
            f"not totally regular: {detail}"
        ]
    expected = expected_totally_regular_homology(complex_, cert)
    report = {
        "name": name,
        "status": HOLDS,
        "certificate": certificate_to_dict(cert),
        "expected_homology": [str(g) for g in expected],
    }
    lines = ["totally regular", _order_line(cert.gamma_order)]
    lines += [f"predicted H_{nu} = {g}" for nu, g in enumerate(expected)]
    return cfg.EXIT_HOLDS, report, lines


def _cone_lines(assign: ConeAssignment) -> List[str]:
    return [
        f"S_{nu} = {{{', '.join(str(e) for e in sorted(s, key=lambda e: e.key))}}}"
        for nu, s in sorted(assign.sets.items())
    ]


def _cmd_cone(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    if args.action == "search":
        assign = search_cone(complex_, args.budget)
        if assign is None:
            return cfg.EXIT_FAILS, {"name": name, "status": FAILS}, ["no cone assignment exists"]
        return (
            cfg.EXIT_HOLDS,
            {"name": name, "status": HOLDS, "certificate": certificate_to_dict(assign)},
            ["cone"] + _cone_lines(assign),
        )

    if args.certificate:
        assign = _certificate(args, complex_, ConeAssignment)
        violation = verify_cone(complex_, assign)
    elif args.apex:
        built = simplicial_cone_assignment(complex_, args.apex)
        if isinstance(built, ConeViolation):
            assign, violation = None, built
        else:
            assign, violation = built, verify_cone(complex_, built)
    else:
        raise MalformedCertificate("cone verify needs --certificate or --apex")
    code, status = _verdict(violation is None)
    if violation is not None:
        return code, {"name": name, "status": status, "violation": violation.describe()}, [
            f"not a cone: {violation.describe()}"
        ]
    return (
        code,
        {"name": name, "status": status, "certificate": certificate_to_dict(assign)},
        ["cone"] + _cone_lines(assign),
    )


def _cmd_skeleton(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    sk = skeleton(complex_, args.degree)
    report: Dict[str, Any] = {
        "name": name,
        "degree": args.degree,
        "rank_profile": list(sk.rank_profile()),
    }
    lines = [f"{args.degree}-skeleton of {name}: ranks {list(sk.rank_profile())}"]
    if args.certificate:
        cert = load_certificate(args.certificate, complex_)
        if isinstance(cert, RegularOrderCertificate):
            lowered = skeleton_regular(complex_, cert, args.degree, args.budget)
        elif isinstance(cert, ShellingCertificate):
            lowered = skeleton_shelling(complex_, monotonize(complex_, cert, args.budget), args.degree, args.budget)
        else:
            raise MalformedCertificate("skeleton certificates must be shellings or regular orders")
        report["certificate"] = certificate_to_dict(lowered)
        lines.append(_order_line(lowered.gamma_order))
    out = document_from_complex(sk, {"name": f"{name}_sk{args.degree}", "skeleton_of": name, "degree": args.degree})
    if args.output:
        save_document(out, args.output)
        lines.append(f"written to {args.output}")
    else:
        lines.append(serialize_document(out).rstrip("\n"))
    return cfg.EXIT_HOLDS, report, lines


def _parse_facets(spec: str) -> List[List[str]]:
    """Facets from a file (one per line) or inline ``"1,2,3;3,4"``."""
    path = Path(spec)
    text = path.read_text(encoding="utf-8") if path.is_file() else spec.replace(";", "\n")
    facets = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            facets.append([v for v in line.replace(",", " ").split() if v])
    return facets


def _cmd_from_simplicial(args: argparse.Namespace) -> Outcome:
    facets = _parse_facets(args.facets)
    complex_ = from_simplicial(facets)
    doc = document_from_complex(complex_, {"name": args.name or "simplicial", "facets": len(facets)})
    report = {"rank_profile": list(complex_.rank_profile()), "facets": len(facets)}
    if args.output:
        save_document(doc, args.output)
        return cfg.EXIT_HOLDS, report, [f"ranks {list(complex_.rank_profile())}, written to {args.output}"]
    return cfg.EXIT_HOLDS, report, [serialize_document(doc).rstrip("\n")]


def _cmd_examples(args: argparse.Namespace) -> Outcome:
    table = run_examples(args.budget)
    matched = bool(table["match"].all())
    report = {"all_match": matched, "rows": table.astype({"expected": str, "actual": str}).to_dict("records")}
    lines = [table.to_string(index=False), "", f"{int(table['match'].sum())}/{len(table)} checks match"]
    return (cfg.EXIT_HOLDS if matched else cfg.EXIT_FAILS), report, lines


def _cmd_check_certificate(args: argparse.Namespace) -> Outcome:
    _, complex_, name = _open(args)
    data = json.loads(Path(args.report).read_text(encoding="utf-8"))
    rows = recheck(complex_, data)
    ok = all(row["verified"] for row in rows)
    lines = [
        f"{row['property']:<16} {'verified' if row['verified'] else 'REJECTED'} {row['reason']}".rstrip()
        for row in rows
    ] or ["no certificates to check"]
    return (cfg.EXIT_HOLDS if ok else cfg.EXIT_FAILS), {"name": name, "checks": rows}, lines


def _cmd_dev(args: argparse.Namespace) -> Outcome:
    table = fuzz(args.count, args.seed, args.budget)
    summary = table.groupby("check")["ok"].agg(["count", "sum"]).rename(columns={"sum": "agree"})
    summary["disagree"] = summary["count"] - summary["agree"]
    disagreements = table[~table["ok"]]
    report = {
        "instances": args.count,
        "seed": args.seed,
        "summary": {
            check: {key: int(value) for key, value in row.items()} for check, row in summary.iterrows()
        },
        "disagreements": disagreements.to_dict("records"),
    }
    lines = [summary.to_string()]
    if not disagreements.empty:
        lines += ["", "Disagreements", disagreements.to_string(index=False)]
    return (cfg.EXIT_FAILS if len(disagreements) else cfg.EXIT_HOLDS), report, lines


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default=None, help="Re-read coefficients over Z, Q or Fp:<p>")
    common.add_argument(
        "--budget",
        type=int,
        default=None,
        metavar="NODES",
        help=f"Search node budget (default: ${cfg.BUDGET_ENV_VAR} or {cfg.DEFAULT_NODE_BUDGET})",
    )
    common.add_argument("--format", choices=["text", "json"], default="text", help="Output format")
    common.add_argument(
        "--seed", type=int, default=0, help="Seed for generated instances; only 'dev fuzz' reads it (default: 0)"
    )
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors")

    parser = argparse.ArgumentParser(
        prog="ccshell",
        description="Homology, shellings, regular orders and cones of chain complexes with fixed bases.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], Outcome], help_: str, complex_arg: bool = True):
        sub = commands.add_parser(name, parents=[common], help=help_)
        if complex_arg:
            sub.add_argument("complex", help="A .ccx file or the name of a bundled fixture")
        sub.set_defaults(handler=handler)
        return sub

    command("validate", _cmd_validate, "Parse and validate a complex")
    command("analyse", _cmd_analyse, "Full analysis report").add_argument(
        "--plot", metavar="FILE", default=None, help="Save a homology bar chart to FILE"
    )
    hom = command("homology", _cmd_homology, "Homology groups via Smith normal form")
    hom.add_argument("--reduced", action="store_true", help="Reduced homology (needs an augmentation)")
    hom.add_argument("--plot", metavar="FILE", default=None, help="Save a homology bar chart to FILE")
    command("classify", _cmd_classify, "Critical / precritical / noncritical maximal elements")

    # ── Certificate-carrying properties ──────────────────────────────────────
    for name, handler, actions in (
        ("shelling", _cmd_shelling, ["verify", "search", "monotonize"]),
        ("regular", _cmd_regular, ["verify", "search"]),
        ("cone", _cmd_cone, ["verify", "search"]),
    ):
        sub = commands.add_parser(name, help=f"{name.capitalize()} certificates")
        actions_parser = sub.add_subparsers(dest="action", required=True)
        for action in actions:
            act = actions_parser.add_parser(action, parents=[common])
            act.add_argument("complex", help="A .ccx file or the name of a bundled fixture")
            act.set_defaults(handler=handler)
            if action == "search":
                continue
            act.add_argument("--certificate", metavar="FILE", default=None, help="JSON certificate")
            if name == "cone":
                act.add_argument("--apex", default=None, help="Simplicial apex vertex")
            else:
                act.add_argument("--order", default=None, help="'natural' or a comma list of labels")

    command("totally-regular", _cmd_totally_regular, "Totally regular check with predicted homology").add_argument(
        "--certificate", metavar="FILE", default=None, help="JSON regular-order certificate"
    )

    # ── Constructions and maintenance ────────────────────────────────────────
    sk = command("skeleton", _cmd_skeleton, "The i-skeleton and its inherited certificate")
    sk.add_argument("--degree", type=int, required=True, help="Skeleton degree i")
    sk.add_argument("--certificate", metavar="FILE", default=None, help="Shelling or regular-order certificate")
    sk.add_argument("--output", metavar="FILE", default=None, help="Write the skeleton document to FILE")

    simp = command("from-simplicial", _cmd_from_simplicial, "Build a document from facets", complex_arg=False)
    simp.add_argument("facets", help="Facet file (one per line) or inline '1,2,3;3,4'")
    simp.add_argument("--name", default=None, help="Metadata name")
    simp.add_argument("--output", metavar="FILE", default=None, help="Write the document to FILE")

    command("examples", _cmd_examples, "Check every bundled fixture", complex_arg=False)
    command("check-certificate", _cmd_check_certificate, "Re-verify certificates in a JSON report").add_argument(
        "report", help="JSON report written by 'analyse --format json'"
    )

    dev = commands.add_parser("dev", help="Developer tools")
    dev_actions = dev.add_subparsers(dest="action", required=True)
    fz = dev_actions.add_parser("fuzz", parents=[common], help="Cross-check searches against the oracles")
    fz.add_argument("--count", type=int, default=50, help="Number of generated instances (default: 50)")
    fz.set_defaults(handler=_cmd_dev)
    return parser


def run_command(argv: list[str] | None = None) -> CommandResult:
    """Parse *argv* and run one command; errors become exit code 2."""
    args = _build_parser().parse_args(argv)
    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)
    # ── Resolve the node budget once ──────────────────────────────────────────
    try:
        args.budget = cfg.resolve_budget(args.budget)
        code, report, lines = args.handler(args)
    except CCShellError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        status = BUDGET_EXCEEDED if isinstance(exc, SearchBudgetExceeded) else "error"
        report = {"status": status, "error": type(exc).__name__, "message": str(exc)}
        return CommandResult(cfg.EXIT_ERROR, report, f"error: {exc}", args.format)
    except (OSError, ValueError) as exc:
        logger.error("%s", exc)
        return CommandResult(
            cfg.EXIT_ERROR,
            {"status": "error", "error": type(exc).__name__, "message": str(exc)},
            f"error: {exc}",
            args.format,
        )
    return CommandResult(code, report, "\n".join(lines), args.format)


def main(argv: list[str] | None = None) -> int:
    result = run_command(argv)
    if result.output_format == "json":
        print(json.dumps(result.report, indent=2, default=str))
    elif result.text:
        print(result.text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
