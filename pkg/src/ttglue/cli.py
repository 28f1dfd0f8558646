"""Command-line driver.

Exit status: 0 when every requested check passes, 1 when some check
fails, 2 on malformed input or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import catalog, documents, gluing
from .dot import emit_dot
from .errors import TTGlueError
from .reports import CheckReport, report_document

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_SUBSET_CHECKS = {"tiv", "bounds"}
_MAP_CHECKS = {"tiv-strong", "homeo", "recover", "closed", "pushout"}


class InputError(TTGlueError):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--max-exhaustive", type=int, default=gluing.DEFAULT_MAX_EXHAUSTIVE, metavar="N",
                   help="largest |X| swept over all subsets (default %(default)s)")
    p.add_argument("--trunc", type=int, default=catalog.DEFAULT_TRUNCATION, metavar="N",
                   help="height cutoff for truncated catalog spaces (default %(default)s)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--stable", action="store_true", help="omit timings from reports")
    p.add_argument("-o", "--output", metavar="FILE", help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="ttglue",
        description="Check gluing and Tate-support statements on finite spectral-space models.",
        epilog="exit status: 0 all checks pass, 1 a check failed, 2 malformed input",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a space document")
    p.add_argument("space")

    p = sub.add_parser("glue", parents=[common], help="glue a datum into a space document")
    p.add_argument("datum")

    p = sub.add_parser("check", parents=[common], help="run one check")
    p.add_argument("which", choices=sorted(_SUBSET_CHECKS | _MAP_CHECKS))
    p.add_argument("space")
    p.add_argument("Y", help="subset document")
    p.add_argument("third", metavar="S_or_phi",
                   help="subset document (tiv, bounds) or map document (the others)")

    p = sub.add_parser("tate-support", parents=[common], help="image of phi minus Y")
    p.add_argument("space")
    p.add_argument("Y")
    p.add_argument("phi")

    p = sub.add_parser("catalog", parents=[common], help="run the worked examples")
    p.add_argument("action", choices=["run", "list"])
    p.add_argument("name", nargs="?", default="all")

    p = sub.add_parser("emit-dot", parents=[common], help="Hasse diagram in DOT")
    p.add_argument("space")
    p.add_argument("--highlight", action="append", default=[], metavar="LABEL=SUBSET_FILE")
    return parser


# -- helpers -----------------------------------------------------------------


def _space(path):
    return documents.load_space(documents.read_bytes(path))


def _subset(path, X):
    return documents.load_subset(documents.read_bytes(path), X)


def _write(args, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _emit_reports(args, reports: list[CheckReport], extra: dict | None = None) -> int:
    doc = report_document(reports, stable=args.stable)
    if extra:
        doc.update(extra)
    if args.format == "json":
        _write(args, documents.report_bytes(doc))
    else:
        lines = [r.line() for r in sorted(reports, key=lambda r: r.name)]
        lines.append("PASS" if doc["passed"] else "FAIL")
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK if doc["passed"] else EXIT_FAIL


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    rep = CheckReport("validate")
    try:
        model, load = documents.load_space_with_report(documents.read_bytes(args.space))
    except documents.DocumentError as exc:
        if exc.witness is None:
            raise
        rep.fail({"location": exc.location, "message": str(exc), "witness": exc.witness})
        return _emit_reports(args, [rep])
    rep.details = {
        "points": len(model.points),
        "basics": len(model.basics),
        "added_basics": load.added_basics,
        "covers_expanded": load.covers_expanded,
    }
    return _emit_reports(args, [rep])


def cmd_glue(args) -> int:
    datum = documents.load_datum(documents.read_bytes(args.datum))
    glued = gluing.glue_spaces(datum)
    _write(args, documents.save_space(glued.space))
    return EXIT_OK


def cmd_check(args) -> int:
    X = _space(args.space)
    Y = _subset(args.Y, X)
    if args.which in _SUBSET_CHECKS:
        S = _subset(args.third, X)
        fn = gluing.check_tiv if args.which == "tiv" else gluing.bounds_report
        return _emit_reports(args, [fn(X, Y, S)])
    phi = documents.load_map(documents.read_bytes(args.third), X)
    if args.which == "homeo":
        rep = gluing.check_homeo_over_y(X, Y, phi)
    elif args.which == "tiv-strong":
        rep = gluing.check_tiv_strong(X, Y, phi)
    elif args.which == "recover":
        rep = gluing.check_recover_specializations(X, Y, phi, args.max_exhaustive)
    elif args.which == "closed":
        rep = gluing.check_closed_determined(X, Y, phi, args.max_exhaustive)
    else:
        datum, u_embed, y_embed = gluing.restriction_datum(X, Y, phi)
        rep = gluing.check_pushout(datum, X, u_embed, y_embed)
    return _emit_reports(args, [rep])


def cmd_tate_support(args) -> int:
    X = _space(args.space)
    Y = _subset(args.Y, X)
    phi = documents.load_map(documents.read_bytes(args.phi), X)
    rep = CheckReport("tate-support")
    rep.details["support"] = gluing.tate_support_of_map(X, Y, phi)
    return _emit_reports(args, [rep])


def cmd_catalog(args) -> int:
    if args.action == "list":
        _write(args, "\n".join(catalog.CATALOG) + "\n")
        return EXIT_OK
    names = None if args.name == "all" else [args.name]
    try:
        packages = catalog.build_catalog(names, trunc=args.trunc)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    reports, summary = [], []
    for pkg in packages:
        reps = catalog.run_package_checks(pkg, args.max_exhaustive)
        reports += reps
        summary.append({"name": pkg.name, "passed": all(r.ok for r in reps), "checks": len(reps)})
    return _emit_reports(args, reports, {"packages": sorted(summary, key=lambda d: d["name"])})


def cmd_emit_dot(args) -> int:
    X = _space(args.space)
    highlight = {}
    for item in args.highlight:
        label, sep, path = item.partition("=")
        if not sep or not label:
            raise InputError(f"--highlight expects LABEL=FILE, got {item!r}")
        highlight[label] = _subset(path, X)
    _write(args, emit_dot(X, highlight))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "glue": cmd_glue,
    "check": cmd_check,
    "tate-support": cmd_tate_support,
    "catalog": cmd_catalog,
    "emit-dot": cmd_emit_dot,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (TTGlueError, KeyError) as exc:
        print(f"ttglue: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
