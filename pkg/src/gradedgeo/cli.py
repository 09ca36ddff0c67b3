"""Command line interface.

Exit status: 0 when every check passes, 1 when a check fails or a
construction is rejected, 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .bundle import (
    associated_bundle,
    check_atlas_cocycle,
    check_bundle_cocycle,
    frame_bundle,
    glue_principal,
    tangent_bundle,
    trivialize_from_section,
    validate_vector_bundle,
)
from .calculus import euler_field, weight_of
from .coeff import NumericPolicy
from .errors import GradedError, RejectedError
from .group import check_action_axioms, check_group_axioms, sample_freeness
from .manifest import (
    atlas_to_document,
    bundle_to_document,
    dump_document,
    load_manifest,
    vector_bundle_to_document,
)
from .parser import format_series, parse_expression
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _common(p):
    p.add_argument("--truncation", type=int, default=None, metavar="T",
                   help="truncation order (default: manifest value, else 6)")
    p.add_argument("--seed", type=int, default=42, help="sampling seed (default 42)")
    p.add_argument("--samples", type=int, default=8, help="samples for numeric comparison (default 8)")
    p.add_argument("--tolerance", type=float, default=1e-9, help="relative tolerance (default 1e-9)")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(prog="gradedgeo", description="Checks and constructions for Z2^n-graded geometry.")
    ap.add_argument("--version", action="version", version=f"gradedgeo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def cmd(name, help_text, manifest=True):
        p = sub.add_parser(name, help=help_text)
        if manifest:
            p.add_argument("manifest", help="manifest file (or the name of a shipped fixture)")
        _common(p)
        return p

    cmd("check-atlas", "atlas cocycle: identity, pair and triple conditions")
    cmd("check-cocycle", "every cocycle in the manifest (atlas, principal, vector bundle)")
    cmd("check-group", "group axioms of the manifest's group")
    p = cmd("check-action", "action axioms (and sampled freeness) of the manifest's action")
    p.add_argument("--freeness", action="store_true", help="also sample for freeness")
    p = cmd("glue", "glue the principal bundle (or the associated bundle with --associated)")
    p.add_argument("--associated", action="store_true", help="glue P x_G F using the manifest's left action")
    p.add_argument("-o", "--output", help="write the glued atlas manifest here")
    p = cmd("build-tangent", "tangent bundle of the atlas")
    p.add_argument("-o", "--output", help="write the vector bundle manifest here")
    p = cmd("build-frame", "frame bundle of the manifest's vector bundle (tangent bundle if none)")
    p.add_argument("-o", "--output", help="write the principal bundle manifest here")
    cmd("trivialize", "trivialize the principal bundle from the manifest's section")
    for name, text in (("eval", "parse and normalize an expression"),
                       ("weight", "Euler weight of an expression")):
        p = sub.add_parser(name, help=text)
        p.add_argument("expression")
        p.add_argument("--chart", required=True, help="chart the expression lives on")
        p.add_argument("--manifest", required=True, help="manifest defining the chart")
        if name == "weight":
            p.add_argument("--coordinates", help="comma-separated coordinates to weigh (default: all)")
        _common(p)
    return ap


def _policy(args) -> NumericPolicy:
    if args.samples < 1 or args.tolerance <= 0:
        raise _Usage("--samples must be positive and --tolerance > 0")
    return NumericPolicy(seed=args.seed, samples=args.samples, tolerance=args.tolerance)


def _emit(args, out, reports: list, extra: dict | None = None) -> int:
    ok = all(r.ok for r in reports)
    if args.json:
        payload = {"ok": ok, "reports": [r.to_dict() for r in reports]}
        if extra:
            payload.update(extra)
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        for r in reports:
            out.write(r.to_text() + "\n")
        for k, v in sorted((extra or {}).items()):
            if k != "manifest":
                out.write(f"{k}: {v}\n")
    return EXIT_OK if ok else EXIT_FAIL


def _write(args, out, doc: dict) -> dict:
    text = dump_document(doc)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        return {"written": args.output}
    if not args.json:
        out.write(text + "\n")
        return {}
    return {"manifest": doc}


def _run(args, out) -> int:
    policy = _policy(args)
    if args.truncation is not None and args.truncation < 0:
        raise _Usage("--truncation must be nonnegative")
    if args.command in ("eval", "weight"):
        s = load_manifest(args.manifest, args.truncation, policy)
        ch = s.chart(args.chart)
        f = parse_expression(args.expression, ch)
        if args.command == "eval":
            from .algebra import degree_of

            d = degree_of(f)
            deg = d if isinstance(d, str) else list(d)
            if args.json:
                out.write(json.dumps({"chart": ch.name, "degree": deg, "series": format_series(f)}, sort_keys=True) + "\n")
            else:
                out.write(format_series(f) + "\n")
            return EXIT_OK
        coords = args.coordinates.split(",") if args.coordinates else None
        if coords:
            for c in coords:
                if not ch.has(c):
                    raise _Usage(f"{c!r} is not a coordinate of chart {ch.name}")
        w = weight_of(f, euler_field(ch, coords), policy)
        shown = None if w is None else str(w)
        if args.json:
            out.write(json.dumps({"homogeneous": w is not None, "weight": shown}, sort_keys=True) + "\n")
        else:
            out.write(("not homogeneous" if w is None else f"weight {shown}") + "\n")
        return EXIT_OK if w is not None else EXIT_FAIL

    s = load_manifest(args.manifest, args.truncation, policy)
    T = s.truncation
    if args.command == "check-atlas":
        return _emit(args, out, [check_atlas_cocycle(s.atlas, T, policy)])
    if args.command == "check-cocycle":
        reps = [check_atlas_cocycle(s.atlas, T, policy)]
        if s.bundle is not None:
            reps.append(check_bundle_cocycle(s.bundle, T, policy))
        if s.vector_bundle is not None:
            reps.append(validate_vector_bundle(s.vector_bundle, T, policy))
        return _emit(args, out, reps)
    if args.command == "check-group":
        if s.law is None:
            raise _Usage("manifest has no group")
        return _emit(args, out, [check_group_axioms(s.law, T, policy)])
    if args.command == "check-action":
        if s.action is None:
            raise _Usage("manifest has no action")
        reps = [check_action_axioms(s.action, T, policy)]
        if args.freeness:
            reps.append(sample_freeness(s.action, samples=policy.samples, seed=policy.seed, policy=policy))
        return _emit(args, out, reps)
    if args.command == "glue":
        if s.bundle is None:
            raise _Usage("manifest has no bundle transitions")
        if args.associated:
            if s.action is None:
                raise _Usage("manifest has no action")
            glued = associated_bundle(s.bundle, s.action, T, policy)
        else:
            glued = glue_principal(s.bundle, T, policy)
        rep = check_atlas_cocycle(glued, T, policy)
        return _emit(args, out, [rep], _write(args, out, atlas_to_document(glued)))
    if args.command == "build-tangent":
        vb = tangent_bundle(s.atlas)
        rep = validate_vector_bundle(vb, T, policy)
        return _emit(args, out, [rep], _write(args, out, vector_bundle_to_document(vb)))
    if args.command == "build-frame":
        vb = s.vector_bundle if s.vector_bundle is not None else tangent_bundle(s.atlas)
        fr = frame_bundle(vb, T, policy)
        rep = check_bundle_cocycle(fr, T, policy)
        return _emit(args, out, [rep], _write(args, out, bundle_to_document(fr)))
    if args.command == "trivialize":
        if s.bundle is None or s.section is None:
            raise _Usage("manifest needs bundle transitions and a section")
        triv = trivialize_from_section(s.bundle, s.section, T, policy)
        return _emit(args, out, [triv.report])
    raise _Usage(f"unknown command {args.command}")


def run_command(argv=None, out=None, err=None) -> int:
    """Run the CLI with ``argv``; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _Usage as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return _run(args, out)
    except _Usage as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except RejectedError as exc:
        reps = [exc.report] if isinstance(exc.report, Report) else []
        if not reps or reps[0].ok:
            rep = Report("rejected")
            rep.fail("rejected", (), None, str(exc))
            reps.append(rep)
        extra = {"rejected": str(exc)}
        if exc.witness is not None:
            extra["witness"] = list(exc.witness)
        _emit(args, out, reps, extra)
        return EXIT_FAIL
    except (GradedError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
