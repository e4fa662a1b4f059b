"""Command-line front end.

``pqkt run <manifest> [--suite NAME]... [--points K] [--seed S] [--tol-scale X] [--out FILE]``
``pqkt catalog list``
``pqkt catalog emit <kind> --n N``

``run`` exits 0 iff no identity failed, 1 otherwise, 2 on bad input.
Worker threads for ``run`` come from ``PQKT_THREADS``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .catalog import DEFAULT_POINTS, DEFAULT_REGION, DEFAULT_SEED, PRESET_NOTES, PRESETS, model_to_spec, preset
from .errors import ManifestError, PQKTError
from .manifest import SUITES, Manifest, load
from .report import build_report, canonical_json, dumps


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="pqkt", description="Verify PQKT identities on polynomial models.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run identity suites on a manifest")
    run.add_argument("manifest", help="path to a JSON manifest")
    run.add_argument("--suite", action="append", choices=SUITES, dest="suites",
                     help="suite to run (repeatable; default: the manifest's selection)")
    run.add_argument("--points", type=_positive_int, help="number of sample points")
    run.add_argument("--seed", type=_nonneg_int, help="sampling seed")
    run.add_argument("--tol-scale", type=_positive_float, default=1.0, help="multiply every identity tolerance")
    run.add_argument("--out", help="write the report here instead of stdout")

    cat = sub.add_parser("catalog", help="list or emit catalog models")
    csub = cat.add_subparsers(dest="action", required=True)
    csub.add_parser("list", help="list the catalog presets")
    emit = csub.add_parser("emit", help="print a manifest for a preset")
    emit.add_argument("kind", choices=sorted(PRESETS))
    emit.add_argument("--n", type=_positive_int, default=2)
    return ap


def emit_manifest(kind, n):
    m = Manifest(model=model_to_spec(preset(kind, n)), count=DEFAULT_POINTS, seed=DEFAULT_SEED,
                 region=DEFAULT_REGION)
    return m.to_dict()


def _run(args, out, err):
    try:
        manifest = load(args.manifest)
        report = build_report(manifest, points=args.points, seed=args.seed,
                              tol_scale=args.tol_scale, suites=args.suites)
    except ManifestError as exc:
        print(f"pqkt: manifest error: {exc}", file=err)
        return 2
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    s = report["summary"]
    c = s["counts"]
    print(f"pqkt: {c['pass']} pass, {c['fail']} fail, {c['indeterminate']} indeterminate, "
          f"{c['not-applicable']} not-applicable", file=err)
    for k in s["failed"]:
        print(f"pqkt: FAIL {k}", file=err)
    return 0 if s["ok"] else 1


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args, out, err)
    if args.action == "list":
        for name in sorted(PRESETS):
            out.write(f"{name:20s} {PRESET_NOTES[name]}\n")
        return 0
    try:
        out.write(canonical_json(emit_manifest(args.kind, args.n)) + "\n")
    except PQKTError as exc:
        print(f"pqkt: {exc}", file=err)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
