"""Command-line interface: ``oradius {eval,verify,sweep,witness,range,list}``.

Exit codes: 0 success (bound holds or is tight), 1 violation found,
2 input or precondition error. Every run prints the resolved seed on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bounds import BoundParams, evaluate_bound, get_bound, list_bounds, parse_fg
from .errors import ManifestError, MissingInput, OradiusError, ParamOutOfRange
from .harness import (
    CSV_COLUMNS,
    ENSEMBLES,
    format_csv,
    format_manifest,
    parse_manifest,
    report_row,
    run_campaign,
    witness_search,
    write_atomic,
    write_campaign,
)
from .io import format_matrix, read_matrix
from .orlicz import parse_phi
from .radius import numerical_radius, range_boundary_samples

DEFAULT_SEED = 1
EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _resolve_seed(flag: Optional[int], fallback: int = DEFAULT_SEED) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("ORADIUS_SEED")
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise ParamOutOfRange(f"ORADIUS_SEED={env!r} is not an integer") from None
    return fallback


def _announce_seed(seed: int) -> None:
    print(f"# seed={seed}", file=sys.stderr)


def _params(args, bound_id: str) -> BoundParams:
    get_bound(bound_id)
    phi = parse_phi(args.phi) if args.phi else None
    # without --psi the catalog uses the convex conjugate of phi
    psi = parse_phi(args.psi) if args.psi else None
    fg = parse_fg(args.fg, args.alpha) if args.fg else None
    return BoundParams(alpha=args.alpha, r=args.r, phi=phi, psi=psi, fg=fg)


def _inputs_from_files(bound_id: str, files: Sequence[str]) -> dict:
    """Files map to roles in catalog order; family bounds take whole groups of roles."""
    desc = get_bound(bound_id)
    mats = [read_matrix(f) for f in files]
    k = len(desc.inputs)
    if desc.family:
        if not mats or len(mats) % k:
            raise MissingInput(f"{bound_id} takes groups of {k} files ({', '.join(desc.inputs)}); got {len(mats)}")
        groups = [mats[i : i + k] for i in range(0, len(mats), k)]
        return {role: [g[j] for g in groups] for j, role in enumerate(desc.inputs)}
    if len(mats) > k:
        raise MissingInput(f"{bound_id} takes {k} files ({', '.join(desc.inputs)}); got {len(mats)}")
    # fewer files leave trailing roles missing; the catalog reports which
    return dict(zip(desc.inputs, mats))


def _add_param_flags(p: argparse.ArgumentParser, alpha_default: float = 0.5) -> None:
    p.add_argument("--phi", help="Orlicz function, e.g. power:2, pnorm:3, exppow:2, logtemp:2")
    p.add_argument("--psi", help="complementary function (default: convex conjugate of phi)")
    p.add_argument("--alpha", type=float, default=alpha_default)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--fg", help="factor pair: alpha (t^alpha, t^(1-alpha)), sqrt, or pow:A")
    p.add_argument("--slack-tol", type=float, default=1e-7)


def cmd_eval(args) -> int:
    _announce_seed(_resolve_seed(args.seed))
    params = _params(args, args.bound)
    rep = evaluate_bound(args.bound, _inputs_from_files(args.bound, args.files), params, args.slack_tol)
    sys.stdout.write(format_csv([report_row(rep)], CSV_COLUMNS if args.header else ()))
    return EXIT_VIOLATION if rep.verdict == "violated" else EXIT_OK


def _manifest_from_args(args) -> str:
    text = ""
    if args.manifest:
        try:
            with open(args.manifest, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ManifestError(f"cannot read manifest {args.manifest}: {exc.strerror}") from None
    inline = {
        "seed": args.seed,
        "trials": args.trials,
        "dims": args.dims,
        "ensembles": args.ensembles,
        "bounds": args.bounds,
        "phi": args.phi,
        "alpha": args.alpha,
        "r": args.r,
        "coherence_trials": args.coherence_trials,
    }
    extra = "".join(f"{k}={v}\n" for k, v in inline.items() if v is not None)
    return text + "\n" + extra


def cmd_verify(args) -> int:
    cfg = parse_manifest(_manifest_from_args(args))
    _announce_seed(cfg.master_seed)
    report = run_campaign(cfg)
    csv_path, json_path = write_campaign(report, args.out)
    if args.write_manifest:
        write_atomic(os.path.join(args.out, "manifest.txt"), format_manifest(cfg))
    print(f"trials={cfg.trials} violations={report.violation_count} "
          f"ordering_failures={len(report.ordering_failures)} coherence_failures={len(report.coherence_failures)}")
    for bid, agg in report.per_bound.items():
        if agg.violation_count:
            print(f"VIOLATED {bid}: {agg.violation_count} (worst {agg.worst_input_ref})")
    for line in report.ordering_failures + report.coherence_failures:
        print(f"WARNING {line}")
    print(f"wrote {csv_path} {json_path}")
    return EXIT_OK if report.violation_count == 0 else EXIT_VIOLATION


def _parse_range(spec: str) -> np.ndarray:
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ParamOutOfRange(f"range must be A:B:STEP; got {spec!r}") from None
    if not (step > 0 and b >= a and all(map(math.isfinite, (a, b, step)))):
        raise ParamOutOfRange(f"range needs finite A <= B and STEP > 0; got {spec!r}")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(count)


def cmd_sweep(args) -> int:
    _announce_seed(_resolve_seed(args.seed))
    desc = get_bound(args.bound)
    uses = set(desc.uses) | ({"alpha"} if "fg" in desc.uses and not args.fg else set())
    if args.param not in uses:
        raise ParamOutOfRange(f"{args.bound} has no parameter {args.param!r}")
    grid = _parse_range(args.range)
    inputs = _inputs_from_files(args.bound, args.files)
    base = _params(args, args.bound)
    reports = []
    for x in grid:
        p = BoundParams(**{**base.__dict__, args.param: float(x)})
        if args.fg and args.param == "alpha":
            p = BoundParams(**{**p.__dict__, "fg": parse_fg(args.fg, float(x))})
        reports.append((x, evaluate_bound(args.bound, inputs, p, args.slack_tol)))
    rows = [["%.17g" % x, "%.17g" % r.lhs, "%.17g" % r.rhs, "%.17g" % r.slack] for x, r in reports]
    sys.stdout.write(format_csv(rows, (args.param, "lhs", "rhs", "slack")))
    return EXIT_VIOLATION if any(r.verdict == "violated" for _, r in reports) else EXIT_OK


def cmd_witness(args) -> int:
    seed = _resolve_seed(args.seed)
    _announce_seed(seed)
    params = _params(args, args.bound)
    res = witness_search(args.bound, params, budget=args.budget, seed=seed, n=args.dim,
                         ensemble=args.ensemble, slack_tol=args.slack_tol)
    sys.stdout.write(format_csv([report_row(res.report)], CSV_COLUMNS))
    print(f"# evaluations={res.evaluations} restarts={res.restarts}", file=sys.stderr)
    if args.out:
        out = {}
        for role, m in res.matrices.items():
            mats = m if isinstance(m, list) else [m]
            out[role] = [json.loads(format_matrix(x)) for x in mats]
        write_atomic(args.out, json.dumps(out, indent=1) + "\n")
    if res.violation:
        print(f"VIOLATED {args.bound}: slack {res.report.slack!r} < -{res.report.error_budget!r}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_range(args) -> int:
    _announce_seed(_resolve_seed(args.seed))
    if args.samples < 1:
        raise ParamOutOfRange("--samples must be >= 1")
    a = read_matrix(args.file)
    z = range_boundary_samples(a, args.samples)
    thetas = 2.0 * np.pi * np.arange(args.samples) / args.samples
    rows = [["%.17g" % t, "%.17g" % v.real, "%.17g" % v.imag] for t, v in zip(thetas, z)]
    cert = numerical_radius(a)
    text = format_csv(rows, ("theta", "re", "im"))
    text += "# w in [%.17g, %.17g]\n" % (cert.lower, cert.upper)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_list(args) -> int:
    _announce_seed(_resolve_seed(args.seed))
    rows = [[d.id, " ".join(d.inputs), " ".join(sorted(d.uses)), d.statement] for d in list_bounds()]
    sys.stdout.write(format_csv(rows, ("id", "inputs", "params", "statement")))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oradius", description="Certified numerical radii and radius inequalities.")
    ap.add_argument("--version", action="version", version=f"oradius {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one bound on matrix files")
    p.add_argument("files", nargs="+", help="matrix JSON files, one per input role in catalog order")
    p.add_argument("--bound", required=True)
    _add_param_flags(p)
    p.add_argument("--header", action="store_true", help="print the CSV header")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("--manifest")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--dims", help="LO-HI")
    p.add_argument("--ensembles", help="comma list or all")
    p.add_argument("--bounds", help="comma list or all")
    p.add_argument("--phi", help="comma list of Orlicz specifiers")
    p.add_argument("--alpha", help="comma list")
    p.add_argument("--r", help="comma list")
    p.add_argument("--coherence-trials", type=int)
    p.add_argument("--out", default=".", help="output directory for report.csv and summary.json")
    p.add_argument("--write-manifest", action="store_true", help="also write the resolved manifest")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="sweep one parameter of a bound")
    p.add_argument("files", nargs="+")
    p.add_argument("--bound", required=True)
    p.add_argument("--param", required=True, choices=("alpha", "r"))
    p.add_argument("--range", required=True, help="A:B:STEP, inclusive")
    _add_param_flags(p)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("witness", help="search for near-equality (or violating) inputs")
    p.add_argument("--bound", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--budget", type=int, default=2000, help="number of bound evaluations")
    p.add_argument("--ensemble", default="ginibre", choices=ENSEMBLES)
    p.add_argument("--out", help="write the best inputs as JSON")
    _add_param_flags(p)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("range", help="sample the boundary of the numerical range")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("list", help="list the bound catalog")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_list)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    # matrix files may also follow the flags
    if extra and hasattr(args, "files") and not any(x.startswith("-") for x in extra):
        args.files = list(args.files) + extra
    elif extra:
        parser.error("unrecognized arguments: " + " ".join(extra))
    try:
        return args.func(args)
    except OradiusError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
