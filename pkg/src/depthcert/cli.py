"""Command-line front end.

Subcommands: ``bounds``, ``sweep``, ``certify``, ``oracle``, ``scan-a``.
Results go to stdout (or ``--output``) as one JSON document or a CSV table.

Exit status: 0 on success, 2 on invalid input, 3 when a certification
input violates the global quantum bound.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from . import bounds, game, oracle
from .certify import InconsistentObservation, certify, sweep
from .bounds import PartitionSpec

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONSISTENT = 3


class UsageError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def parse_omega_range(text: str) -> list[float]:
    """``start:end:steps`` with both endpoints included, or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            start, end, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if steps < 1:
                raise UsageError("steps must be >= 1")
            if steps == 1:
                return [start]
            return [float(w) for w in np.linspace(start, end, steps)]
    except ValueError as exc:
        raise UsageError(f"cannot parse omega range {text!r}") from exc
    raise UsageError(f"omega range must be 'start:end:steps', got {text!r}")


def parse_partitions(items: Sequence[str], n: int) -> list[PartitionSpec] | None:
    if len(items) == 1 and items[0] == "all":
        return None
    specs = []
    for item in items:
        try:
            spec = PartitionSpec.parse(item)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if spec.n != n:
            raise UsageError(f"partition {item!r} sums to {spec.n}, expected {n}")
        specs.append(spec)
    return specs


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# --- commands ---------------------------------------------------------------------

def cmd_bounds(args) -> str:
    n, omega = args.n, args.omega
    try:
        nu = bounds.nu_crit(omega, n)
    except ValueError:
        nu = None
    doc = {
        "n": n,
        "omega": omega,
        "omega_star": 1.0 - 2.0**-n,
        "p_ent": bounds.p_ent(omega, n),
        "p_sep": bounds.p_sep(omega, n),
        "nu_crit": nu,
    }
    if args.format == "json":
        return _json(doc)
    return _csv(list(doc), [[v if v is not None else "" for v in doc.values()]])


def cmd_sweep(args) -> str:
    grid = parse_omega_range(args.omega)
    specs = parse_partitions(args.partitions, args.n)
    curves = sweep(args.n, grid, specs)
    if args.format == "json":
        return _json({"n": args.n, "omega": grid,
                      "curves": {c.name: list(c.values) for c in curves}})
    header = ["omega"] + [c.name for c in curves]
    rows = [[w] + [c.values[i] for c in curves] for i, w in enumerate(grid)]
    return _csv(header, rows)


def cmd_certify(args) -> str:
    verdict = certify(args.n, args.omega, args.ps, margin=args.margin)
    doc = verdict.to_dict()
    if args.format == "json":
        return _json(doc)
    excluded = " ".join(e["label"] for e in doc["excluded_partitions"])
    return _csv(["n", "omega", "observed_ps", "depth_lower_bound", "gme", "excluded"],
                [[args.n, args.omega, args.ps, verdict.depth_lower_bound,
                  str(verdict.gme).lower(), excluded]])


def cmd_oracle(args) -> str:
    spec = PartitionSpec.parse(args.partition) if args.partition else PartitionSpec((args.n,))
    if spec.n != args.n:
        raise UsageError(f"partition {args.partition!r} does not cover {args.n} parties")
    cfg = oracle.SeesawConfig(n=args.n, omega=args.omega, structure=spec,
                              restarts=args.restarts, max_iters=args.max_iters,
                              tol=args.tol, seed=args.seed)
    rep = oracle.seesaw(cfg)
    closed = bounds.partition_bound(args.omega, spec).value
    doc = {
        "n": args.n,
        "omega": args.omega,
        "partition": spec.label(),
        "best_value": rep.best_value,
        "partition_bound": closed,
        "per_restart_values": rep.per_restart_values,
        "converged": rep.converged,
        "iterations_used": rep.iterations_used,
        "seed": args.seed,
    }
    if args.format == "json":
        return _json(doc)
    return _csv(["restart", "value"], [[i, v] for i, v in enumerate(rep.per_restart_values)])


def cmd_scan_a(args) -> str:
    a_star, p_star = game.scan_a(args.omega, grid=args.grid)
    doc = {"omega": args.omega, "a_star": a_star, "p_star": p_star}
    if args.format == "json":
        return _json(doc)
    return _csv(list(doc), [list(doc.values())])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depthcert",
        description="Energy-restricted distributed discrimination bounds and depth certification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = sub.add_parser("bounds", help="closed-form bounds at one energy")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    common(p, "json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="bound curves over an energy grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", required=True, help="start:end:steps, endpoints included")
    p.add_argument("--partitions", nargs="+", default=["all"],
                   help="'all' or group sizes such as 1,3 2,2")
    common(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("certify", help="depth verdict for an observed success probability")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--ps", type=float, required=True, help="observed success probability")
    p.add_argument("--margin", type=float, default=0.0)
    common(p, "json")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="see-saw search for one structure")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--partition", help="group sizes, default: one group of n")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    common(p, "json")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("scan-a", help="optimal single-excitation weight for two parties")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--grid", type=int, default=game.SCAN_GRID)
    common(p, "json")
    p.set_defaults(func=cmd_scan_a)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except InconsistentObservation as exc:
        print(f"depthcert: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (UsageError, ValueError) as exc:
        print(f"depthcert: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.output:
        try:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"depthcert: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
