"""Command-line front end: bound sweeps, ITE tables, copula sampling, the LP oracle and self-checks.

Exit status is 0 on success, 1 for invalid input and 2 when an internal
cross-check fails (achievability routes disagree, or ``verify`` finds a
broken identity).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from .bounds import diff_bounds, probes, sum_bounds, sweep_grid, tau_w, rho_w
from .copula import ConsistencyError, ExtremalCopula, exact_prob, sample
from .dist import CdfCurve, SpecError, load_spec, to_fraction
from .ite import ArmPair, ite_row, ite_scan
from .oracle import InfeasibleMarginals, coupling_lp, solve_lp
from .verify import verify_pair, verify_random

EXIT_OK, EXIT_INVALID, EXIT_CONSISTENCY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def render(value: Any) -> str:
    """Shortest decimal text that reads back as the same double."""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(float(value))


def parse_grid(text: str) -> list[Fraction]:
    """``a:b:step`` to the points a, a+step, ... up to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid: expected a:b:step, got {text!r}")
    try:
        a, b, step = (to_fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--grid: not numbers: {text!r}") from None
    if step <= 0:
        raise UsageError("--grid: step must be positive")
    if b < a:
        raise UsageError("--grid: empty range (b < a)")
    count = int((b - a) / step) + 1
    if count > 1_000_000:
        raise UsageError("--grid: more than a million points")
    return [a + i * step for i in range(count)]


def parse_points(text: str) -> list[Fraction]:
    try:
        pts = [to_fraction(p.strip()) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--points: not a list of numbers: {text!r}") from None
    if not pts:
        raise UsageError("--points: empty list")
    return pts


def resolve_grid(args: argparse.Namespace, F: CdfCurve, G: CdfCurve) -> list[Fraction]:
    if args.points is not None:
        pts = parse_points(args.points)
    elif args.grid and args.grid != "auto":
        pts = parse_grid(args.grid)
    else:
        pts = sweep_grid(F, G)
    return sorted(set(pts))


def _load(path: str, flag: str) -> CdfCurve:
    try:
        return load_spec(path)
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path}: {exc.strerror}") from None
    except SpecError as exc:
        raise SpecError(f"{flag} {path}: {exc}") from None


def _emit(args: argparse.Namespace, header: list[str], rows: list[list[Any]], extra: dict | None = None) -> None:
    if args.format == "json":
        records = [dict(zip(header, (_json_value(v) for v in row))) for row in rows]
        payload: Any = records if extra is None else {**extra, "rows": records}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([render(v) for v in row])
        text = buf.getvalue()
    _write(args.out, text)


def _json_value(v: Any) -> Any:
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return float(v)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"--out: cannot write {path}: {exc.strerror}") from None


# -- commands -----------------------------------------------------------------

BOUND_HEADER = ["lower_lt", "lower_leq", "upper_lt", "upper_leq", "lower_leq_achievable", "upper_lt_achievable"]


def run_bounds(args: argparse.Namespace) -> int:
    F, G = _load(args.f, "--f"), _load(args.g, "--g")
    diff = args.command == "diff"
    G_eff = G.negate() if diff else G
    rows = []
    witnesses = []
    for z in resolve_grid(args, F, G_eff):
        rep = (diff_bounds if diff else sum_bounds)(F, G, z, tol=args.tol)
        rows.append([z, rep.lower_lt, rep.lower_leq, rep.upper_lt, rep.upper_leq,
                     rep.lower_leq_achievable, rep.upper_lt_achievable])
        witnesses.append((rep.lower_witness, rep.upper_witness))
        if args.debug_scan:
            _debug_probes(F, G_eff, z)
    key = "delta" if diff else "z"
    if args.format == "json":
        rows = [r + [w[0], w[1]] for r, w in zip(rows, witnesses)]
        _emit(args, [key] + BOUND_HEADER + ["lower_witness", "upper_witness"], rows)
    else:
        _emit(args, [key] + BOUND_HEADER, rows)
    return EXIT_OK


def _debug_probes(F: CdfCurve, G: CdfCurve, z: Fraction) -> None:
    err = sys.stderr
    err.write(f"# z={z}: b, F(b-)+G(z-b), F(b)+G(z-b), F(b-)+G((z-b)-), F(b)+G((z-b)-)\n")
    for p in probes(F, G, z):
        err.write(f"  {p.b}: {p.from_left} {p.closed} {p.open} {p.from_right}\n")


def run_ite(args: argparse.Namespace) -> int:
    arms = ArmPair(_load(args.f, "--f"), _load(args.g, "--g"))
    rows = []
    for d in resolve_grid(args, arms.f1, arms.f0.negate()):
        r = ite_row(arms, d, tol=args.tol)
        rows.append([r.delta, r.sharp_lower, r.sharp_upper, r.historical_lower, r.gap])
        if args.debug_scan:
            sys.stderr.write(f"# delta={d}: F1(y) - P(Y0 < y - delta)\n")
            for where, lo, hi in ite_scan(arms, d):
                val = f"{lo}" if lo == hi else f"{lo} .. {hi}"
                sys.stderr.write(f"  {where}: {val}\n")
    _emit(args, ["delta", "sharp_lower", "sharp_upper", "historical_lower", "gap"], rows)
    return EXIT_OK


def run_sample(args: argparse.Namespace) -> int:
    F, G = _load(args.f, "--f"), _load(args.g, "--g")
    if args.samples < 0:
        raise UsageError("--samples: must be non-negative")
    G_eff = G.negate() if args.op == "diff" else G
    if args.threshold == "auto":
        if args.z is None:
            raise UsageError("--threshold auto needs --z")
        z = to_fraction(args.z)
        t = tau_w(F, G_eff, z) if args.kind == "lower" else rho_w(F, G_eff, z)
    else:
        t = to_fraction(args.threshold)
    cop = ExtremalCopula(args.kind, t)
    draws = sample(cop, F, G_eff, args.samples, seed=args.seed)
    if args.op == "diff":
        draws[:, 1] = -draws[:, 1]
    rows = [[x, y] for x, y in draws.tolist()]
    extra = None
    if args.format == "json":
        extra = {"kind": args.kind, "threshold": float(t), "seed": args.seed, "op": args.op}
        if args.z is not None:
            extra["z"] = float(to_fraction(args.z))
            extra["exact_prob_leq"] = float(exact_prob(cop, F, G_eff, args.z, "<="))
            extra["exact_prob_lt"] = float(exact_prob(cop, F, G_eff, args.z, "<"))
    _emit(args, ["x", "y"], rows, extra)
    return EXIT_OK


def run_oracle(args: argparse.Namespace) -> int:
    F, G = _load(args.f, "--f"), _load(args.g, "--g")
    if not (F.is_discrete and G.is_discrete):
        raise SpecError("oracle: both specs must be discrete")
    G_eff = G.negate() if args.op == "diff" else G
    zs = resolve_grid(args, F, G_eff)
    results = []
    last = None
    for z in zs:
        lp = coupling_lp(F, G_eff, z, args.relation, args.sense)
        sol = solve_lp(lp, exact=args.exact)
        ys, matrix = list(lp.ys), sol.coupling
        if args.op == "diff":
            # columns back to ascending atoms of Y
            ys, matrix = [-y for y in reversed(ys)], matrix[:, ::-1]
        last = (lp.xs, ys, matrix)
        results.append({
            "z": float(z),
            "op": args.op,
            "relation": args.relation,
            "sense": args.sense,
            "value": float(sol.value),
            "x": [float(x) for x in lp.xs],
            "y": [float(y) for y in ys],
            "coupling": [[float(v) for v in row] for row in matrix.tolist()],
        })
    _write(args.out, json.dumps(results if len(results) > 1 else results[0], indent=2) + "\n")
    if args.coupling_out:
        if len(results) != 1:
            raise UsageError("--coupling-out needs exactly one evaluation point")
        xs, ys, matrix = last
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x\\y"] + [render(y) for y in ys])
        for x, row in zip(xs, matrix.tolist()):
            w.writerow([render(x)] + [render(v) for v in row])
        _write(args.coupling_out, buf.getvalue())
    return EXIT_OK


def run_verify(args: argparse.Namespace) -> int:
    if (args.f is None) != (args.g is None):
        raise UsageError("verify: give both --f and --g, or neither")
    if args.f is not None:
        F, G = _load(args.f, "--f"), _load(args.g, "--g")
        extra = parse_points(args.points) if args.points else ()
        report = verify_pair(F, G, extra)
    else:
        if args.instances < 1 or not 1 <= args.atoms <= 11:
            raise UsageError("verify: need --instances >= 1 and 1 <= --atoms <= 11")
        report = verify_random(seed=args.seed, instances=args.instances, n_atoms=args.atoms)
    _write(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report["pass"] else EXIT_CONSISTENCY


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="makarov", description="Sharp bounds on the CDF of X+Y and X-Y for fixed marginals.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp: argparse.ArgumentParser, specs_required: bool = True) -> None:
        sp.add_argument("--f", required=specs_required, metavar="SPEC", help="JSON spec of the first marginal")
        sp.add_argument("--g", required=specs_required, metavar="SPEC", help="JSON spec of the second marginal")
        sp.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    def grid(sp: argparse.ArgumentParser) -> None:
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--grid", metavar="A:B:STEP", help="evenly spaced points, or 'auto' (default)")
        g.add_argument("--points", metavar="Z1,Z2,...", help="explicit evaluation points")

    def tol(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--tol", type=float, default=1e-9,
                        help="tolerance when comparing an extremal copula's probability with a bound")

    for name, what in (("sum", "P(X+Y <= z) and P(X+Y < z)"), ("diff", "P(X-Y <= d) and P(X-Y < d)")):
        sp = sub.add_parser(name, help=f"bounds on {what} over a grid")
        common(sp)
        grid(sp)
        tol(sp)
        sp.add_argument("--debug-scan", action="store_true", help="print the breakpoint scan to stderr")

    sp = sub.add_parser(
        "ite", help="bounds on the CDF of a treatment effect Y1 - Y0",
        description="--f is the treated-arm outcome law and --g the control-arm law. "
                    "Treating observed arms as potential-outcome marginals (randomisation or "
                    "ignorability) is an assumption of the caller.",
    )
    common(sp)
    grid(sp)
    tol(sp)
    sp.add_argument("--debug-scan", action="store_true",
                    help="print the piecewise values of F1(y) - P(Y0 < y - delta) to stderr")

    sp = sub.add_parser("sample", help="draw (x, y) pairs from an extremal coupling")
    common(sp)
    sp.add_argument("--kind", choices=("lower", "upper"), default="lower")
    sp.add_argument("--threshold", default="auto",
                    help="copula threshold in [0,1], or 'auto' to use the bound at --z")
    sp.add_argument("--z", help="evaluation point for --threshold auto")
    sp.add_argument("--op", choices=("sum", "diff"), default="sum")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("oracle", help="extreme of P(X+Y in A) over couplings, by linear programming")
    common(sp)
    grid(sp)
    sp.add_argument("--op", choices=("sum", "diff"), default="sum")
    sp.add_argument("--relation", choices=("<=", "<"), default="<=")
    sp.add_argument("--sense", choices=("minimize", "maximize"), default="minimize")
    sp.add_argument("--exact", action="store_true", help="pivot in rational arithmetic")
    sp.add_argument("--coupling-out", metavar="PATH", help="write the optimal coupling matrix as CSV")

    sp = sub.add_parser("verify", help="check the closed forms against the LP oracle and each other")
    common(sp, specs_required=False)
    sp.add_argument("--points", metavar="Z1,Z2,...", help="extra evaluation points for supplied specs")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--instances", type=int, default=50)
    sp.add_argument("--atoms", type=int, default=4)
    return p


COMMANDS = {
    "sum": run_bounds,
    "diff": run_bounds,
    "ite": run_ite,
    "sample": run_sample,
    "oracle": run_oracle,
    "verify": run_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConsistencyError as exc:
        print(f"makarov: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (SpecError, InfeasibleMarginals, UsageError, ValueError, TypeError) as exc:
        print(f"makarov: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
