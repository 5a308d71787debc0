"""Command-line interface: ``critcircle <subcommand> [flags]``.

Exit status is 0 on success, 2 on a usage or input error (one line on
stderr) and 3 when a computation exceeds its numerical resolution.
Every report carries the parameters that produced it and, when an atlas
is involved, the atlas fingerprint.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .atlas import build_atlas, depth_rationals, dumps_atlas, extend_atlas, load_atlas
from .errors import (
    CircleMapError,
    InsufficientDepthError,
    ResolutionError,
    ScaleTooFineError,
)
from .family import CriticalFamily
from .farey import (
    UNIT,
    FareyDomain,
    closest_return_denominators,
    daughters,
    degree,
    farey_sequence,
    harmonic_endpoint,
    rational_to_code,
)
from .rotation import CENTER_TOL

EXIT_OK, EXIT_USAGE, EXIT_RESOLUTION = 0, 2, 3
RESOLUTION_ERRORS = (ResolutionError, ScaleTooFineError, InsufficientDepthError)
DEFAULT_EPS = "1e-3,1e-4,1e-5,1e-6,1e-7"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _domain(text: str) -> FareyDomain:
    try:
        return FareyDomain.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad domain {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--family", choices=["sine-l"], default="sine-l")
    common.add_argument("--l", type=int, default=None, help="odd critical exponent (default 3)")
    common.add_argument("--qmax", type=int, default=None)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--cutoff", type=int, default=None)
    common.add_argument("--tol", type=float, default=CENTER_TOL)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $CRITCIRCLE_JOBS or 1)")
    common.add_argument("--atlas", default=None, help="tongue atlas file")
    common.add_argument("--domain", type=_domain, default=None, help="Farey domain P/Q:P'/Q'")
    common.add_argument("--nmax", type=int, default=None)

    parser = _Parser(prog="critcircle",
                     description="Frequency locking, harmonic scalings and dimension estimates "
                                 "for critical circle maps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("farey", parents=[common],
                   help="Farey codes of rationals up to --qmax, or harmonic endpoints of --domain")

    sub.add_parser("tongues", parents=[common],
                   help="build a tongue atlas from --qmax and/or --depth/--cutoff")

    sub.add_parser("scalings", parents=[common],
                   help="harmonic scalings h_n and the phase-sum products")

    p = sub.add_parser("saddle", parents=[common], help="maximal orbits of the quadratic funnel")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--eps", type=_floats, default=_floats(DEFAULT_EPS))

    p = sub.add_parser("dimension", parents=[common], help="dimension estimates of the non-locked set")
    p.add_argument("--method", choices=["box", "cover", "frostman"], default="box")
    p.add_argument("--eps", type=_floats, default=None, help="box sizes (default 2^-8 .. 2^-13)")
    p.add_argument("--eta", type=float, default=0.3)

    p = sub.add_parser("holder", parents=[common], help="Hölder envelope of the rotation number")
    p.add_argument("--scales", type=int, default=10)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


# -- helpers ------------------------------------------------------------------------
def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(meta: dict, header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str, allow_nan=False) + "\n"


def _family(args) -> CriticalFamily:
    return CriticalFamily.from_spec(args.family, 3 if args.l is None else args.l)


def _atlas(args, needed=(), default_qmax: Optional[int] = None):
    """The --atlas file (or a freshly built atlas), extended by ``needed``."""
    if args.atlas:
        atlas = load_atlas(args.atlas)
        if args.l is not None and args.l != atlas.l:
            raise UsageError(f"--l {args.l} does not match the atlas (l={atlas.l})")
    else:
        fam = _family(args)
        qmax = args.qmax if args.qmax is not None else default_qmax
        kw = {}
        if args.depth is not None or args.cutoff is not None:
            kw = dict(depth=args.depth, cutoff=args.cutoff, domain=args.domain or UNIT)
        explicit = needed if qmax is None and not kw else ()
        atlas = build_atlas(fam, qmax, rationals=explicit, tol=args.tol, jobs=args.jobs, **kw)
    return extend_atlas(atlas, needed, jobs=args.jobs)


def _frac(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


# -- subcommands ----------------------------------------------------------------------
def cmd_farey(args) -> None:
    if args.domain is not None:
        nmax = 8 if args.nmax is None else args.nmax
        header = ["n", "u_n", "code", "degree"]
        rows = []
        for n in range(-nmax, nmax + 1):
            u = harmonic_endpoint(args.domain, n)
            code = rational_to_code(u) if 0 < u < 1 else ""
            rows.append([n, _frac(u), code, degree(code)])
        meta = {"command": "farey", "domain": str(args.domain), "nmax": nmax}
    else:
        qmax = 8 if args.qmax is None else args.qmax
        header = ["rational", "code", "degree", "left_daughter", "right_daughter", "closest_returns"]
        rows = []
        for r in farey_sequence(qmax):
            if not 0 < r < 1:
                continue
            code = rational_to_code(r)
            a, b = daughters(r)
            returns = " ".join(map(str, closest_return_denominators(code)))
            rows.append([_frac(r), code, degree(code), _frac(a), _frac(b), returns])
        meta = {"command": "farey", "qmax": qmax}
    if args.format == "json":
        _emit(args, _json({**meta, "rows": [dict(zip(header, row)) for row in rows]}))
    else:
        _emit(args, _csv(meta, header, rows))


def cmd_tongues(args) -> None:
    if args.qmax is None and args.depth is None:
        raise UsageError("tongues needs --qmax or --depth/--cutoff")
    if (args.depth is None) != (args.cutoff is None):
        raise UsageError("--depth and --cutoff must be given together")
    kw = {}
    if args.depth is not None:
        kw = dict(depth=args.depth, cutoff=args.cutoff, domain=args.domain or UNIT)
    atlas = build_atlas(_family(args), args.qmax, tol=args.tol, jobs=args.jobs, **kw)
    _emit(args, dumps_atlas(atlas))


def cmd_scalings(args) -> None:
    from .scaling import cubic_law_check, harmonic_scalings, phase_products

    domain = args.domain or UNIT
    nmax = 24 if args.nmax is None else args.nmax
    if nmax < 1:
        raise UsageError("--nmax must be >= 1")
    needed = [harmonic_endpoint(domain, n) for n in range(-nmax, nmax + 2)] + [domain.lo, domain.hi]
    atlas = _atlas(args, needed)
    fam = atlas.family_object()
    report = harmonic_scalings(atlas, domain, -nmax, nmax)
    sums = phase_products(atlas, fam, domain, nmax, report)
    slope, spread = cubic_law_check(report) if nmax >= 16 else (None, None)
    meta = {"command": "scalings", "domain": str(domain), "nmax": nmax, "fit_slope": slope,
            "ratio_spread": spread, "atlas": atlas.describe()}
    header = ["n", "h_n", "cubic_product", "phase_sum", "product"]
    products = report.cubic_products()
    rows = [[n, report.h[n], products[n], sums[n][0], sums[n][1]] for n in range(1, nmax + 1)]
    if args.format == "json":
        meta["h"] = {str(n): v for n, v in report.h.items()}
        _emit(args, _json({**meta, "rows": [dict(zip(header, row)) for row in rows]}))
    else:
        _emit(args, _csv(meta, header, rows))


def cmd_saddle(args) -> None:
    from .scaling import loglog_slope, saddle_sweep

    rows = saddle_sweep(args.alpha, args.eps, args.kappa)
    header = ["alpha", "eps", "kappa", "passage_length", "slow_fraction", "reciprocal_gap_sum"]
    meta = {"command": "saddle", "alpha": args.alpha, "kappa": args.kappa, "eps": args.eps}
    if len(rows) >= 2:
        meta["passage_slope"] = loglog_slope([r["eps"] for r in rows], [r["passage_length"] for r in rows])
    if args.format == "json":
        _emit(args, _json({**meta, "rows": rows}))
    else:
        _emit(args, _csv(meta, header, [[r[h] for h in header] for r in rows]))


def cmd_dimension(args) -> None:
    from . import fractal

    if args.method == "box":
        qmax = 128 if args.qmax is None else args.qmax
        eps = args.eps or [2.0**-j for j in range(8, 14)]
        atlas = _atlas(args, farey_sequence(qmax), default_qmax=qmax)
        est = fractal.box_dimension(atlas, qmax, eps)
        report = {"method": est.method, "value": est.value, "raw_slope": est.raw,
                  "scales": est.scales, "counts": est.diagnostics,
                  "resolved_scale": est.extra["resolved_scale"], "q_max": qmax}
    else:
        depth = 3 if args.depth is None else args.depth
        k = 8 if args.cutoff is None else args.cutoff
        domain = args.domain or UNIT
        args.depth, args.cutoff = depth, k
        atlas = _atlas(args, depth_rationals(depth, k, domain))
        if args.method == "cover":
            est = fractal.upper_dimension_estimate(atlas, depth, k, base=domain)
            report = {"method": est.method, "value": est.value, "scales": est.scales,
                      "roots": est.diagnostics, "cover_sums": est.extra["cover_sums"],
                      "depth": depth, "cutoff": k}
        else:
            rep = fractal.frostman_check(atlas, args.eta, k, depth, base=domain)
            report = {"method": "frostman", "eta": args.eta, "passed": rep.passed,
                      "depth_masses": rep.depth_masses, "max_excess": rep.max_excess,
                      "min_mass_margin": rep.min_mass_margin, "min_gap_ratio": rep.min_gap_ratio,
                      "violations": [str(c) for c in rep.violations], "depth": depth, "cutoff": k}
    report["atlas"] = atlas.describe()
    _emit(args, _json(report))


def cmd_holder(args) -> None:
    from .holder import holder_fit

    qmax = 128 if args.qmax is None else args.qmax
    atlas = _atlas(args, (), default_qmax=qmax)
    fit = holder_fit(atlas.family_object(), atlas, args.scales, args.pairs, seed=args.seed)
    summary = {"command": "holder", "alpha": fit.alpha, "c_const": fit.c_const,
               "slope": fit.slope, "intercept": fit.intercept,
               "worst_pair": [_frac(r) for r in fit.worst_pair],
               "pairs": int(len(fit.pairs)), "envelope_holds": fit.envelope_holds(),
               "seed": args.seed, "atlas": atlas.describe()}
    header = ["scale", "max_drho", "fitted"]
    rows = list(zip(fit.scales.tolist(), fit.max_drho.tolist(), fit.fitted().tolist()))
    if args.format == "json":
        _emit(args, _json({**summary, "rows": [dict(zip(header, r)) for r in rows]}))
    else:
        _emit(args, _csv(summary, header, rows))


COMMANDS = {
    "farey": cmd_farey,
    "tongues": cmd_tongues,
    "scalings": cmd_scalings,
    "saddle": cmd_saddle,
    "dimension": cmd_dimension,
    "holder": cmd_holder,
}


def cli_run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return the exit status."""
    try:
        args = build_parser().parse_args(argv)
        if args.l is not None:
            _family(args)  # reject a bad exponent before any work
        COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"critcircle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RESOLUTION_ERRORS as exc:
        print(f"critcircle: resolution exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (CircleMapError, ValueError, OSError) as exc:
        print(f"critcircle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
