"""Command-line front end.

    python3 -m quasiprob compute --state fock:1 --dist wigner --grid -4,4,81,-4,4,81 --out w.csv
    python3 -m quasiprob verify --dim 64 --tol 1e-6

Exit codes: 0 success, 1 failed verification rows, 2 misuse, 3 numeric failure.
"""

import argparse
import datetime
import sys

from . import __version__, distributions, prep
from .errors import QuasiprobError, StateSpecError
from .fockspace import DEFAULT_DIM, make_state
from .grid import Axis
from .statespec import StateSpec, parse_state_spec

# CLI route name -> registered operation, per distribution
ROUTES = {
    "wigner": {"parity": "wigner_parity", "integral": "wigner_integral", "charfn": "wigner_from_charfn"},
    "kr": {"direct": "kr_direct", "charfn": "kr_from_charfn", "vacuum": "kr_vacuum_form",
           "p": "kr_from_p"},
    "q": {"husimi": "q_function"},
    "charfn": {"trace": "char_fn"},
    "cohen": {"unity": "cohen_unity", "dirac-pair": "cohen_dirac_pair"},
}
DEFAULT_ROUTE = {"wigner": "parity", "kr": "direct", "q": "husimi", "charfn": "trace",
                 "cohen": "unity"}
CALIBRATION_REFERENCE = StateSpec.vacuum()


class UsageError(Exception):
    pass


def _grid_arg(text):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("--grid needs qmin,qmax,nq,pmin,pmax,np")
    try:
        return (Axis(float(parts[0]), float(parts[1]), int(parts[2])),
                Axis(float(parts[3]), float(parts[4]), int(parts[5])))
    except (ValueError, QuasiprobError) as exc:
        raise argparse.ArgumentTypeError(f"bad --grid {text!r}: {exc}")


def _axis_arg(text):
    try:
        return Axis.parse(text)
    except (ValueError, QuasiprobError) as exc:
        raise argparse.ArgumentTypeError(f"bad axis {text!r}: {exc}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="quasiprob", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"quasiprob {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compute", help="evaluate a distribution on a grid")
    comp.add_argument("--state", required=True, help="state spec, e.g. coherent:1.0+0.5i")
    comp.add_argument("--dist", required=True, choices=sorted(ROUTES))
    comp.add_argument("--route", help="evaluation route (default depends on --dist)")
    comp.add_argument("--dim", type=_positive_int, default=DEFAULT_DIM)
    comp.add_argument("--grid", type=_grid_arg, default=_grid_arg("-6,6,121,-6,6,121"),
                      help="qmin,qmax,nq,pmin,pmax,np")
    comp.add_argument("--out", required=True)
    comp.add_argument("--format", choices=("csv", "json"), default="csv")
    comp.add_argument("--no-timestamp", action="store_true",
                      help="omit the JSON timestamp (byte-reproducible output)")

    ver = sub.add_parser("verify", help="run the cross-route verification suite")
    ver.add_argument("--dim", type=_positive_int, default=DEFAULT_DIM)
    ver.add_argument("--tol", type=float, default=1e-6)
    ver.add_argument("--states", default=None,
                     help="comma list of state specs (default: the standard test set)")
    ver.add_argument("--grid", type=_axis_arg, default=None, help="min,max,n for both axes")
    ver.add_argument("--json", dest="json_path", help="also write the report as JSON")
    ver.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _resolve_route(dist, route):
    routes = ROUTES[dist]
    route = route or DEFAULT_ROUTE[dist]
    if route not in routes:
        raise UsageError(
            f"unknown route {route!r} for --dist {dist}; valid routes: {', '.join(routes)}"
        )
    return routes[route]


def _compute(args):
    op = _resolve_route(args.dist, args.route)
    try:
        spec = parse_state_spec(args.state)
    except StateSpecError as exc:
        raise UsageError(f"--state: {exc}")
    q_axis, p_axis = args.grid
    if op == "kr_from_p":
        P = prep.p_from_state(spec)
        if P is None:
            raise UsageError(f"route p needs a state with a regular P function; {spec} has none")
        distributions.calibrate("kr_from_p", prep.PRepresentation.delta(0), args.dim)
        grid = prep.kr_from_p_distribution(P, q_axis, p_axis)
    else:
        rho = make_state(spec, args.dim)
        if op.startswith("cohen"):
            kernel = distributions.CohenKernel("unity" if op == "cohen_unity" else "dirac-pair")
            grid = distributions.cohen(rho, kernel, q_axis, p_axis, state=str(spec))
        else:
            if op in distributions.calibrated_routes() and op != "wigner_parity":
                distributions.calibrate(op, CALIBRATION_REFERENCE, args.dim)
            grid = distributions.evaluate_grid(op, rho, q_axis, p_axis, state=str(spec))
    if args.format == "json" and not args.no_timestamp:
        grid.metadata["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    grid.write(args.out, args.format, timestamp=not args.no_timestamp)
    return 0


def _verify(args):
    from . import verify

    kwargs = {"dim": args.dim, "tol": args.tol}
    if args.states is not None:
        try:
            kwargs["states"] = verify.parse_state_list(args.states)
        except StateSpecError as exc:
            raise UsageError(f"--states: {exc}")
    if args.grid is not None:
        kwargs["grid"] = args.grid
    report = verify.run_verify(**kwargs)
    sys.stdout.write(report.to_json() + "\n" if args.format == "json" else report.to_text())
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(report.to_json() + "\n")
    return 0 if report.passed else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compute":
            return _compute(args)
        return _verify(args)
    except UsageError as exc:
        parser.exit(2, f"quasiprob: error: {exc}\n")
    except QuasiprobError as exc:
        extra = ""
        if getattr(exc, "minimal_dim", None) is not None:
            extra = f" (minimal dim {exc.minimal_dim})"
        if getattr(exc, "required_extent", None) is not None:
            extra = f" (required extent {exc.required_extent})"
        sys.stderr.write(f"quasiprob: {type(exc).__name__}: {exc}{extra}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"quasiprob: cannot write output: {exc}\n")
        return 3
