"""Command-line front end.

Exit codes: 0 when no (or only a negligible) disadvantage is found, 2 when an
audit finds a disadvantage, 1 on any error including bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from typing import Optional, Sequence

from . import certificates as cert
from ._exact import dot
from .adversary import AdversaryRequest, construct_adversarial_utilities
from .core import ProbVector, ReducedJointTable, ReducedUtilityMatrix, ValidationError
from .files import SchemaError, dump_json, ingest, ingest_to_document, load_scenario, preset_names
from .mortgage import PRESETS, expected_utilities
from .report import audit, exit_code
from .solver import (
    FIXED_CONDITIONAL,
    FIXED_JOINT,
    CollegeParams,
    FixedSlots,
    ReducedSweepBase,
    SweepSpec,
    college_ud,
    solve_equal_utility_acceptance,
    solve_q1_star,
    sweep,
    zero_crossing,
)

log = logging.getLogger(__name__)

COLLEGE_DEFAULTS = dict(q0=0.8, q1=0.8, delta=0.2, q11=0.7, u11=170_000.0, u01=0.0)
MORTGAGE_REDUCED = dict(std_p11=0.76, std_accept=0.8, conditional=0.9, prot_p11=0.72,
                        utilities=(310_000.0, 160_000.0, 190_000.0))
SWEEP_PRESETS = {
    "college": (SweepSpec("q1", 0.8, 1.0, 0.01), None),
    "college-fixed-slots": (SweepSpec("q1", 0.8, 1.0, 0.01, FixedSlots(1000, 1250, 250)), None),
    "mortgage": (SweepSpec("p_accept", 0.0, 1.0, 0.01), "reduced"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _emit(obj) -> None:
    sys.stdout.write(dump_json(obj) + "\n")


def cmd_audit(args) -> int:
    ls = load_scenario(args.scenario)
    report = audit(ls, tol=args.tol, tau=args.tau, include_meta=not args.no_meta)
    _emit(report)
    return exit_code(report)


def cmd_ingest(args) -> int:
    result = ingest(args.csv, standard=args.standard, protected=args.protected or None)
    doc = ingest_to_document(result, args.utilities, tau=args.tau)
    text = dump_json(doc) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_adversary(args) -> int:
    if len(args.pd) != 3:
        raise ValidationError("--pd needs three components PD(Y=1,Yhat=1),PD(Y=0,Yhat=0),PD(Yhat=1)")
    req = AdversaryRequest(ProbVector(*args.pd), args.k)
    u = construct_adversarial_utilities(req)
    ud = float(dot(u.vector, req.pd))
    _emit({"pd": list(req.pd), "targetK": req.target_k, "utilities": u.as_dict(), "ud": ud})
    return 0


def cmd_mortgage(args) -> int:
    params = PRESETS[args.preset]
    overrides = {k: getattr(args, k) for k in
                 ("price_t", "mortgage_t", "capital0", "haircut", "mu", "sigma", "rent_cost")
                 if getattr(args, k) is not None}
    params = params.with_(**overrides)
    _emit({"params": params.as_dict(), "breakdown": expected_utilities(params).as_dict()})
    return 0


def _college_params(args) -> CollegeParams:
    return CollegeParams(args.q0, args.q1, args.delta, args.q11, args.u11, args.u01)


def cmd_college(args) -> int:
    p = _college_params(args)
    out = {"params": p.as_dict(), "ud": college_ud(p)}
    if p.q11 > 0:
        out["q1Star"] = solve_q1_star(p).as_dict()
    _emit(out)
    return 0


def cmd_solve(args) -> int:
    std = ReducedJointTable(args.std_p11, args.std_accept)
    u = ReducedUtilityMatrix(*args.utilities)
    modes = [FIXED_CONDITIONAL, FIXED_JOINT] if args.mode == "both" else [args.mode]
    results = [solve_equal_utility_acceptance(std, args.conditional, u, m, prot_p11=args.prot_p11).as_dict()
               for m in modes]
    _emit({"results": results})
    return 0


def cmd_sweep(args) -> int:
    spec, kind = SWEEP_PRESETS[args.preset]
    if kind == "reduced":
        d = MORTGAGE_REDUCED
        base = ReducedSweepBase(ReducedJointTable(d["std_p11"], d["std_accept"]), d["conditional"],
                                ReducedUtilityMatrix(*d["utilities"]))
    else:
        base = CollegeParams(**dict(COLLEGE_DEFAULTS, u01=args.u01))
    rows = sweep(spec, base)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "ud", "feasible"])
    for r in rows:
        w.writerow([repr(r.value), repr(r.ud), "true" if r.feasible else "false"])
    sys.stdout.write(buf.getvalue())
    crossing = zero_crossing(rows)
    if crossing is not None:
        log.info("zero crossing near %r", crossing)
    return 0


def cmd_bounds(args) -> int:
    p = cert.BoundParams(args.k, args.eps, args.gamma)
    _emit({"K": p.K, "epsilon": p.eps, "gamma": p.gamma,
           "rough": cert.rough_bound(p), "cua": cert.cua_bound(p)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="utilfair", description="Utility-based fairness audits for binary decisions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("audit", help="audit a scenario file or bundled preset")
    p.add_argument("scenario", help=f"path or preset name ({', '.join(preset_names())})")
    p.add_argument("--tau", type=float, default=None, help="override the file's tolerance level")
    p.add_argument("--tol", type=float, default=cert.DEFAULT_TOL, help="certificate equality tolerance")
    p.add_argument("--no-meta", action="store_true", help="omit the metadata section")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("ingest", help="turn a group,y,yhat CSV into a scenario file")
    p.add_argument("csv")
    p.add_argument("--utilities", type=_floats, required=True,
                   help="u11,u01,u00,u10 (full data) or u11,u01,u0 (missing outcomes)")
    p.add_argument("--standard", help="label of the standard group")
    p.add_argument("--protected", action="append", help="label of a protected group (repeatable)")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("adversary", help="utilities that turn a probability gap into a disadvantage of size K")
    p.add_argument("--pd", type=_floats, required=True)
    p.add_argument("--k", type=float, required=True)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("mortgage", help="default probabilities and expected utilities")
    p.add_argument("--preset", choices=sorted(PRESETS), default="base")
    for flag in ("price-t", "mortgage-t", "capital0", "haircut", "mu", "sigma", "rent-cost"):
        p.add_argument(f"--{flag}", type=float, dest=flag.replace("-", "_"))
    p.set_defaults(func=cmd_mortgage)

    p = sub.add_parser("college", help="college admission utility difference and fair admission rate")
    for k, v in COLLEGE_DEFAULTS.items():
        p.add_argument(f"--{k}", type=float, default=v)
    p.set_defaults(func=cmd_college)

    p = sub.add_parser("solve", help="protected acceptance rate giving equal utilities (reduced setting)")
    p.add_argument("--std-p11", type=float, default=MORTGAGE_REDUCED["std_p11"])
    p.add_argument("--std-accept", type=float, default=MORTGAGE_REDUCED["std_accept"])
    p.add_argument("--conditional", type=float, default=MORTGAGE_REDUCED["conditional"],
                   help="protected P(Y=1|Yhat=1) for fixed-conditional mode")
    p.add_argument("--prot-p11", type=float, default=MORTGAGE_REDUCED["prot_p11"],
                   help="protected P(Y=1,Yhat=1) for fixed-joint mode")
    p.add_argument("--utilities", type=_floats, default=list(MORTGAGE_REDUCED["utilities"]),
                   help="u11,u01,u0")
    p.add_argument("--mode", choices=[FIXED_CONDITIONAL, FIXED_JOINT, "both"], default="both")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="utility difference over a grid of acceptance rates (CSV)")
    p.add_argument("--preset", choices=sorted(SWEEP_PRESETS), required=True)
    p.add_argument("--u01", type=float, default=0.0, help="college sweeps only")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="rough and conditional-use-accuracy disadvantage bounds")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, SchemaError, FileNotFoundError, OSError) as exc:
        print(f"utilfair: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
