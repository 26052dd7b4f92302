"""Command-line front end: ``cfsdim`` with one subcommand per operation.

Exit codes: 0 ok, 1 IO/config error, 2 validation error, 3 budget exceeded.
All randomness flows through --seed, so repeat runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys

from . import dimension, entropy, estimate, fourcorner, separation
from .ifs import (BudgetExceeded, CFSystem, DegenerateMeasure, ProbVector,
                  ValidationError, load_system, validate_probabilities,
                  validate_system)

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_cfs(args):
    sys_obj, p = load_system(args.system)
    errs = validate_system(sys_obj)
    if errs:
        raise ValidationError("; ".join(errs))
    if getattr(args, "probabilities", None) == "uniform" or p is None:
        p = ProbVector.uniform(sys_obj)
    errs = validate_probabilities(sys_obj, p)
    if errs:
        raise ValidationError("; ".join(errs))
    return sys_obj, p


def _load_4c(args) -> fourcorner.FourCornerSystem:
    with open(args.system) as fh:
        return fourcorner.FourCornerSystem.from_json_dict(json.load(fh))


def cmd_measure_dim(args) -> int:
    sys_obj, p = _load_cfs(args)
    rep = dimension.measure_dimension(sys_obj, p, tol=args.tol)
    _emit(rep.to_json_dict(), args)
    return EXIT_OK


def cmd_attractor_dim(args) -> int:
    sys_obj, _ = load_system(args.system)
    errs = validate_system(sys_obj)
    if errs:
        raise ValidationError("; ".join(errs))
    rep = dimension.attractor_dimension(sys_obj, tol=args.tol)
    out = rep.to_json_dict()
    if args.gd_depth:
        seq = [dimension.gd_dimension(sys_obj, d, tol=args.tol)
               for d in range(1, args.gd_depth + 1)]
        out["gd_sequence"] = seq
        out["gd_delta"] = rep.raw - seq[-1]
    if args.box:
        fit = estimate.box_dimension_1d(sys_obj, range(4, args.box + 1))
        out["box_fit"] = fit.to_json_dict()
        out["box_delta"] = rep.dimension - fit.slope
    _emit(out, args)
    return EXIT_OK


def cmd_phi(args) -> int:
    sys_obj, p = _load_cfs(args)
    series = entropy.phi_series(sys_obj, p, tol=args.tol)
    out = {"series": series.to_json_dict(),
           "lower_bound": entropy.phi_lower_bound(sys_obj, p)}
    if args.mc_samples:
        mc = entropy.phi_monte_carlo(sys_obj, p, args.mc_samples, args.seed)
        out["monte_carlo"] = mc.to_json_dict()
    _emit(out, args)
    return EXIT_OK


def cmd_rw_entropy(args) -> int:
    sys_obj, p = _load_cfs(args)
    closed = entropy.rw_entropy_closed(sys_obj, p, tol=args.tol)
    out = {"closed_form": closed.to_json_dict()}
    if args.depth:
        bf = entropy.rw_entropy_bruteforce(sys_obj, p, args.depth)
        out["brute_force"] = bf.to_json_dict()
    _emit(out, args)
    return EXIT_OK


def cmd_esc_probe(args) -> int:
    sys_obj, _ = load_system(args.system)
    errs = validate_system(sys_obj)
    if errs:
        raise ValidationError("; ".join(errs))
    res = separation.esc_probe(sys_obj, args.n_max)
    if args.csv:
        lines = ["n,min_gap,implied_b"]
        for row in res.rows:
            lines.append(f"{row.depth},{row.min_gap},{row.implied_b}")
        with open(args.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit(res.to_json_dict(), args)
    return EXIT_OK


def cmd_fourcorner(args) -> int:
    sys_obj = _load_4c(args)
    conditions = fourcorner.validate_4c(sys_obj)
    out = {"conditions": conditions}
    if conditions["open_set_ok"]:
        prob, s = fourcorner.natural_p(sys_obj)
        value, holds = fourcorner.suff_check(sys_obj)
        out["s"] = s
        out["natural_p"] = list(prob.p)
        out["suff_value"] = value
        out["suff_holds"] = holds
        out["set_dimension"] = fourcorner.set_dimension_4c(sys_obj).to_json_dict()
        if args.probabilities == "natural":
            p = prob
        elif args.probabilities == "uniform":
            p = fourcorner.FourCornerProb.uniform()
        else:
            p = fourcorner.FourCornerProb(json.loads(args.probabilities))
        out["measure_dimension"] = fourcorner.measure_dimension_4c(
            sys_obj, p, tol=args.tol).to_json_dict()
    _emit(out, args)
    return EXIT_OK


def cmd_render(args) -> int:
    sys_obj = _load_4c(args)
    if args.mode == "cylinders":
        fourcorner.render_cylinders_svg(sys_obj, args.depth, args.out)
    else:
        fourcorner.render_attractor_ppm(sys_obj, args.points, args.seed,
                                        args.out)
    print(json.dumps({"written": args.out, "mode": args.mode}, sort_keys=True))
    return EXIT_OK


def cmd_estimate(args) -> int:
    m_range = range(args.m_lo, args.m_hi + 1)
    if args.kind == "box2d":
        sys_obj = _load_4c(args)
        fit = estimate.box_dimension_2d(sys_obj, m_range, args.points,
                                        args.seed)
    elif args.kind == "box1d":
        sys_obj, _ = load_system(args.system)
        fit = estimate.box_dimension_1d(sys_obj, m_range)
    else:
        sys_obj, p = _load_cfs(args)
        fit = estimate.entropy_slope(sys_obj, p, args.points, m_range,
                                     args.seed)
    _emit(fit.to_json_dict(), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfsdim",
        description="Dimensions of self-similar measures and attractors for "
                    "common-fixed-point IFSs on the line.")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("CFSDIM_THREADS", "1")),
                        help="worker threads for parallel internals")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, prob=True):
        p.add_argument("system", help="JSON system descriptor path")
        if prob:
            p.add_argument("--probabilities", default=None,
                           help='"uniform", "natural" (4-corner), or JSON list')
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p = sub.add_parser("measure-dim", help="dimension of the self-similar measure")
    add_common(p)
    p.set_defaults(fn=cmd_measure_dim)

    p = sub.add_parser("attractor-dim", help="dimension of the attractor")
    add_common(p, prob=False)
    p.add_argument("--gd-depth", type=int, default=0,
                   help="also report the graph-directed roots s_1..s_k")
    p.add_argument("--box", type=int, default=0,
                   help="also report a box-counting fit up to this exponent")
    p.set_defaults(fn=cmd_attractor_dim)

    p = sub.add_parser("phi", help="overlap entropy correction Phi(p)")
    add_common(p)
    p.add_argument("--mc-samples", type=int, default=0)
    p.set_defaults(fn=cmd_phi)

    p = sub.add_parser("rw-entropy", help="random-walk entropy")
    add_common(p)
    p.add_argument("--depth", type=int, default=0,
                   help="also run the brute-force H_n to this depth")
    p.set_defaults(fn=cmd_rw_entropy)

    p = sub.add_parser("esc-probe", help="finite-depth separation probe")
    add_common(p, prob=False)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--csv", default=None, help="also write the per-n table as CSV")
    p.set_defaults(fn=cmd_esc_probe)

    p = sub.add_parser("fourcorner", help="4-corner conditions and dimensions")
    add_common(p)
    p.set_defaults(fn=cmd_fourcorner)

    p = sub.add_parser("render", help="render 4-corner cylinders or attractor")
    p.add_argument("system")
    p.add_argument("--mode", choices=["cylinders", "attractor"],
                   default="cylinders")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--points", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("estimate", help="empirical dimension estimates")
    add_common(p)
    p.add_argument("--kind", choices=["box1d", "box2d", "entropy"],
                   default="box1d")
    p.add_argument("--m-lo", type=int, default=4)
    p.add_argument("--m-hi", type=int, default=14)
    p.add_argument("--points", type=int, default=200_000)
    p.set_defaults(fn=cmd_estimate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, DegenerateMeasure) as exc:
        print(f"validation error: {exc}", file=_sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=_sys.stderr)
        return EXIT_BUDGET
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"config/IO error: {exc}", file=_sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
