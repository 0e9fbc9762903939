"""Command-line interface.

Subcommands: ``cover-build``, ``cover-tau``, ``cover-verify``, ``spectral``,
``nuclear`` and ``bench`` (``cover build`` etc. are accepted too). Exit
status is 0 on success, 1 on a domain error and 2 on a usage error.
"""

import argparse
import math
import sys
from dataclasses import replace

from .bench import load_config, parse_config, run_experiment, write_csv
from .covering.constructions import GOLDEN_ALPHA, GOLDEN_BETA, build
from .covering.discrepancy import estimate_tau, verify_cover
from .covering.sets import DEFAULT_BUDGET, load_hitting_set, save_hitting_set
from .exceptions import ParameterError, TensorCoverError
from .nuclear import CONSTRAINT_BUDGET, assemble_problem, solve_nuclear_sdp
from .spectral import als_refine, approx_spectral_norm
from .tensor import load_tensor, save_tensor


KINDS = ("grid", "random", "h2", "h3", "h4", "h5", "simplex", "pm_basis",
         "antipodal", "singleton")


def _num(x):
    return f"{x:.17g}"


def _vec(x):
    return " ".join(_num(v) for v in x)


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _set_args(p):
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--alpha", type=float, default=GOLDEN_ALPHA)
    p.add_argument("--beta", type=float, default=GOLDEN_BETA)
    p.add_argument("--count", type=int)


def _common(budget, seed=0):
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--threads", type=int, default=1,
                   help="thread-count hint (computation here is single threaded)")
    p.add_argument("--budget", type=int, default=budget)
    p.add_argument("--out")
    return p


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tensorcover",
        description="Sphere coverings and certified tensor-norm approximation.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sets_common = _common(DEFAULT_BUDGET)

    p = sub.add_parser("cover-build", parents=[sets_common],
                       help="construct a hitting set and write it")
    _set_args(p)

    p = sub.add_parser("cover-tau", parents=[sets_common],
                       help="estimate the covering level of a set")
    _set_args(p)
    p.add_argument("--hits", action="append")
    p.add_argument("--restarts", type=int, default=200)

    p = sub.add_parser("cover-verify", parents=[sets_common],
                       help="prove a covering level on a net")
    _set_args(p)
    p.add_argument("--hits", action="append")
    p.add_argument("--tau", type=float)
    p.add_argument("--grid-m", type=int)

    p = sub.add_parser("spectral", parents=[sets_common],
                       help="approximate the spectral norm of a tensor")
    p.add_argument("--tensor", required=True)
    p.add_argument("--hits", action="append")
    p.add_argument("--max-iter", type=int, default=0,
                   help="ALS sweeps after the enumeration (0 skips refinement)")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("nuclear", parents=[_common(CONSTRAINT_BUDGET)],
                       help="bound the nuclear norm of a tensor")
    p.add_argument("--tensor", required=True)
    p.add_argument("--hits", action="append")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=5000)

    p = sub.add_parser("bench", parents=[_common(CONSTRAINT_BUDGET, None)],
                       help="run an experiment described by a config file")
    p.add_argument("--config")
    return parser


def _hitting_set(args):
    if getattr(args, "hits", None):
        if len(args.hits) != 1:
            raise ParameterError("expected a single --hits file")
        return load_hitting_set(args.hits[0])
    if args.kind is None or args.n is None:
        raise ParameterError("give --hits FILE or --kind and --n")
    return build(args.kind, args.n, m=args.m, alpha=args.alpha, beta=args.beta,
                 count=args.count, seed=args.seed, budget=args.budget)


def _cmd_cover_build(args):
    H = _hitting_set(args)
    if args.out:
        save_hitting_set(args.out, H)
        print(f"wrote {len(H)} vectors in R^{H.n}, claimed_tau {_num(H.claimed_tau)}")
    else:
        from .covering.sets import format_hitting_set
        sys.stdout.write(format_hitting_set(H))


def _report_lines(H, rep):
    lines = [f"kind: {H.kind}", f"n: {H.n}", f"cardinality: {len(H)}",
             f"claimed_tau: {_num(H.claimed_tau)}",
             f"estimated_tau: {_num(rep.estimated_tau)}",
             f"witness: {_vec(rep.witness)}", f"samples: {rep.samples_used}"]
    return lines


def _cmd_cover_tau(args):
    H = _hitting_set(args)
    rep = estimate_tau(H, args.restarts, args.seed)
    _emit(_report_lines(H, rep), args.out)


def _cmd_cover_verify(args):
    H = _hitting_set(args)
    tau = H.claimed_tau if args.tau is None else args.tau
    if math.isnan(tau):
        raise ParameterError("set has no claimed tau; pass --tau")
    rep = verify_cover(H, tau, args.grid_m, args.budget)
    lines = _report_lines(H, rep)
    if rep.certified:
        lines.append(f"certified: yes (tau {_num(rep.certified_at[0])}, "
                     f"m {rep.certified_at[1]})")
    else:
        lines.append("certified: no")
    _emit(lines, args.out)
    return 0 if rep.certified else 1


def _hitting_sets(args):
    return [load_hitting_set(p) for p in args.hits] if args.hits else None


def _cmd_spectral(args):
    T = load_tensor(args.tensor)
    res = approx_spectral_norm(T, _hitting_sets(args), args.budget)
    lines = [f"value: {_num(res.value)}",
             f"bound_factor: {_num(res.bound_factor)}",
             f"enumerated: {res.enumerated_count}"]
    if args.max_iter > 0:
        ref = als_refine(T, res, args.max_iter, args.tol)
        lines.append(f"refined_value: {_num(ref.value)}")
        lines.append(f"refine_sweeps: {ref.iterations}")
        res = ref
    for k, z in enumerate(res.solution, 1):
        lines.append(f"z{k}: {_vec(z)}")
    _emit(lines, args.out)


def _cmd_nuclear(args):
    T = load_tensor(args.tensor)
    P = assemble_problem(T, _hitting_sets(args), args.budget)
    res = solve_nuclear_sdp(P, args.tol, args.max_iter)
    lines = [f"u: {_num(res.u)}", f"lower: {_num(res.lower)}",
             f"upper: {_num(res.upper)}", f"certified: {int(res.certified)}",
             f"converged: {int(res.converged)}", f"iterations: {res.iterations}",
             f"max_violation: {_num(res.max_violation)}",
             f"primal_residual: {_num(res.primal_residual)}",
             f"dual_residual: {_num(res.dual_residual)}"]
    if args.out:
        save_tensor(args.out, res.Y)
        lines.append(f"Y: {args.out}")
    sys.stdout.write("\n".join(lines) + "\n")


def _cmd_bench(args):
    # seed and budget from the command line override the config file
    overrides = {"seed": args.seed, "budget": args.budget}
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        cfg = parse_config("", **overrides)
    s = run_experiment(replace(cfg, out_dir=""))
    paths = write_csv(replace(cfg, out_dir=args.out or "."), s)
    for label, c in s.cells.items():
        print(f"{label}: instances {len(c.rows)} min {_num(c.min_bound)} "
              f"max {_num(c.max_bound)} mean {_num(c.mean_bound)} "
              f"optimal% {_num(c.pct_optimal)}")
    for p in paths:
        print(f"wrote {p}")


COMMANDS = {
    "cover-build": _cmd_cover_build,
    "cover-tau": _cmd_cover_tau,
    "cover-verify": _cmd_cover_verify,
    "spectral": _cmd_spectral,
    "nuclear": _cmd_nuclear,
    "bench": _cmd_bench,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if len(argv) >= 2 and argv[0] == "cover" and not argv[1].startswith("-"):
        argv = [f"cover-{argv[1]}"] + argv[2:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        status = COMMANDS[args.command](args)
    except (TensorCoverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return status or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
