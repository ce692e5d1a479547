"""Command-line harness: curves, finite-N experiments, verification suite.

Commands
    rs-curve   lambda, q*, phi_RS, saddle, MI, MMSE along a lambda grid
    saddle     saddle value, outer maximizer m*, inner minimizer, gap to phi_RS
    se         state-evolution traces q_t per lambda
    finite-n   free-entropy estimates across system sizes
    fp         Franz-Parisi potential profile over the overlap windows
    verify     the named inequality/identity suite; exit 1 on any failure

Every run resolves its full configuration (flags, seed, version) into the
artifact header/envelope, and the master seed defaults to a fixed constant
(overridable by REPLICA_LAB_SEED or --seed), so identical invocations yield
byte-identical artifacts.  Lambda ranges are start:stop:step, endpoint
included when it lies within half a step.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .errors import (
    DomainError,
    EnumerationBudgetError,
    InvalidArgumentError,
    InvalidPriorError,
    NumericalError,
)
from .channel import make_evaluator
from .finite import (
    DEFAULT_BUDGET,
    MC_CSV_FIELDS,
    derive_seed,
    fp_potential,
    fp_profile,
    free_entropy_mc,
    mc_csv_record,
    sample_spike,
)
from .priors import parse_prior_spec, prior_to_json, second_moment
from .rs import CURVE_FIELDS, compute_curve, phi_rs, saddle, state_evolution
from .svg import line_chart_svg
from .verify import run_suite

DEFAULT_MASTER_SEED = 123456789
VERSION_STRING = f"replica-lab-v{__version__}"


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    """12 significant digits; enough to diff runs without print-rounding noise."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0.0:
            x = 0.0
        return f"{x:.12g}"
    return str(x)


def _json_clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    return obj


def parse_lambda_spec(spec: str) -> list:
    """"a:b:s" range (endpoint within half a step), comma list, or one value."""
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ValueError("range must be start:stop:step")
            a, b, s = (float(t) for t in parts)
            if s <= 0 or b < a:
                raise ValueError("need step > 0 and stop >= start")
            vals, k = [], 0
            while a + k * s <= b + s / 2.0:
                vals.append(a + k * s)
                k += 1
            return vals
        if "," in spec:
            return [float(t) for t in spec.split(",")]
        return [float(spec)]
    except ValueError as e:
        raise UsageError(f"bad lambda spec {spec!r}: {e}") from e


def parse_int_list(spec: str) -> list:
    try:
        return [int(t) for t in spec.split(",")]
    except ValueError as e:
        raise UsageError(f"bad integer list {spec!r}") from e


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("REPLICA_LAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as e:
            raise UsageError(f"REPLICA_LAB_SEED must be an integer, got {env!r}") from e
    return DEFAULT_MASTER_SEED


def _csv_text(config: dict, fields, rows) -> str:
    lines = [
        f"# {VERSION_STRING}",
        "# config " + json.dumps(_json_clean(config), sort_keys=True, separators=(",", ":")),
        ",".join(fields),
    ]
    for row in rows:
        lines.append(",".join(_fmt(row[f]) for f in fields))
    return "\n".join(lines) + "\n"


def _json_text(config: dict, results) -> str:
    envelope = {
        "config": _json_clean(config),
        "version": VERSION_STRING,
        "results": _json_clean(results),
    }
    return json.dumps(envelope, indent=2, sort_keys=True) + "\n"


def _write(path, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as f:
            f.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {path!r}: {e}") from e


def _maybe_plot(args, xs, series, labels, title, xlabel, ylabel):
    if not args.plot:
        return
    if args.out is None:
        raise UsageError("--plot needs --out to derive the SVG path")
    path = os.path.splitext(args.out)[0] + ".svg"
    _write(path, line_chart_svg(xs, series, labels, title, xlabel, ylabel))


def _emit(args, config, fields, rows, results_json=None):
    if args.format == "csv":
        _write(args.out, _csv_text(config, fields, rows))
    else:
        _write(args.out, _json_text(config, results_json if results_json is not None else rows))


def _add_common(sp, with_disorder=False):
    sp.add_argument("--prior", default="rademacher", help="prior spec, e.g. rademacher, sparse:0.25, asym:0.7, uniform:21")
    sp.add_argument("--seed", type=int, default=None, help="master seed (default: REPLICA_LAB_SEED env or a fixed constant)")
    sp.add_argument("--nodes", type=int, default=61, help="quadrature node count")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration budget in configurations")
    sp.add_argument("--out", default=None, help="output path (default: stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--plot", action="store_true", help="also write an SVG line chart next to --out")
    if with_disorder:
        sp.add_argument("--disorder", type=int, default=400, help="number of disorder replicas")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="replica-lab", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("rs-curve", help="RS formula curve over a lambda grid")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", default="0:6:0.25", help="lambda value, list, or start:stop:step")

    sp = sub.add_parser("saddle", help="saddle formula and its gap to phi_RS")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", default="0:6:0.25")

    sp = sub.add_parser("se", help="state evolution traces")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", default="0.5,1,2,4")
    sp.add_argument("--q", type=float, default=None, help="initial overlap (default: E[X^2])")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=1000)

    sp = sub.add_parser("finite-n", help="free entropy estimates across sizes")
    _add_common(sp, with_disorder=True)
    sp.add_argument("--lambda", dest="lam", default="2")
    sp.add_argument("--n", default="8,10,12", help="comma list of system sizes")

    sp = sub.add_parser("fp", help="Franz-Parisi potential profile over overlap windows")
    _add_common(sp, with_disorder=True)
    sp.add_argument("--lambda", dest="lam", default="2")
    sp.add_argument("--n", default="10")
    sp.add_argument("--eps", type=float, default=0.25, help="overlap window width")
    sp.add_argument("--m", type=float, default=None,
                    help="single window [m, m+eps) instead of the full profile")

    sp = sub.add_parser("verify", help="run the inequality/identity suite")
    _add_common(sp, with_disorder=True)
    sp.add_argument("--n", default="10")
    sp.set_defaults(format="json")
    return ap


def _run(args) -> int:
    prior = parse_prior_spec(args.prior)
    seed = _resolve_seed(args)
    ev = make_evaluator(args.nodes)
    m2 = second_moment(prior)

    if args.command == "rs-curve":
        lams = parse_lambda_spec(args.lam)
        config = {"command": args.command, "prior": prior_to_json(prior), "lambda": lams,
                  "nodes": args.nodes, "seed": seed, "format": args.format, "plot": args.plot}
        rows = compute_curve(prior, lams, ev)
        _emit(args, config, CURVE_FIELDS, rows)
        _maybe_plot(args, lams,
                    [[r["q_star"] for r in rows], [r["phi_rs"] for r in rows],
                     [r["mi"] for r in rows], [r["mmse"] for r in rows]],
                    ["q*", "phi_RS", "MI", "MMSE"],
                    f"RS curve ({prior.name})", "lambda", "value")
        return 0

    if args.command == "saddle":
        lams = parse_lambda_spec(args.lam)
        config = {"command": args.command, "prior": prior_to_json(prior), "lambda": lams,
                  "nodes": args.nodes, "seed": seed, "format": args.format, "plot": args.plot}
        rows = []
        for lam in lams:
            sad = saddle(prior, lam, ev)
            rs = phi_rs(prior, lam, ev)
            rows.append({"lambda": lam, "saddle": sad.value, "m_star": sad.optimizer_m,
                         "q_bar": sad.optimizer_q, "gap": abs(sad.value - rs.value)})
        _emit(args, config, ("lambda", "saddle", "m_star", "q_bar", "gap"), rows)
        _maybe_plot(args, lams,
                    [[r["saddle"] for r in rows], [r["m_star"] for r in rows]],
                    ["saddle", "m*"], f"Saddle formula ({prior.name})", "lambda", "value")
        return 0

    if args.command == "se":
        lams = parse_lambda_spec(args.lam)
        q0 = m2 if args.q is None else args.q
        config = {"command": args.command, "prior": prior_to_json(prior), "lambda": lams,
                  "q0": q0, "tol": args.tol, "max_iter": args.max_iter,
                  "nodes": args.nodes, "seed": seed, "format": args.format, "plot": args.plot}
        rows, traces = [], []
        for lam in lams:
            trace = state_evolution(prior, lam, q0, args.tol, args.max_iter, ev)
            traces.append(trace)
            for it, qv in enumerate(trace.iterates):
                rows.append({"lambda": lam, "iteration": it, "q": qv})
        _emit(args, config, ("lambda", "iteration", "q"), rows,
              results_json=[{"lambda": lam, "converged": t.converged,
                             "fixed_point": t.fixed_point, "iterates": t.iterates}
                            for lam, t in zip(lams, traces)])
        max_len = max(len(t.iterates) for t in traces)
        padded = [t.iterates + [t.iterates[-1]] * (max_len - len(t.iterates)) for t in traces]
        _maybe_plot(args, list(range(max_len)), padded,
                    [f"lambda={_fmt(lam)}" for lam in lams],
                    f"State evolution ({prior.name})", "iteration", "q")
        return 0

    if args.command == "finite-n":
        lam = parse_lambda_spec(args.lam)[0]
        sizes = parse_int_list(args.n)
        config = {"command": args.command, "prior": prior_to_json(prior), "lambda": lam,
                  "n": sizes, "disorder": args.disorder, "budget": args.budget,
                  "nodes": args.nodes, "seed": seed, "format": args.format, "plot": args.plot}
        rows = []
        for n in sizes:
            est = free_entropy_mc(prior, n, lam, args.disorder, derive_seed(seed, n), args.budget)
            rows.append(mc_csv_record(n, lam, "free_entropy", est))
        _emit(args, config, MC_CSV_FIELDS, rows)
        _maybe_plot(args, sizes, [[r["mean"] for r in rows]], ["F_N"],
                    f"Finite-size free entropy ({prior.name})", "n", "F_N")
        return 0

    if args.command == "fp":
        lam = parse_lambda_spec(args.lam)[0]
        n = parse_int_list(args.n)[0]
        config = {"command": args.command, "prior": prior_to_json(prior), "lambda": lam,
                  "n": n, "eps": args.eps, "m": args.m, "disorder": args.disorder,
                  "budget": args.budget, "nodes": args.nodes, "seed": seed,
                  "format": args.format, "plot": args.plot}
        spike = sample_spike(prior, n, derive_seed(seed, 0, 2))
        if args.m is not None:
            est = fp_potential(prior, n, lam, args.m, args.eps, spike, args.disorder,
                               derive_seed(seed, 1), args.budget)
            profile = [(args.m / args.eps, est)]
        else:
            profile = fp_profile(prior, n, lam, args.eps, spike, args.disorder,
                                 derive_seed(seed, 1), args.budget)
        rows = [
            mc_csv_record(n, lam, f"fp[m={_fmt(l * args.eps)};eps={_fmt(args.eps)}]", est)
            for l, est in profile
        ]
        _emit(args, config, MC_CSV_FIELDS, rows)
        _maybe_plot(args, [l * args.eps for l, _ in profile],
                    [[est.mean for _, est in profile]], ["Phi_eps"],
                    f"Franz-Parisi profile ({prior.name})", "m", "Phi_eps")
        return 0

    if args.command == "verify":
        n = parse_int_list(args.n)[0]
        config = {"command": args.command, "prior": prior_to_json(prior), "n": n,
                  "disorder": args.disorder, "budget": args.budget,
                  "nodes": args.nodes, "seed": seed, "format": args.format, "plot": args.plot}
        reports = run_suite(prior, n, args.disorder, seed, args.budget, ev)
        dicts = [r.to_dict() for r in reports]
        if args.format == "csv":
            fields = ("check", "slack", "stderr", "allowance", "pass")
            rows = [{"check": d["check"], "slack": d["slack"], "stderr": d["stderr"],
                     "allowance": d["allowance"], "pass": d["pass"]} for d in dicts]
            _write(args.out, _csv_text(config, fields, rows))
        else:
            _write(args.out, _json_text(config, dicts))
        return 0 if all(r.passed for r in reports) else 1

    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _run(args)
    except (UsageError, InvalidPriorError, InvalidArgumentError, DomainError,
            EnumerationBudgetError, NumericalError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
