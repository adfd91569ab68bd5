"""Command line front end: invert, cdf, bounds, sweep and bench.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 no convergence
(or, for bench, a point that missed the residual contract).
"""

import argparse
import json
import math
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .beta_cdf import as_params, cdf_pair
from .dispatch import CONTRACT, DOUBLE, SCHEMES, invert, plain_snm_method
from .errors import ConvergenceError, DomainError
from .result import MethodKind
from .tail_bounds import lower_tail_interval, upper_tail_interval

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

CSV_HEADER = "p,q,alpha,x,residual,iterations,method,time_ns"

# the reference timing grid
BENCH_ALPHAS = (1e-6, 1e-4, 0.3, 0.7, 0.999)
BENCH_PQ = ((4.0, 3.0), (50.0, 60.0), (100.0, 80.0), (150.0, 1.0), (300.0, 400.0))
BENCH_METHODS = {
    "M1": lambda p, q: MethodKind.ASYMP_ERF_SEEDED,
    "M2": lambda p, q: MethodKind.ASYMP_GAMMA_SEEDED,
    "M3": plain_snm_method,
}


def fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _result_dict(p, q, alpha, res):
    return {
        "p": p, "q": q, "alpha": alpha,
        "x": res.x, "complement": res.complement, "residual": res.residual,
        "iterations": res.iterations, "method": res.method.value,
        "reflected": res.reflected, "converged": res.converged,
        "underflow": res.underflow, "note": res.note,
    }


def _emit(d, as_json, out):
    if as_json:
        out.write(json.dumps(d) + "\n")
        return
    width = max(len(k) for k in d)
    for k, v in d.items():
        out.write(f"{k:<{width}}  {fmt(v)}\n")


def cmd_invert(args, out):
    res = invert(args.p, args.q, args.alpha, scheme=args.scheme, method=args.method)
    _emit(_result_dict(args.p, args.q, args.alpha, res), args.json, out)
    return 0


def cmd_cdf(args, out):
    prm = as_params(args.p, args.q)
    if not (0.0 <= args.x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {args.x!r}")
    cv = cdf_pair(prm, args.x, 1.0 - args.x)
    d = {"p": args.p, "q": args.q, "x": args.x, "cdf": cv.value, "sf": cv.complement}
    if args.json:
        _emit(d, True, out)
    else:
        out.write(fmt(cv.value) + "\n")
    return 0


def cmd_bounds(args, out):
    tail = args.tail
    if tail == "auto":
        tail = "lower" if args.alpha <= 0.5 else "upper"
    fn = lower_tail_interval if tail == "lower" else upper_tail_interval
    iv = fn(args.p, args.q, args.alpha, n_iter=args.iters)
    d = {
        "p": args.p, "q": args.q, "alpha": args.alpha, "tail": iv.tail,
        "lower": iv.lower, "upper": iv.upper,
        # bounds on 1 - x; the only accurate ones in the upper tail
        "complement_lower": iv.complement_lower, "complement_upper": iv.complement_upper,
        "iterations": iv.iterations_used, "applicable": iv.applicable, "truncated": iv.truncated,
    }
    _emit(d, args.json, out)
    return 0


def _axis(rng, mode, lo, hi):
    if mode == "log":
        return math.exp(rng.uniform(math.log(lo), math.log(hi)))
    while True:
        v = rng.uniform(lo, hi)
        if lo < v < hi or lo == hi:
            return v


def sample_points(spec):
    """The (p, q, alpha) list of a sweep; deterministic for a given seed."""
    (p0, p1), (q0, q1), (a0, a1) = spec.p_range, spec.q_range, spec.alpha_range
    if spec.mode == "grid":
        n = max(1, round(spec.points ** (1.0 / 3.0)))
        # cell midpoints, so open ranges such as alpha in (0, 1) are respected
        axis = [lambda lo, hi, i=i: lo + (hi - lo) * (i + 0.5) / n for i in range(n)]
        return [(fp(p0, p1), fq(q0, q1), fa(a0, a1)) for fp in axis for fq in axis for fa in axis]
    rng = random.Random(spec.seed)
    return [(_axis(rng, spec.mode, p0, p1), _axis(rng, spec.mode, q0, q1), _axis(rng, spec.mode, a0, a1))
            for _ in range(spec.points)]


def _sweep_point(point, scheme, method):
    p, q, a = point
    t0 = time.perf_counter_ns()
    try:
        res = invert(p, q, a, scheme=scheme, method=method)
    except (DomainError, ConvergenceError) as exc:
        return (p, q, a, math.nan, math.nan, -1, "error:" + type(exc).__name__, time.perf_counter_ns() - t0)
    dt = time.perf_counter_ns() - t0
    return (p, q, a, res.x, res.residual, res.iterations, res.method.value, dt)


def _percentile(sorted_vals, frac):
    if not sorted_vals:
        return math.nan
    k = min(len(sorted_vals) - 1, int(frac * len(sorted_vals)))
    return sorted_vals[k]


def summarize(records, seed=None):
    ok = [r for r in records if not r[6].startswith("error:")]
    res = sorted(r[4] for r in ok)
    hist = {}
    methods = {}
    for r in ok:
        hist[r[5]] = hist.get(r[5], 0) + 1
    for r in records:
        methods[r[6]] = methods.get(r[6], 0) + 1
    return {
        "points": len(records),
        "failures": len(records) - len(ok),
        "seed": seed,
        "max_residual": res[-1] if res else None,
        "p50_residual": _percentile(res, 0.5) if res else None,
        "p99_residual": _percentile(res, 0.99) if res else None,
        "max_iterations": max(hist) if hist else None,
        "iterations": {str(k): hist[k] for k in sorted(hist)},
        "methods": dict(sorted(methods.items())),
        "total_time_ns": sum(r[7] for r in records),
    }


def run_sweep(spec, workers=1):
    points = sample_points(spec)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps sample order
            records = list(pool.map(lambda pt: _sweep_point(pt, spec.scheme, spec.method), points))
    else:
        records = [_sweep_point(pt, spec.scheme, spec.method) for pt in points]
    return records, summarize(records, spec.seed)


def cmd_sweep(args, out):
    if args.points < 1:
        raise DomainError("--points must be >= 1")
    for name in ("p_range", "q_range"):
        lo, hi = getattr(args, name)
        if not (0.0 < lo <= hi):
            raise DomainError(f"--{name.replace('_', '-')} needs 0 < min <= max")
    a0, a1 = args.alpha_range
    if not (0.0 <= a0 <= a1 <= 1.0):
        raise DomainError("--alpha-range needs 0 <= min <= max <= 1")
    if args.mode == "log" and a0 <= 0.0:
        raise DomainError("log sampling needs a positive alpha minimum")
    records, agg = run_sweep(args, workers=args.workers)
    dest = open(args.out, "w") if args.out else out
    try:
        if args.format == "json":
            keys = CSV_HEADER.split(",")
            rows = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in zip(keys, r)}
                    for r in records]
            dest.write(json.dumps({"records": rows, "summary": agg}) + "\n")
        else:
            dest.write(CSV_HEADER + "\n")
            for r in records:
                dest.write(",".join(fmt(v) for v in r) + "\n")
            dest.write("# " + json.dumps(agg) + "\n")
    finally:
        if dest is not out:
            dest.close()
    return 0


def cmd_bench(args, out):
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in names:
        if m not in BENCH_METHODS:
            raise DomainError(f"unknown bench method {m!r}; choose from {sorted(BENCH_METHODS)}")
    if args.runs < 1:
        raise DomainError("--runs must be >= 1")
    rows = []
    bad = 0
    for a in BENCH_ALPHAS:
        for p, q in BENCH_PQ:
            row = {"alpha": a, "p": p, "q": q}
            for name in names:
                method = BENCH_METHODS[name](p, q)
                t0 = time.process_time()
                for _ in range(args.runs):
                    res = invert(p, q, a, method=method)
                row[name + "_seconds"] = time.process_time() - t0
                row[name + "_residual"] = res.residual
                if not res.residual <= CONTRACT[DOUBLE]:
                    bad += 1
            rows.append(row)
    if args.json:
        out.write(json.dumps({"runs": args.runs, "rows": rows, "contract_failures": bad}) + "\n")
    else:
        out.write(f"CPU seconds for {args.runs} runs (machine dependent)\n")
        head = f"{'alpha':>8} {'p':>6} {'q':>6}" + "".join(f" {n:>10}" for n in names)
        out.write(head + "\n")
        for row in rows:
            line = f"{row['alpha']:>8g} {row['p']:>6g} {row['q']:>6g}"
            line += "".join(f" {row[n + '_seconds']:>10.4f}" for n in names)
            out.write(line + "\n")
        out.write(f"contract failures: {bad}\n")
    return EXIT_CONVERGENCE if bad else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="betainv", description="Quantiles of the beta distribution.")
    sub = ap.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("invert", help="solve I_x(p,q) = alpha for x")
    pi.add_argument("--p", type=float, required=True)
    pi.add_argument("--q", type=float, required=True)
    pi.add_argument("--alpha", type=float, required=True)
    pi.add_argument("--scheme", choices=SCHEMES, default=DOUBLE)
    pi.add_argument("--method", choices=[m.value for m in MethodKind], default=None,
                    help="force a method, skipping closed forms and region selection")
    pi.add_argument("--json", action="store_true")
    pi.set_defaults(func=cmd_invert)

    pc = sub.add_parser("cdf", help="evaluate I_x(p,q)")
    pc.add_argument("--p", type=float, required=True)
    pc.add_argument("--q", type=float, required=True)
    pc.add_argument("--x", type=float, required=True)
    pc.add_argument("--json", action="store_true")
    pc.set_defaults(func=cmd_cdf)

    pb = sub.add_parser("bounds", help="tail bounds on the quantile")
    pb.add_argument("--p", type=float, required=True)
    pb.add_argument("--q", type=float, required=True)
    pb.add_argument("--alpha", type=float, required=True)
    pb.add_argument("--iters", type=int, default=3)
    pb.add_argument("--tail", choices=("auto", "lower", "upper"), default="auto")
    pb.add_argument("--json", action="store_true")
    pb.set_defaults(func=cmd_bounds)

    ps = sub.add_parser("sweep", help="invert over sampled points and report residuals")
    ps.add_argument("--p-range", type=float, nargs=2, default=(0.5, 1.5), metavar=("MIN", "MAX"))
    ps.add_argument("--q-range", type=float, nargs=2, default=(0.7, 1.5), metavar=("MIN", "MAX"))
    ps.add_argument("--alpha-range", type=float, nargs=2, default=(0.0, 1.0), metavar=("MIN", "MAX"))
    ps.add_argument("--points", type=int, default=100000)
    ps.add_argument("--mode", choices=("uniform", "log", "grid"), default="uniform")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--scheme", choices=SCHEMES, default=DOUBLE)
    ps.add_argument("--method", choices=[m.value for m in MethodKind], default=None)
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.add_argument("--out", default=None, help="file to write instead of stdout")
    ps.add_argument("--workers", type=int, default=1)
    ps.set_defaults(func=cmd_sweep)

    pm = sub.add_parser("bench", help="time the three strategies on the reference grid")
    pm.add_argument("--runs", type=int, default=20000)
    pm.add_argument("--methods", default="M1,M2,M3",
                    help="M1 erf seed + SNM, M2 gamma seed + SNM, M3 SNM only")
    pm.add_argument("--json", action="store_true")
    pm.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
