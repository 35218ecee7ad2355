"""Command-line front end: one subcommand per module, results emitted as a bundle."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, arith, expsums, gpy, maynard, primes, progressions, singular, suite, tuples
from .errors import KTupleError, PartialResultError
from .report import OUTPUT_FORMATS, ReportBundle, ResultEntry, RunConfig, default_cache_dir, emit, provenance, rows_to_csv
from .simplex import SymmetricPoly

log = logging.getLogger("ktuple")


def _config(args) -> RunConfig:
    return RunConfig(
        cache_dir=args.cache or default_cache_dir(),
        memory_budget=args.memory_budget,
        thread_count=args.threads,
        output=args.format,
        seed=args.seed,
    )


def _table(cfg: RunConfig, limit: int) -> primes.PrimeTable:
    return primes.sieve(limit, cache_dir=cfg.cache_dir, memory_budget=cfg.memory_budget, workers=cfg.thread_count)


def _entry(module, op, params, value, passed=None) -> ResultEntry:
    return ResultEntry(f"{module}.{op}", module, op, params, value, passed)


# -- subcommand handlers: each returns a bundle, or a str for raw CSV tables ---------


def cmd_primes(args, cfg):
    tab = _table(cfg, args.limit)
    x = args.theta if args.theta is not None else args.limit
    value = {"limit": args.limit, "pi": tab.pi(args.limit), "theta": primes.theta(tab, x), "theta_at": x}
    return [_entry("primes", "sieve", {"limit": args.limit}, value)]


def cmd_arith(args, cfg):
    out = []
    if args.lambda_k:
        n, k = args.lambda_k
        v = arith.lambda_k(n, k)
        out.append(_entry("arith", "lambda_k", {"n": n, "k": k}, {"expression": str(v), "value": v.value()}))
    if args.tau_average:
        avg, dev = arith.hyperbola_tau_average(args.tau_average)
        out.append(_entry("arith", "hyperbola_tau_average", {"x": args.tau_average}, {"average": avg, "deviation": dev}))
    if args.check or not out:
        N = args.check_n
        lam = arith.von_mangoldt(N)
        checks = {
            "mu_star_L": arith.mismatches(arith.dirichlet_convolve(arith.mobius(N), arith.log_seq(N)), lam),
            "vaughan": arith.mismatches(arith.vaughan_decompose(N, args.U, args.U).full(), lam),
            "heathbrown_k2": arith.mismatches(arith.heathbrown_decompose(N, max(args.U, int(N**0.5) + 1), 2), lam),
        }
        value = {key: len(bad) for key, bad in checks.items()}
        out.append(_entry("arith", "identity_check", {"N": N, "U": args.U}, value, not any(value.values())))
    return out


def _tuple_entry(t: tuples.KTuple, op: str) -> ResultEntry:
    ok, prof = tuples.is_admissible(t)
    value = {
        "offsets": list(t.offsets),
        "width": t.width,
        "admissible": ok,
        "obstructions": prof.obstructions,
        "profile": prof.as_dict(),
    }
    return _entry("tuples", op, {"k": t.k}, value)


def cmd_tuples(args, cfg):
    if args.action == "check":
        t = tuples.KTuple(tuple(tuples.TUPLE_50)) if args.offsets == "published50" else tuples.KTuple.parse(args.offsets)
        return [_tuple_entry(t, "is_admissible")]
    witness = None
    if args.witness:
        witness = tuples.KTuple.parse(Path(args.witness).read_text().strip())
    stats = tuples.SearchStats()
    try:
        t = tuples.narrowest_search(args.k, args.budget, witness=witness, time_limit=args.time_limit, stats=stats)
    except PartialResultError as exc:
        best = exc.best
        value = {"best": list(best.offsets) if best else None, "best_width": best.width if best else None}
        e = ResultEntry("tuples.narrowest_search", "tuples", "narrowest_search", {"k": args.k, "budget": args.budget}, value, False, str(exc))
        return [e]
    if t is None:
        return [_entry("tuples", "narrowest_search", {"k": args.k, "budget": args.budget}, {"found": None})]
    e = _tuple_entry(t, "narrowest_search")
    e.params = {"k": args.k, "budget": args.budget}
    e.value["widths_tried"] = stats.widths_tried
    return [e]


def cmd_singular(args, cfg):
    t = tuples.KTuple.parse(args.offsets)
    s = singular.singular_series(t, precision=args.precision)
    value = {
        "value": float(s.value),
        "digits": str(s.value)[:22],
        "truncation_prime": s.truncation_prime,
        "tail_bound": s.tail_bound,
        "obstructions": list(s.obstructions),
    }
    return [_entry("singular", "singular_series", {"offsets": list(t.offsets), "precision": args.precision}, value)]


def cmd_predict(args, cfg):
    t = tuples.KTuple.parse(args.offsets)
    xs = [int(float(x)) for x in args.x.split(",")]
    tab = _table(cfg, max(xs))
    rows = [singular.predict_and_count(t, x, tab).row() for x in xs]
    if cfg.output == "csv":
        return rows_to_csv(rows, ["x", "actual", "pred_pow", "pred_integral", "ratio"])
    return [_entry("singular", "predict_and_count", {"offsets": list(t.offsets), "x": x}, r) for x, r in zip(xs, rows)]


def cmd_gpy(args, cfg):
    if args.action == "rho":
        rho = gpy.rho_k_closed_form(args.k, args.l)
        return [_entry("gpy", "rho_k_closed_form", {"k": args.k, "l": args.l}, {"rho": rho, "float": float(rho)})]
    if args.action == "check":
        c = gpy.GPYCondition(args.k, args.l, Fraction(args.eta))
        ok = gpy.gpy_theorem_condition(c)
        return [_entry("gpy", "gpy_theorem_condition", {"k": args.k, "l": args.l, "eta": c.eta}, {"holds": ok})]
    t = tuples.KTuple.parse(args.offsets)
    y = gpy.rational_y(args.R, lambda q: (1 - q) ** args.l)
    a, b = gpy.s1_exact(t, args.R, y)
    return [_entry("gpy", "s1_exact", {"offsets": list(t.offsets), "R": args.R, "l": args.l}, {"direct": a, "reciprocity": b}, a == b)]


def cmd_maynard(args, cfg):
    if args.action == "opt":
        r = maynard.optimize_rho(maynard.build_forms(args.k, args.degree))
        value = r.as_dict()
        value["gate"] = maynard.rho_gate(r.rho, args.h)
        value["tao_upper_bound"] = maynard.tao_upper_bound(args.k)
        return [_entry("maynard", "optimize_rho", {"k": args.k, "degree_cap": args.degree}, value)]
    if args.action == "rho":
        coeffs = [Fraction(c) for c in args.coeffs.split(",")]
        F = SymmetricPoly.parse(coeffs, args.basis.split(","))
        rho = maynard.evaluate_rho(F, args.k)
        return [_entry("maynard", "evaluate_rho", {"k": args.k, "coeffs": args.coeffs, "basis": args.basis}, {"rho": rho, "float": float(rho)})]
    if args.action == "product":
        A = args.A if args.A is not None else maynard.standard_A(args.k)
        b = maynard.product_construction_bound(args.k, A)
        return [_entry("maynard", "product_construction_bound", {"k": args.k, "A": A}, b.as_dict())]
    k = maynard.m_to_k(args.m)
    tab = _table(cfg, int(2 * k * math.log(k)) + 1)
    bm = maynard.b_m(args.m, tab)
    return [_entry("maynard", "b_m", {"m": args.m}, bm.as_dict(), all(bm.pi_checks))]


def cmd_bv(args, cfg):
    x = int(float(args.x))
    Q = args.Q if args.Q is not None else progressions.bv_default_Q(x)
    tab = _table(cfg, x)
    total, scan = progressions.bv_sum(x, Q, tab, args.filter, y=args.y, fixed_a=args.a)
    if cfg.output == "csv":
        return rows_to_csv(scan.csv_rows(), ["q", "P(q)", "squarefree", "maxE", "worst_a"])
    params = {"x": x, "Q": Q, "filter": args.filter, "y": args.y, "a": args.a}
    return [_entry("progressions", "bv_sum", params, {"total": total, "normalized": total / x, "moduli": len(scan.rows), "partition_ok": scan.partition_ok})]


def cmd_expsum(args, cfg):
    if args.sweep:
        w = expsums.weil_sweep(args.sweep, cfg.seed)
        return [_entry("expsums", "weil_sweep", {"samples": args.sweep, "seed": cfg.seed}, {"kappa_obs": w.kappa_obs, "worst": w.worst})]
    interval = tuple(int(v) for v in args.interval.split(",")) if args.interval else None
    spec = expsums.ExpSumSpec(args.q, args.a, args.b, args.delta, args.c, interval)
    if args.split is not None:
        q1, q2 = expsums.split_modulus(args.q, args.split)
        g = expsums.graham_ringrose_bound(spec, q1, q2)
        value = {"actual": g.actual, "bound": g.bound, "ratio": g.ratio, "path": g.path, "q1": q1, "q2": q2, "N": g.N}
        return [_entry("expsums", "graham_ringrose_bound", {"q": args.q, "y": args.split, "interval": interval}, value)]
    if interval is not None:
        s, dec = expsums.incomplete_via_plancherel(spec)
        value = {"S": s.value, "abs": s.modulus_of_value, "terms": s.count, "reconstructed": dec.reconstructed, "gap": dec.relative_gap}
        return [_entry("expsums", "incomplete_via_plancherel", {"q": args.q, "interval": interval}, value)]
    s = expsums.complete_sum_crt(spec)
    value = {"S": s.value, "abs": s.modulus_of_value, "normalized": s.normalized, "terms": s.count}
    return [_entry("expsums", "complete_sum_crt", {"q": args.q, "a": args.a, "b": args.b, "delta": args.delta, "c": args.c}, value)]


def cmd_suite(args, cfg):
    bundle = suite.run_suite(cfg, only=args.only)
    for name, dt in bundle.timings.items():
        log.info("%s: %.1fs", name, dt)
    return bundle


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktuple", description="Prime k-tuple laboratory.")
    p.add_argument("--version", action="version", version=f"ktuple {__version__}")
    p.add_argument("--cache", type=Path, default=None, help="prime table cache directory (default $KTUPLE_CACHE or ~/.cache/ktuple)")
    p.add_argument("--memory-budget", type=int, default=2 << 30, help="bytes available to the sieve")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=OUTPUT_FORMATS, default="json")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("primes", help="sieve, pi(x) and Chebyshev theta")
    s.add_argument("limit", type=lambda v: int(float(v)))
    s.add_argument("--theta", type=lambda v: int(float(v)), default=None, help="evaluate theta at this x instead of the limit")
    s.set_defaults(func=cmd_primes)

    s = sub.add_parser("arith", help="Dirichlet identities, generalized von Mangoldt, divisor averages")
    s.add_argument("--check", action="store_true", help="verify Lambda = mu*L, Vaughan and Heath-Brown exactly")
    s.add_argument("--check-n", type=int, default=10**4)
    s.add_argument("--U", type=int, default=21)
    s.add_argument("--lambda-k", type=int, nargs=2, metavar=("N", "K"))
    s.add_argument("--tau-average", type=lambda v: int(float(v)), metavar="X")
    s.set_defaults(func=cmd_arith)

    s = sub.add_parser("tuples", help="admissibility and narrowest admissible tuples")
    ts = s.add_subparsers(dest="action", required=True)
    c = ts.add_parser("check", help="residue profile of a tuple")
    c.add_argument("offsets", help="comma separated offsets, or 'published50'")
    c = ts.add_parser("search", help="narrowest admissible k-tuple by exhaustive search")
    c.add_argument("k", type=int)
    c.add_argument("--budget", type=int, default=400, help="largest width to consider")
    c.add_argument("--witness", help="file with a known admissible tuple (comma separated)")
    c.add_argument("--time-limit", type=float, default=None, help="seconds before returning the best so far")
    s.set_defaults(func=cmd_tuples)

    s = sub.add_parser("singular", help="singular series of a tuple")
    s.add_argument("offsets")
    s.add_argument("--precision", type=float, default=1e-15)
    s.set_defaults(func=cmd_singular)

    s = sub.add_parser("predict", help="tuplet counts against the singular-series prediction")
    s.add_argument("offsets")
    s.add_argument("--x", default="1e5,1e6,1e7", help="comma separated x values")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("gpy", help="one-variable sieve functional and its criteria")
    gs = s.add_subparsers(dest="action", required=True)
    c = gs.add_parser("rho", help="closed form rho_k(l)")
    c.add_argument("k", type=int)
    c.add_argument("l", type=int)
    c = gs.add_parser("check", help="level-of-distribution condition for (k, l, eta)")
    c.add_argument("k", type=int)
    c.add_argument("l", type=int)
    c.add_argument("eta", help="rational, e.g. 2/863")
    c = gs.add_parser("s1", help="exact S1 by both weight systems")
    c.add_argument("offsets")
    c.add_argument("--R", type=int, default=100)
    c.add_argument("--l", type=int, default=1)
    s.set_defaults(func=cmd_gpy)

    s = sub.add_parser("maynard", help="multidimensional sieve functional")
    ms = s.add_subparsers(dest="action", required=True)
    c = ms.add_parser("opt", help="optimize rho over the symmetric basis")
    c.add_argument("k", type=int)
    c.add_argument("--degree", type=int, default=11, help="degree cap a + 2b")
    c.add_argument("--h", type=int, default=1, help="gate rho > 4h / 2h")
    c = ms.add_parser("rho", help="exact rho of a polynomial in P1, P2")
    c.add_argument("k", type=int)
    c.add_argument("--coeffs", required=True, help="e.g. 70,-49,-75,83,-34")
    c.add_argument("--basis", required=True, help="e.g. P1P2,P1^2,P2,P1,1")
    c = ms.add_parser("product", help="product-construction lower bound")
    c.add_argument("k", type=int)
    c.add_argument("--A", type=float, default=None)
    c = ms.add_parser("bm", help="m -> k -> admissible construction and width")
    c.add_argument("m", type=int)
    s.set_defaults(func=cmd_maynard)

    s = sub.add_parser("bv", help="primes in progressions: summed maximal errors")
    s.add_argument("x")
    s.add_argument("--Q", type=int, default=None, help="default floor(sqrt(x)/log(x)^2)")
    s.add_argument("--filter", choices=progressions.FILTERS, default="all")
    s.add_argument("--y", type=int, default=None, help="smoothness bound")
    s.add_argument("--a", type=int, default=None, help="fixed residue instead of the max over a")
    s.set_defaults(func=cmd_bv)

    s = sub.add_parser("expsum", help="Kloosterman-type exponential sums")
    s.add_argument("q", type=int, nargs="?", default=7)
    s.add_argument("--a", type=int, default=1)
    s.add_argument("--b", type=int, default=0)
    s.add_argument("--delta", type=int, default=1)
    s.add_argument("--c", type=int, default=0)
    s.add_argument("--interval", default=None, help="N1,N2 inclusive")
    s.add_argument("--split", type=int, default=None, metavar="Y", help="split-modulus bound with smoothness Y")
    s.add_argument("--sweep", type=int, default=None, metavar="SAMPLES", help="prime-modulus ratio sweep")
    s.set_defaults(func=cmd_expsum)

    s = sub.add_parser("suite", help="run the full reproduction suite")
    s.add_argument("--only", default=None, help="module names or criterion numbers, comma separated")
    s.add_argument("--out", type=Path, default=None, help="write the bundle here instead of stdout")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
        result = args.func(args, cfg)
    except KTupleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, str):
        sys.stdout.write(result)
        return 0
    if isinstance(result, ReportBundle):
        bundle = result
    else:
        bundle = ReportBundle(result, provenance())
    data = emit(bundle, cfg.output)
    out = getattr(args, "out", None)
    if out is not None:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.write("\n")
    if any(e.error for e in bundle.entries) and args.command != "suite":
        return 2
    return 0 if bundle.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
