"""Batch command-line surface: `jsq <subcommand> ...`.

Numbers print with 15 significant digits.  Exit codes: 0 success, 1 usage
or input error, 2 verification failure.  JSON output is a flat object with
a schema_version field.  Set JSQ_BACKEND=rational to run the closed forms
in exact arithmetic (small K paths).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import asymmetric, blocking, cohen, finite, infinite, model, oracle, simulate, totals
from ._num import as_number
from .kernel import conv_table
from .model import INFINITE, AsymmetricParams, SymmetricParams, validate_dist

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        raise UsageError(message)


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return f"{float(x):.15g}"


def emit_json(payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    print(json.dumps(payload, sort_keys=True))


def write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (int, float, Fraction)) else v for v in row])


def parse_rho(text: str):
    val = as_number(text)
    if os.environ.get("JSQ_BACKEND") == "rational" and not isinstance(val, Fraction):
        val = Fraction(text)
    return val


def parse_cap(text: str):
    if text.lower() in ("inf", "infinite", "oo"):
        return INFINITE
    return int(text)


def parse_grid(text: str) -> list:
    """start:stop:count, e.g. 0.01:6:600."""
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r}; expected start:stop:count") from exc
    if count < 2:
        raise UsageError("grid count must be >= 2")
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def _plot_path(out: str) -> str:
    base, _ = os.path.splitext(out)
    return base + ".png"


# ---------------------------------------------------------------------------


def cmd_blocking(args) -> int:
    rho = parse_rho(args.rho)
    if args.total_cap is not None:
        value = blocking.blocking_total_constraint(rho, args.total_cap)
        label = {"total_cap": args.total_cap}
    else:
        if args.cap is None:
            raise UsageError("--cap is required unless --total-cap is given")
        p = SymmetricParams(rho=rho, capacity=parse_cap(args.cap))
        value = blocking.blocking_probability_odd(p) if args.odd else blocking.blocking_probability(p)
        label = {"cap": p.K, "odd": bool(args.odd)}
    if args.json:
        emit_json({"command": "blocking", "rho": float(rho), **label, "value": float(value)})
    else:
        print(fmt(value))
    return 0


def cmd_dist(args) -> int:
    rho = parse_rho(args.rho)
    cap = parse_cap(args.cap)
    if cap == INFINITE:
        dist = infinite.stationary_infinite(rho, window=args.window)
    else:
        dist = finite.stationary_finite(SymmetricParams(rho=rho, capacity=cap))
    text = dist.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_kernel(args) -> int:
    rho = parse_rho(args.rho)
    table = conv_table(rho, args.kmax, args.jmax)
    rows = [[k, j, table.at(k, j)] for k in range(1, args.kmax + 1) for j in range(args.jmax + 1)]
    if args.out:
        write_csv(args.out, ["k", "j", "g_pow"], rows)
        print(f"wrote {args.out}")
    else:
        w = csv.writer(sys.stdout)
        w.writerow(["k", "j", "g_pow"])
        for row in rows:
            w.writerow([row[0], row[1], fmt(row[2])])
    return 0


def cmd_bounds(args) -> int:
    rho = parse_rho(args.rho)
    cap = parse_cap(args.cap)
    if cap == INFINITE:
        lo, hi = totals.mean_total_bounds_infinite(rho)
        payload = {"command": "bounds", "rho": float(rho), "cap": "inf",
                   "lower": float(lo), "upper": float(hi)}
        if args.json:
            emit_json(payload)
        else:
            print(f"lower {fmt(lo)}")
            print(f"upper {fmt(hi)}")
        return 0
    p = SymmetricParams(rho=rho, capacity=cap)
    lo, hi = totals.mean_total_bounds(p)
    exact = totals.mean_total(p)
    if args.json:
        emit_json({"command": "bounds", "rho": float(rho), "cap": p.K,
                   "mean": float(exact), "lower": float(lo), "upper": float(hi)})
    else:
        print(f"mean  {fmt(exact)}")
        print(f"lower {fmt(lo)}")
        print(f"upper {fmt(hi)}")
    return 0


def cmd_compare(args) -> int:
    grid = parse_grid(args.grid)
    report = totals.uniform_gap_report(args.cap, rho_grid=grid)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_csv())
        made = [args.out]
        if not args.no_plot:
            from . import plots

            png = _plot_path(args.out)
            plots.render_compare(report.rows, args.cap, png)
            made.append(png)
        print("wrote " + ", ".join(made))
    else:
        sys.stdout.write(report.to_csv())
    print(f"sup(mm1k gap) = {fmt(report.sup_mm1k_gap)} at rho = {fmt(report.sup_mm1k_arg)} "
          f"in [{fmt(report.mm1k_bracket[0])}, {fmt(report.mm1k_bracket[1])}]")
    print(f"sup(mm2 gap)  = {fmt(report.sup_mm2_gap)} at rho = {fmt(report.sup_mm2_arg)} "
          f"in [{fmt(report.mm2_bracket[0])}, {fmt(report.mm2_bracket[1])}]")
    return 0


def cmd_meansweep(args) -> int:
    grid = parse_grid(args.grid)
    cap = parse_cap(args.cap)
    rows = []
    if cap == INFINITE:
        for r in grid:
            if not 0 < r < 1:
                continue
            dist = infinite.stationary_infinite(r)
            mean = sum((j + k) * float(pr) for j, k, pr in dist.items())
            lo, hi = totals.mean_total_bounds_infinite(r)
            rows.append((r, mean, lo, hi))
        header = ["rho", "mean_windowed", "lower", "upper"]
    else:
        for r in grid:
            p = SymmetricParams(rho=r, capacity=cap)
            lo, hi = totals.mean_total_bounds(p)
            rows.append((r, float(totals.mean_total(p)), float(lo), float(hi)))
        header = ["rho", "mean", "lower", "upper"]
    if args.out:
        write_csv(args.out, header, rows)
        made = [args.out]
        if not args.no_plot:
            from . import plots

            png = _plot_path(args.out)
            if cap == INFINITE:
                plots.render_mean_bounds_infinite(rows, png)
            else:
                plots.render_mean_bounds(rows, cap, png)
            made.append(png)
        print("wrote " + ", ".join(made))
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return 0


def cmd_cohen(args) -> int:
    rho = parse_rho(args.rho)
    if args.eval is not None:
        value, err = cohen.cohen_A(float(rho), complex(args.eval).real, tol=args.tol)
        if args.json:
            emit_json({"command": "cohen", "rho": float(rho), "y": args.eval,
                       "value": float(value), "error_estimate": float(err)})
        else:
            print(f"{fmt(value)} (tail estimate {err:.3g})")
        return 0
    if args.coeffs is None:
        raise UsageError("give --eval Y or --coeffs KMAX")
    b = cohen.boundary_coeffs_infinite(float(rho), args.coeffs, tol=args.tol)
    rows = [(k, v) for k, v in enumerate(b.values)]
    if args.out:
        write_csv(args.out, ["k", "pi_0k"], rows)
        print(f"wrote {args.out}")
    else:
        for k, v in rows:
            print(f"{k},{fmt(v)}")
    return 0


def cmd_asym(args) -> int:
    p = AsymmetricParams(
        lam=as_number(args.lam), mu1=as_number(args.mu1), mu2=as_number(args.mu2),
        p1=as_number(args.p1), capacity=parse_cap(args.cap),
    )
    if p.is_infinite:
        raise UsageError("asym subcommand needs a finite --cap (use oracle truncation)")
    dist = asymmetric.stationary_asymmetric(p)
    if args.verify:
        ok = True
        norm = asymmetric.asym_normalization_check(p, dist)
        ok &= norm < 1e-10
        radius = asymmetric.smallness_radius(p)
        worst = 0.0
        for x in np.linspace(0.2 * radius, 0.9 * radius, 5):
            r1, r2 = asymmetric.asym_functional_residual(p, dist, float(x))
            worst = max(worst, abs(r1), abs(r2))
        ok &= worst < 1e-9
        orc = oracle.stationary_dist(p)
        gap = max(abs(float(dist.prob(j, k)) - float(orc.prob(j, k)))
                  for j, k, _ in dist.items())
        ok &= gap < 1e-9
        print(f"normalization residual {norm:.3g}")
        print(f"functional residual    {worst:.3g}")
        print(f"oracle gap             {gap:.3g}")
        if not ok:
            print("FAIL")
            return 2
        print("OK")
        return 0
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dist.to_csv())
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(dist.to_csv())
    return 0


def cmd_oracle(args) -> int:
    if args.asym:
        p = AsymmetricParams(
            lam=as_number(args.lam), mu1=as_number(args.mu1), mu2=as_number(args.mu2),
            p1=as_number(args.p1), capacity=parse_cap(args.cap),
        )
    else:
        p = SymmetricParams(rho=parse_rho(args.rho), capacity=parse_cap(args.cap))
    if p.is_infinite:
        if isinstance(p, AsymmetricParams):
            raise UsageError("infinite oracle truncation is symmetric-only")
        dist, tail = oracle.truncated_infinite(p.rho, args.trunc)
        print(f"# truncated at K={args.trunc}, tail bound {tail:.3g}", file=sys.stderr)
    else:
        dist = oracle.stationary_dist(p)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dist.to_csv())
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(dist.to_csv())
    return 0


def cmd_simulate(args) -> int:
    p = SymmetricParams(rho=as_number(args.rho), capacity=parse_cap(args.cap))
    reports = [
        simulate.simulate_coupled(p, args.events, args.seed + i)
        for i in range(args.replicas)
    ]
    merged = simulate.merge_reports(reports)
    theory = blocking.blocking_probability(p)
    if args.json:
        emit_json({"command": "simulate", "rho": float(p.rho), "cap": p.K,
                   "seed": args.seed, "theory_blocking": float(theory), **merged})
    else:
        print(f"events              {merged['n_events']}")
        print(f"arrivals            {merged['arrivals']}")
        print(f"ordering violations {merged['ordering_violations']}")
        print(f"jsq blocking        {fmt(merged['blocking_fraction']['jsq'])}"
              f"  (closed form {fmt(theory)})")
        for s in ("mm1_k", "mm2_2k", "mm1_2k"):
            print(f"{s:<19} {fmt(merged['blocking_fraction'][s])}")
    return 0 if merged["ordering_violations"] == 0 else 2


def cmd_verify(args) -> int:
    """Cross-checks at one parameter point; exit 2 on any tolerance failure."""
    rho = parse_rho(args.rho)
    cap = parse_cap(args.cap)
    checks = []

    def check(name, value, tol):
        checks.append((name, value, tol, value < tol))

    if cap == INFINITE:
        if not 0 < float(rho) < 1:
            raise UsageError("infinite verification needs 0 < rho < 1")
        w = min(args.window or 12, 20)
        dist = infinite.stationary_infinite(rho, window=max(w, 12))
        orc, tail = oracle.truncated_infinite(float(rho), 60)
        gap = max(abs(float(dist.prob(j, k)) - float(orc.prob(j, k)))
                  for j in range(w) for k in range(w))
        check("window vs truncated oracle", gap, 1e-7 + tail)
        wide = infinite.stationary_infinite(rho)  # default window for this rho
        res = infinite.t_recurrence_residuals(float(rho), wide, 5)
        t_tol = 1e-7 + 5 * infinite.t_tail_bound(rho, wide.capacity, 6)
        check("band-sum recurrences", max(abs(r) for r in res), t_tol)
        a1, _ = cohen.cohen_A(float(rho), 1.0)
        check("product normalization", abs(a1 - (1 - float(rho))), 1e-12)
    else:
        p = SymmetricParams(rho=rho, capacity=cap)
        dist = finite.stationary_finite(p)
        orc = oracle.stationary_dist(p)
        gap = max(abs(float(dist.prob(j, k)) - float(orc.prob(j, k)))
                  for j, k, _ in dist.items())
        check("reconstruction vs oracle", gap, 1e-9)
        check("mass defect", abs(float(dist.total_mass()) - 1), 1e-9)
        Q = model.build_generator(p)
        check("balance residual", oracle.balance_residual(Q, dist), 1e-9)
        pw = blocking.blocking_probability_piecewise(p)
        gm = blocking.blocking_probability(p)
        check("blocking form agreement", abs(float(pw) - float(gm)), 1e-12)
        check("dist validity", 0.0 if validate_dist(dist) else 1.0, 0.5)
    failed = [c for c in checks if not c[3]]
    for name, value, tol, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {value:.3g} (tol {tol:.3g})")
    return 2 if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> Parser:
    top = Parser(prog="jsq", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    b = sub.add_parser("blocking", help="blocking probability (closed form)")
    b.add_argument("--rho", required=True)
    b.add_argument("--cap")
    b.add_argument("--odd", action="store_true", help="variant capped at 2K-1 customers")
    b.add_argument("--total-cap", type=int, help="cap on the total, not per queue")
    b.add_argument("--json", action="store_true")
    b.set_defaults(fn=cmd_blocking)

    d = sub.add_parser("dist", help="full stationary distribution (CSV)")
    d.add_argument("--rho", required=True)
    d.add_argument("--cap", required=True, help="K or 'inf'")
    d.add_argument("--window", type=int, help="window size when --cap inf")
    d.add_argument("--out")
    d.set_defaults(fn=cmd_dist)

    k = sub.add_parser("kernel", help="convolution-power table of g (CSV)")
    k.add_argument("--rho", required=True)
    k.add_argument("--kmax", type=int, required=True)
    k.add_argument("--jmax", type=int, required=True)
    k.add_argument("--format", choices=["csv"], default="csv")
    k.add_argument("--out")
    k.set_defaults(fn=cmd_kernel)

    bo = sub.add_parser("bounds", help="mean-total-occupancy value and bounds")
    bo.add_argument("--rho", required=True)
    bo.add_argument("--cap", required=True, help="K or 'inf'")
    bo.add_argument("--json", action="store_true")
    bo.set_defaults(fn=cmd_bounds)

    c = sub.add_parser("compare", help="blocking-ratio sweep vs comparison queues")
    c.add_argument("--cap", type=int, required=True)
    c.add_argument("--grid", default="0.01:6:600", help="start:stop:count")
    c.add_argument("--out")
    c.add_argument("--no-plot", action="store_true")
    c.set_defaults(fn=cmd_compare)

    ms = sub.add_parser("meansweep", help="mean-occupancy bounds sweep (CSV+PNG)")
    ms.add_argument("--cap", required=True, help="K or 'inf'")
    ms.add_argument("--grid", default="0.05:2:80")
    ms.add_argument("--out")
    ms.add_argument("--no-plot", action="store_true")
    ms.set_defaults(fn=cmd_meansweep)

    co = sub.add_parser("cohen", help="infinite-product boundary transform")
    co.add_argument("--rho", required=True)
    co.add_argument("--eval", type=float, help="evaluate A(y) at this y")
    co.add_argument("--coeffs", type=int, help="emit pi(0,k) for k <= KMAX")
    co.add_argument("--tol", type=float, default=1e-12)
    co.add_argument("--out")
    co.add_argument("--json", action="store_true")
    co.set_defaults(fn=cmd_cohen)

    a = sub.add_parser("asym", help="asymmetric model reconstruction")
    a.add_argument("--lambda", dest="lam", required=True)
    a.add_argument("--mu1", required=True)
    a.add_argument("--mu2", required=True)
    a.add_argument("--p1", default="0.5")
    a.add_argument("--cap", required=True)
    a.add_argument("--verify", action="store_true")
    a.add_argument("--out")
    a.set_defaults(fn=cmd_asym)

    o = sub.add_parser("oracle", help="dense balance-equation solve")
    o.add_argument("--rho")
    o.add_argument("--cap", required=True, help="K or 'inf'")
    o.add_argument("--trunc", type=int, default=60, help="truncation K for 'inf'")
    o.add_argument("--asym", action="store_true")
    o.add_argument("--lambda", dest="lam")
    o.add_argument("--mu1")
    o.add_argument("--mu2")
    o.add_argument("--p1", default="0.5")
    o.add_argument("--out")
    o.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("simulate", help="coupled four-system simulation")
    s.add_argument("--rho", required=True)
    s.add_argument("--cap", required=True)
    s.add_argument("--events", type=int, required=True)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_simulate)

    v = sub.add_parser("verify", help="formula-vs-oracle cross checks")
    v.add_argument("--rho", required=True)
    v.add_argument("--cap", required=True, help="K or 'inf'")
    v.add_argument("--window", type=int)
    v.set_defaults(fn=cmd_verify)

    return top


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
