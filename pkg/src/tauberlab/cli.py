"""Batch command-line front-end.

Subcommands:

* ``build-testfn``   -- construct a test function, certify every axiom,
  serialize it to JSON, and write a certificate report.
* ``verify-testfn``  -- reload a serialized test function and re-certify.
* ``tauber-suite``   -- seeded random-ensemble property run: recovery
  identity residuals, sandwich and corridor containment.
* ``laplace-report`` -- bound reports for a box domain over lambda/eps/x
  grids, CSV plus optional JSON mirror.
* ``remainder-scan`` -- asymptotic remainder table with eps = lambda^-kappa.

Exit status is 0 only if every checked inequality holds within margin;
usage and configuration errors exit with status 2.  Output is deterministic
for a fixed seed and configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import laplace_box as lb
from .mollifier import (build_gamma, build_rho_from_zeta, certify,
                        load_testfunction, solve_zeta)
from .report import BoundRow, fmt12, rows_to_csv, write_csv, write_json
from .tauber_core import (SmoothingParams, conv_F, conv_Fprime, corridor_bounds,
                          pointwise_bounds, random_ensemble,
                          tauber_identity_residual)

OK, VIOLATION, USAGE = 0, 1, 2


def _load_config(args):
    """Merge a JSON config file over parsed flags (file values win)."""
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SystemExit(
                f"error: malformed config JSON at line {exc.lineno} "
                f"column {exc.colno}: {exc.msg}")
        for key, value in data.items():
            setattr(args, key.replace("-", "_"), value)
    return args


def _load_domain(path) -> lb.BoxDomain:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SystemExit(
            f"error: malformed domain JSON in {path} at line {exc.lineno} "
            f"column {exc.colno}: {exc.msg}")
    for field in ("dim", "sides"):
        if field not in data:
            raise SystemExit(f"error: domain config missing field {field!r}")
    if int(data["dim"]) != len(data["sides"]):
        raise SystemExit("error: domain config field 'dim' does not match "
                         "the number of sides")
    return lb.BoxDomain(data["sides"], cutoff=float(data.get("cutoff",
                                                             lb.DEFAULT_CUTOFF)))


def _build_from_source(args):
    if args.family == "gamma":
        if args.l is None:
            raise SystemExit("error: --family gamma needs --l")
        return build_gamma(int(args.l), normalize=not args.no_normalize)
    if args.family == "zeta":
        if args.m is None:
            raise SystemExit("error: --family zeta needs --m")
        return build_rho_from_zeta(solve_zeta(int(args.m)))
    raise SystemExit(f"error: unknown test-function family {args.family!r}")


def _print_certificate(rho, checks) -> int:
    status = OK
    header = f"{rho.family} test function, decay order m={rho.decay_order}"
    if rho.zeta is not None:
        header += (f", nu={fmt12(rho.zeta.nu)}"
                   f", nu_tilde={fmt12(rho.zeta.nu_tilde)}")
    print(header)
    for c in checks:
        verdict = "pass" if c.ok else "FAIL"
        thr = "" if c.threshold is None else f" (threshold {fmt12(c.threshold)})"
        note = f"  [{c.note}]" if c.note else ""
        print(f"  {verdict}  {c.name}: {fmt12(c.value)}{thr}{note}")
        if not c.ok:
            status = VIOLATION
    return status


def cmd_build_testfn(args) -> int:
    try:
        rho = _build_from_source(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    checks = certify(rho)
    if args.out:
        rho.save(args.out)
        print(f"wrote {args.out}")
    status = _print_certificate(rho, checks)
    if args.report:
        payload = {
            "family": rho.family,
            "params": rho.params,
            "decay_order": rho.decay_order,
            "nu": rho.zeta.nu if rho.zeta is not None else None,
            "checks": [{"name": c.name, "value": c.value,
                        "threshold": c.threshold, "ok": c.ok}
                       for c in checks],
        }
        Path(args.report).write_text(json.dumps(payload, indent=1,
                                                sort_keys=True))
    return status


def cmd_verify_testfn(args) -> int:
    rho = load_testfunction(args.testfn)
    return _print_certificate(rho, certify(rho))


def cmd_tauber_suite(args) -> int:
    try:
        pairs = [tuple(float(v) for v in p.split(":"))
                 for p in args.pairs.split(",")]
        params = [SmoothingParams(delta=d, T=T, epsilon=args.epsilon)
                  for (T, d) in pairs]
    except ValueError as exc:
        print(f"error: bad smoothing parameters: {exc}", file=sys.stderr)
        return USAGE
    if args.testfn:
        rho = load_testfunction(args.testfn)
    else:
        rho = build_rho_from_zeta(solve_zeta(args.m))
    ensemble = random_ensemble(args.seed, args.count)
    taus = np.linspace(args.tau_min, args.tau_max, args.tau_points)
    if not ensemble:
        print("warning: empty ensemble, vacuous pass")
        print("identity_violations,0")
        print("sandwich_violations,0")
        print("corridor_violations,0")
        return OK
    id_viol = sand_viol = corr_viol = 0
    worst_resid = 0.0
    for F in ensemble:
        for p in params:
            resid = tauber_identity_residual(rho, p.T, F, taus)
            worst_resid = max(worst_resid, float(np.max(resid)))
            if np.any(resid > args.tol):
                id_viol += 1
            mid = conv_F(rho, p.T, F, taus)
            err = conv_Fprime(rho, p.delta, 0, F, taus) / (rho.c1 * p.delta)
            Fv = F(taus)
            if np.any(Fv < mid - err - args.tol) or np.any(Fv > mid + err + args.tol):
                sand_viol += 1
        p = params[0]
        for tau in taus[:: max(1, args.tau_points // 8)]:
            b = corridor_bounds(rho, p, F, float(tau))
            if not b.contains(F(float(tau)), args.tol):
                corr_viol += 1
    print(f"ensemble,{len(ensemble)}")
    print(f"worst_identity_residual,{fmt12(worst_resid)}")
    print(f"identity_violations,{id_viol}")
    print(f"sandwich_violations,{sand_viol}")
    print(f"corridor_violations,{corr_viol}")
    if args.out:
        Path(args.out).write_text(json.dumps({
            "seed": args.seed, "count": len(ensemble),
            "worst_identity_residual": worst_resid,
            "identity_violations": id_viol,
            "sandwich_violations": sand_viol,
            "corridor_violations": corr_viol,
        }, indent=1, sort_keys=True))
    return OK if id_viol == sand_viol == corr_viol == 0 else VIOLATION


def _lambda_grid(box, count, lam_max):
    lams = np.geomspace(max(4.0, lam_max / 400.0), lam_max, count)
    evals = box.eigenvalues
    out = []
    for lam in lams:
        idx = np.searchsorted(evals, lam)
        for j in (idx - 1, idx):
            if 0 <= j < evals.size and abs(evals[j] - lam) < 1e-9 * lam:
                lam = lam * (1.0 + 1e-9)
        out.append(float(lam))
    return out


def cmd_laplace_report(args) -> int:
    box = _load_domain(args.domain)
    lam_needed = args.lambda_max * (1.0 + 2.0 / box.dim) * 1.01
    if lam_needed > box.cutoff:
        box = lb.BoxDomain(box.sides, cutoff=lam_needed)
    lams = _lambda_grid(box, args.lambda_count, args.lambda_max)
    eps_grid = [float(e) for e in args.eps.split(",")]
    rows: list[BoundRow] = []
    for lam in lams:
        rows.extend(lb.berezin_liyau(box, lam))
        for eps in eps_grid:
            rows.extend(lb.counting_bounds(box, lam, eps))
    for x in box.interior_points(args.x_count):
        for lam in lams:
            rows.extend(lb.spectral_bounds(box, x, lam))
    violations = [r for r in rows if not r.contains_exact(args.tol)]
    write_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    if args.json_out:
        write_json(rows, args.json_out,
                   meta={"sides": list(box.sides), "lambda_max": args.lambda_max})
        print(f"wrote {args.json_out}")
    for r in violations:
        print(f"VIOLATION {r.quantity} lambda={fmt12(r.lam)} "
              f"eps={fmt12(r.epsilon)}: exact={fmt12(r.exact)} "
              f"outside [{fmt12(r.lower)}, {fmt12(r.upper)}]")
    print(f"containment_violations,{len(violations)}")
    return OK if not violations else VIOLATION


def cmd_remainder_scan(args) -> int:
    box = _load_domain(args.domain)
    if args.lambda_max > box.cutoff:
        box = lb.BoxDomain(box.sides, cutoff=args.lambda_max * 1.01)
    lams = np.geomspace(args.lambda_min, args.lambda_max, args.count)
    scan = lb.remainder_scan(box, lams, args.kappa)
    lines = ["lambda,epsilon,counting,weyl_term,interval_width,riesz_remainder"]
    for r in scan:
        lines.append(",".join(fmt12(v) for v in
                              (r.lam, r.epsilon, r.counting, r.weyl_term,
                               r.interval_width, r.riesz_remainder)))
    Path(args.out).write_text("\n".join(lines) + "\n")
    slope = lb.fit_loglog_slope([r.lam for r in scan],
                                [r.riesz_remainder for r in scan])
    print(f"wrote {args.out} ({len(scan)} rows)")
    print(f"riesz_remainder_slope,{fmt12(slope)}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tauberlab",
        description="Band-limited smoothing kernels and spectral bound reports")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-testfn", help="construct, certify and serialize "
                                            "a test function")
    p.add_argument("--family", choices=("gamma", "zeta"), required=True)
    p.add_argument("--l", type=int, default=None,
                   help="sinc-power order (gamma family)")
    p.add_argument("--m", type=int, default=None,
                   help="clamped-mode order (zeta family)")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip unit-mass normalization (gamma only)")
    p.add_argument("--out", default=None, help="JSON artifact path")
    p.add_argument("--report", default=None, help="certificate JSON path")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_build_testfn)

    p = sub.add_parser("verify-testfn", help="re-certify a serialized "
                                             "test function")
    p.add_argument("testfn")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_verify_testfn)

    p = sub.add_parser("tauber-suite", help="seeded ensemble property run")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--tau-min", type=float, default=-6.0)
    p.add_argument("--tau-max", type=float, default=6.0)
    p.add_argument("--tau-points", type=int, default=41)
    p.add_argument("--pairs", default="1:1,2:1,5:1",
                   help="comma list of T:delta pairs")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--m", type=int, default=1,
                   help="clamped-mode order of the default test function")
    p.add_argument("--testfn", default=None,
                   help="serialized test function to use instead")
    p.add_argument("--out", default=None, help="summary JSON path")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_tauber_suite)

    p = sub.add_parser("laplace-report", help="box-domain bound report")
    p.add_argument("--domain", required=True, help="domain config JSON")
    p.add_argument("--lambda-max", type=float, default=1e4)
    p.add_argument("--lambda-count", type=int, default=50)
    p.add_argument("--eps", default="0.05,0.1,0.2",
                   help="comma list of layer widths")
    p.add_argument("--x-count", type=int, default=9)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="laplace_report.csv")
    p.add_argument("--json-out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_laplace_report)

    p = sub.add_parser("remainder-scan", help="asymptotic remainder table")
    p.add_argument("--domain", required=True)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--lambda-min", type=float, default=1e2)
    p.add_argument("--lambda-max", type=float, default=1e4)
    p.add_argument("--count", type=int, default=25)
    p.add_argument("--out", default="remainder_scan.csv")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_remainder_scan)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args = _load_config(args)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return USAGE
        raise
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
