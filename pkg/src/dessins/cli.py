"""Batch command line: ``dessins <command> [flags]``.

Exit status: 0 on success, 1 when a verification fails, 2 on bad input or a
resource cap.  Reports are JSON (or CSV for counts and residual tables) on
stdout unless --out is given.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

import mpmath

from . import dessins as dc
from . import gkm, spectral, suite, virasoro, wick
from .dessins import CapError, CountFilter, ModelParams
from .rings import DEFAULT_PRECISION_BITS

SCHEMA_VERSION = 1
COMMANDS = ("count", "spectral", "gkm-verify", "wick-verify", "jacobian-mc", "virasoro-check", "full-suite")

FIXTURES = {
    "twolog-small": dict(N=1, alpha=1, beta=-1, gamma=2, lambdas=[1], dmax=4, filter="all"),
    "twolog-alpha2": dict(N=1, alpha=2, beta=-1, gamma=3, lambdas=[1, 2], dmax=5, filter="all"),
    "clean-small": dict(N=1, alpha=1, beta=-1, gamma=2, lambdas=[1], dmax=4, filter="clean-strict"),
}

DEFAULTS = dict(dmax=4, beta="1", gamma="2", alpha="1", bigN="1", trunc=6,
                precision_bits=DEFAULT_PRECISION_BITS, seed=2024, out=None, filter="all",
                fixture=None, lambdas=None, samples=1_000_000, observable="tr_RR", only=None)


class UsageError(ValueError):
    pass


def _frac(s):
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {s!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with any of the flag values (flags win)")
    common.add_argument("--dmax", type=int)
    common.add_argument("--beta")
    common.add_argument("--gamma")
    common.add_argument("--alpha")
    common.add_argument("--bigN", dest="bigN")
    common.add_argument("--trunc", type=int)
    common.add_argument("--precision-bits", dest="precision_bits", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--filter", choices=[f.value for f in CountFilter])
    common.add_argument("--fixture", choices=sorted(FIXTURES))
    common.add_argument("--lambdas", help="comma-separated rationals")
    common.add_argument("--samples", type=int)
    common.add_argument("--observable", choices=wick.OBSERVABLES)
    common.add_argument("--only", help="comma-separated criterion numbers (full-suite)")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="dessins", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for c in COMMANDS:
        sub.add_parser(c, parents=[common])
    return p


def resolve(args) -> dict:
    """Defaults < config file < fixture < explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - set(DEFAULTS) - {"command"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        if "command" in data and data["command"] != args.command:
            raise UsageError(f"config is for {data['command']!r}, not {args.command!r}")
        cfg.update({k: v for k, v in data.items() if k != "command"})
    fixture = args.fixture or cfg.get("fixture")
    if fixture:
        if fixture not in FIXTURES:
            raise UsageError(f"unknown fixture {fixture!r}")
        fx = dict(FIXTURES[fixture])
        fx["bigN"] = fx.pop("N")
        cfg.update(fx)
        cfg["fixture"] = fixture
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if isinstance(cfg["lambdas"], str):
        cfg["lambdas"] = [x for x in cfg["lambdas"].split(",") if x.strip()]
    for k in ("dmax", "trunc", "precision_bits", "seed", "samples"):
        if not isinstance(cfg[k], int) or cfg[k] < 0:
            raise UsageError(f"{k} must be a nonnegative integer")
    return cfg


def _params(cfg):
    return ModelParams(N=_frac(cfg["bigN"]), alpha=_frac(cfg["alpha"]),
                       beta=_frac(cfg["beta"]), gamma=_frac(cfg["gamma"]))


def _emit(cfg, text):
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_count(cfg):
    gs = dc.connected_gf(cfg["dmax"], CountFilter.parse(cfg["filter"]))
    buf = io.StringIO()
    dc.export_csv(gs, buf)
    _emit(cfg, buf.getvalue())
    return 0


def cmd_spectral(cfg):
    be, ga, D = _frac(cfg["beta"]), _frac(cfg["gamma"]), cfg["trunc"]
    curve = spectral.solve_branch_points(be, ga, D, precision_bits=cfg["precision_bits"])
    oracle = None
    if D <= 8:
        gs = dc.connected_gf(D)
        oracle = gs.map(lambda s: s.map_coeffs(lambda c: c.evaluate(beta=be, gamma=ga, N=Fraction(1))))
    rep = spectral.report(curve, oracle)
    rep["schema_version"] = SCHEMA_VERSION
    _emit(cfg, _json(rep))
    tol = 0 if curve.ring == "exact" else mpmath.mpf(2) ** (-cfg["precision_bits"] // 2)
    ok = all(abs(r.max_abs()) <= tol for r in spectral.constraint_residuals(curve))
    if oracle is not None:
        cmp_tol = 0 if curve.ring == "exact" else suite.TOL_FLOAT
        for g, ours in ((0, spectral.f0_via_contour(curve)), (1, spectral.f1(curve))):
            ok &= (ours - spectral._as_ring(oracle[g], curve.ring)).max_abs() <= cmp_tol
    return 0 if ok else 1


def cmd_gkm_verify(cfg):
    p = _params(cfg)
    flt = CountFilter.parse(cfg["filter"])
    lams = [_frac(x) for x in (cfg["lambdas"] or [1] * p.size("alpha"))]
    d = cfg["dmax"]
    if flt is CountFilter.ALL:
        spec, variant = gkm.twolog_spec(p, len(lams)), "TwoLog"
    elif flt is CountFilter.CLEAN_STRICT:
        spec, variant = gkm.clean_spec(p, order=2 * d + 2), "Clean"
    elif flt is CountFilter.CLEAN_LOOSE:
        spec, variant = gkm.clean_spec(p, order=2 * d + 2, shifted=True), "Clean(shifted)"
    else:
        raise UsageError("gkm-verify supports the all, clean-strict and clean-loose filters")
    delta, Z, O = suite.gkm_vs_oracle(p, lams, d, flt, spec)
    diff = Z - O
    per_order = {str(k): str(diff.coeff(eps=k)) for k in range(diff.max_weight + 1)}
    rep = {"schema_version": SCHEMA_VERSION, "variant": variant,
           "params": {"N": str(p.N), "alpha": str(p.alpha), "beta": str(p.beta), "gamma": str(p.gamma),
                      "lambdas": [str(x) for x in lams]},
           "truncation": 2 * d, "max_abs_delta": str(delta), "per_order_deltas": per_order,
           "summary": f"exact match through eps^{2 * d}" if delta == 0 else "mismatch"}
    _emit(cfg, _json(rep))
    return 0 if delta == 0 else 1


def cmd_wick_verify(cfg):
    mus = [_frac(x) for x in (cfg["lambdas"] or ["2", "3", "5"])]
    rows = []
    top = min(int(_frac(cfg["bigN"])) if _frac(cfg["bigN"]) > 1 else 3, 4)
    for N in range(1, top + 1):
        for M in range(0, top + 1):
            if N > len(mus):
                continue
            r = wick.different_sizes_identity_check(N, M, mus[:N])
            rows.append({"N": N, "M": M, "residual": str(r)})
    moments = {"<trY^2>": str(wick.gaussian_trace_moment(wick.TraceWord((2,), 1, 1))),
               "<trY^4> at M=2": str(wick.gaussian_trace_moment(wick.TraceWord((4,), 2, 1)))}
    ok = all(r["residual"] == "0" for r in rows)
    _emit(cfg, _json({"schema_version": SCHEMA_VERSION, "different_sizes": rows, "moments": moments,
                      "passed": ok}))
    return 0 if ok else 1


def cmd_jacobian_mc(cfg):
    p = _params(cfg)
    sizes = (p.size("alpha"), p.size("gamma"))
    mc = wick.McConfig(cfg["samples"], cfg["seed"], sizes, N=p.N)
    est, exact, z = wick.jacobian_mc_check(mc, cfg["observable"])
    _emit(cfg, _json({"schema_version": SCHEMA_VERSION, "sizes": list(sizes), "samples": cfg["samples"],
                      "seed": cfg["seed"], "observable": cfg["observable"], "estimate": repr(est),
                      "exact": str(exact), "z": round(z, 6)}))
    return 0 if abs(z) <= 4 else 1


def cmd_virasoro_check(cfg):
    p = _params(cfg)
    D = cfg["trunc"]
    ZT = suite._two_log_Z_tilde(p.alpha, p.beta, p.gamma, p.N, D)
    rows = virasoro.annihilation_check("V", ZT, min(3, D - 1), k_min=0,
                                       **suite.v_params(p.alpha, p.beta, p.gamma, p.N))
    W = wick.onematrix_series(2, D + 5, 1)
    rows += virasoro.annihilation_check("L1MM", W, 3, k_min=-1, M=2, base=((2, Fraction(1, 2)),))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "k", "order", "residual"])
    for r in rows:
        w.writerow([r[0], r[1], r[2], str(r[3])])
    _emit(cfg, buf.getvalue())
    return 0 if all(r[3] == 0 for r in rows) else 1


def cmd_full_suite(cfg):
    only = None
    if cfg["only"]:
        only = {int(x) for x in str(cfg["only"]).split(",")}
    results = []
    for fn in suite.CRITERIA:
        n = int(fn.__name__.split("_")[1])
        if only and n not in only:
            continue
        res = fn(samples=cfg["samples"], seeds=(cfg["seed"], cfg["seed"] + 1, cfg["seed"] + 2)) \
            if n == 10 else fn()
        print(res.line(), file=sys.stderr if cfg["out"] is None else sys.stdout)
        results.append(res)
    passed = sum(r.passed for r in results)
    summary = f"{passed}/{len(results)} criteria passed"
    print(summary, file=sys.stderr if cfg["out"] is None else sys.stdout)
    _emit(cfg, _json({"schema_version": SCHEMA_VERSION, "results": [r.to_json() for r in results],
                      "summary": summary}))
    return 0 if passed == len(results) else 1


HANDLERS = {"count": cmd_count, "spectral": cmd_spectral, "gkm-verify": cmd_gkm_verify,
            "wick-verify": cmd_wick_verify, "jacobian-mc": cmd_jacobian_mc,
            "virasoro-check": cmd_virasoro_check, "full-suite": cmd_full_suite}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = resolve(args)
        return HANDLERS[args.command](cfg)
    except (UsageError, CapError, ValueError, OSError) as e:
        print(f"dessins {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
