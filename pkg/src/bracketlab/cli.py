"""Command-line orchestration: parse expressions, run experiments, emit reports.

Subcommands: eval, taylor, classify, census, complexity, discrepancy, weyl,
sublevel, nil, mobius, suspension.  Reports are CSV for curves and JSON-lines
for heterogeneous records; every output begins with a record echoing the
resolved configuration, and report bodies contain nothing non-deterministic,
so identical configurations (and seeds) reproduce identical bytes.

Exit codes: 0 success, 2 configuration error, 3 undecidable floor,
4 cap violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

import numpy as np

from . import equidist, gp_core, hardy, mobius, nilheis, subword, taylor_error
from .errors import (
    BracketLabError,
    BudgetTooSmall,
    DomainError,
    FloorUndecidable,
    HTooLarge,
    LimitExceeded,
    OrderCapExceeded,
    ParseError,
    PrecisionCapExceeded,
)
from .exactreal import AdaptiveReal

_CAP_ERRORS = (PrecisionCapExceeded, OrderCapExceeded, LimitExceeded, HTooLarge,
               BudgetTooSmall)


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    where = getattr(args, "command", "bracketlab")
    try:
        return args.func(args)
    except FloorUndecidable as exc:
        print(f"{where}: error (undecidable floor): {exc}", file=sys.stderr)
        return 3
    except _CAP_ERRORS as exc:
        print(f"{where}: error (cap violation): {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 4
    except (BracketLabError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"{where}: error (configuration): {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bracketlab",
                                description="bracket-word laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_required=False):
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "jsonl"), default=None)
        sp.add_argument("--seed", type=int, default=None, required=seed_required)

    sp = sub.add_parser("eval", help="evaluate a bracket expression")
    sp.add_argument("--gp", "--word", dest="gp", required=True)
    sp.add_argument("--n", type=int, default=0)
    common(sp)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("taylor", help="certified window polynomial")
    sp.add_argument("--f", required=True)
    sp.add_argument("--center", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--hmax", type=int, required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--t0", type=int, default=hardy.DEFAULT_T0)
    common(sp)
    sp.set_defaults(func=_cmd_taylor)

    sp = sub.add_parser("classify", help="floor-error profile and its class")
    sp.add_argument("--f", required=True)
    sp.add_argument("--center", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--hmax", type=int, required=True)
    sp.add_argument("--eta", type=float, default=0.5)
    sp.add_argument("--eta0", type=float, default=0.1)
    sp.add_argument("--qmax", type=int, default=64)
    sp.add_argument("--t0", type=int, default=hardy.DEFAULT_T0)
    common(sp)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("census", help="distinct-profile census over centres")
    sp.add_argument("--f", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--hmax", required=True,
                    help="window length, or comma-separated list")
    sp.add_argument("--nmin", type=int, required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--stride", type=int, default=1)
    sp.add_argument("--eta", type=float, default=0.5)
    sp.add_argument("--eta0", type=float, default=0.1)
    sp.add_argument("--qmax", type=int, default=64)
    sp.add_argument("--t0", type=int, default=hardy.DEFAULT_T0)
    common(sp)
    sp.set_defaults(func=_cmd_census)

    sp = sub.add_parser("complexity", help="subword complexity curve")
    sp.add_argument("--word", required=True,
                    help='"sturmian <alpha> <beta>", "const1", or a bracket expression')
    sp.add_argument("--coding", default=None, help='"mod m", "cells ...", "identity"')
    sp.add_argument("--f", default="t", help="index growth function (floors applied)")
    sp.add_argument("--nmax", type=int, required=True, help="prefix length")
    sp.add_argument("--hmax", type=int, required=True)
    sp.add_argument("--start", type=int, default=0)
    common(sp)
    sp.set_defaults(func=_cmd_complexity)

    sp = sub.add_parser("discrepancy", help="extreme discrepancy of a point set")
    sp.add_argument("--alpha", default=None, help="rotation constant; points {n*alpha}")
    sp.add_argument("--nmax", type=int, default=None)
    sp.add_argument("--input", default=None, help="file with one point per line")
    common(sp)
    sp.set_defaults(func=_cmd_discrepancy)

    sp = sub.add_parser("weyl", help="structure dichotomy for a polynomial mod 1")
    sp.add_argument("--beta", required=True, help="comma-separated coefficients")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--lcap", type=int, default=10_000)
    common(sp)
    sp.set_defaults(func=_cmd_weyl)

    sp = sub.add_parser("sublevel", help="measure of a polynomial sublevel set")
    sp.add_argument("--coeffs", required=True,
                    help="dense table: entries ',', rows ';', planes '|'")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--method", choices=("grid", "montecarlo"), default="grid")
    sp.add_argument("--budget", type=int, default=1 << 18)
    common(sp)
    sp.set_defaults(func=_cmd_sublevel)

    sp = sub.add_parser("nil", help="Heisenberg polynomial orbit")
    sp.add_argument("--g0", default="0,0,0")
    sp.add_argument("--g1", required=True, help="x1,x2,x3 (constants)")
    sp.add_argument("--g2", default="0,0,0", help="central: 0,0,z")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--stats", action="store_true",
                    help="emit equidistribution statistics instead of the orbit")
    sp.add_argument("--freqs", default="1,0,0;0,1,0")
    sp.add_argument("--boxlevel", type=int, default=3)
    common(sp)
    sp.set_defaults(func=_cmd_nil)

    sp = sub.add_parser("mobius", help="sieve and correlation experiments")
    sp.add_argument("--sieve", type=int, required=True)
    sp.add_argument("--word", default="const1")
    sp.add_argument("--coding", default=None)
    sp.add_argument("--f", default="t")
    sp.add_argument("--checkpoints", required=True, help="comma-separated N values")
    sp.add_argument("--short", default=None, help="N,H,qmax for a short-interval record")
    sp.add_argument("--save-table", default=None, help="persist the sieve (MU01)")
    common(sp)
    sp.set_defaults(func=_cmd_mobius)

    sp = sub.add_parser("suspension", help="circle-suspension observable")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--poly", required=True, help="comma-separated constants, constant first")
    sp.add_argument("--nmax", type=int, required=True)
    common(sp)
    sp.set_defaults(func=_cmd_suspension)

    return p


# ---------------------------------------------------------------------------
# Report plumbing


def _config_dict(args, **extra) -> dict:
    skip = {"func"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg.update(extra)
    return cfg


def _emit(args, lines: list) -> int:
    body = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return 0


def _jrec(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, AdaptiveReal):
        return x.midpoint_float()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _jsonl_report(args, records: list) -> int:
    lines = [_jrec({"record": "config", **_config_dict(args)})]
    lines += [_jrec(r) for r in records]
    return _emit(args, lines)


def _csv_report(args, header: str, rows: list) -> int:
    lines = [f"# config: {_jrec(_config_dict(args))}", header]
    lines += rows
    return _emit(args, lines)


# ---------------------------------------------------------------------------
# Word resolution shared by complexity and mobius


def _resolve_word_values(args, count: int, start: int = 0) -> tuple:
    """(int64 symbol values, origin dict) for the requested word along --f."""
    findex = _index_array(args.f, count, start)
    spec = args.word.strip()
    if spec == "const1":
        return np.ones(count, dtype=np.int64), {"word": "const1"}
    if spec.startswith("sturmian"):
        parts = spec.split()
        if len(parts) != 3:
            raise DomainError('sturmian preset needs "sturmian <alpha> <beta>"')
        expr = gp_core.sturmian_expr(parts[1], parts[2])
    else:
        expr = gp_core.parse_gp(spec)
    coding = gp_core.parse_coding(args.coding) if args.coding else None
    word = gp_core.generate_word(expr, coding, findex, count)
    if not all(isinstance(a, (int, np.integer)) for a in word.alphabet):
        raise DomainError("correlation words need integer symbols; adjust the coding")
    values = np.asarray(word.symbols(), dtype=np.int64)
    return values, word.origin


def _resolve_word(args, count: int):
    findex = _index_array(args.f, count, getattr(args, "start", 0) or 0)
    spec = args.word.strip()
    if spec == "const1":
        return gp_core.Word.from_symbols([1] * count, origin={"word": "const1"})
    if spec.startswith("sturmian"):
        parts = spec.split()
        if len(parts) != 3:
            raise DomainError('sturmian preset needs "sturmian <alpha> <beta>"')
        expr = gp_core.sturmian_expr(parts[1], parts[2])
    else:
        expr = gp_core.parse_gp(spec)
    coding = gp_core.parse_coding(args.coding) if args.coding else None
    return gp_core.generate_word(expr, coding, findex, count)


def _index_array(f_text: str, count: int, start: int) -> np.ndarray:
    f_text = (f_text or "t").strip()
    if f_text == "t":
        return start + np.arange(count, dtype=np.int64)
    f = hardy.parse_hardy(f_text)
    if isinstance(f, hardy.HPow) and start < 0:
        raise DomainError("power index sources need non-negative indices")
    return hardy.FloorIndex(f, start).indices(count)


def _const_real(text: str) -> AdaptiveReal:
    from .gp_core import _as_const_expr, eval_gp

    return eval_gp(_as_const_expr(text.strip()), 0)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_eval(args) -> int:
    expr = gp_core.parse_gp(args.gp)
    value = gp_core.eval_gp(expr, args.n)
    ex = value.exact_value
    if isinstance(ex, Fraction):
        text = str(ex.numerator) if ex.denominator == 1 else f"{ex.numerator}/{ex.denominator}"
    else:
        text = repr(value.midpoint_float())
    if args.format == "jsonl" or args.out:
        return _jsonl_report(args, [{"record": "value", "n": args.n, "value": text,
                                     "float": value.midpoint_float()}])
    print(text)
    return 0


def _cmd_taylor(args) -> int:
    f = hardy.parse_hardy(args.f, t0=args.t0)
    tm = hardy.taylor_model(f, args.center, args.ell, args.hmax, t0=args.t0)
    rec = {
        "record": "taylor",
        "center": tm.center,
        "order": tm.order,
        "window": tm.window,
        "coefficients": [c.midpoint_float() for c in tm.coefficients],
        "remainder_bound": tm.remainder_bound_float(),
    }
    if args.k is not None:
        rec["envelope"] = hardy.remainder_envelope(f, args.k, args.ell,
                                                   args.center, args.hmax)
    return _jsonl_report(args, [rec])


def _cmd_classify(args) -> int:
    f = hardy.parse_hardy(args.f, t0=args.t0)
    prof = taylor_error.error_profile(f, args.center, args.ell, args.hmax, t0=args.t0)
    cls = taylor_error.classify(prof, args.k, eta=args.eta, q_cap=args.qmax,
                                eta0=args.eta0)
    rec = {
        "record": "classification",
        "N": prof.center,
        "H": prof.window,
        "class": cls.kind,
        "eta": cls.eta,
        "epsilon": cls.epsilon,
        "threshold": cls.threshold,
        "values": prof.values,
    }
    if cls.kind in ("sparse", "sparse_overflow"):
        rec["support"] = list(cls.support)
    if cls.kind == "structured":
        rec["q"] = cls.step
        rec["progression_count"] = len(cls.progressions)
    return _jsonl_report(args, [rec])


def _cmd_census(args) -> int:
    f = hardy.parse_hardy(args.f, t0=args.t0)
    windows = [int(x) for x in str(args.hmax).split(",")]
    census = taylor_error.count_profiles(
        f, args.k, args.ell, windows if len(windows) > 1 else windows[0],
        (args.nmin, args.nmax), stride=args.stride, eta=args.eta, eta0=args.eta0,
        q_cap=args.qmax, t0=args.t0)
    return _jsonl_report(args, list(taylor_error.census_records(census)))


def _cmd_complexity(args) -> int:
    word = _resolve_word(args, args.nmax)
    curve = subword.complexity_curve(word, args.hmax)
    if args.format == "jsonl":
        recs = [{"record": "complexity", "H": int(h), "p": int(p)}
                for h, p in zip(curve.H_values, curve.counts)]
        return _jsonl_report(args, recs)
    rows = [f"{int(h)},{int(p)}" for h, p in zip(curve.H_values, curve.counts)]
    return _csv_report(args, "H,p", rows)


def _cmd_discrepancy(args) -> int:
    if args.input:
        with open(args.input, "r", encoding="utf-8") as fh:
            pts = [float(line.strip()) for line in fh if line.strip()]
    elif args.alpha is not None and args.nmax:
        alpha = _const_real(args.alpha)
        from .exactreal import floor_affine_array

        n = np.arange(args.nmax, dtype=np.int64)
        fl = floor_affine_array(alpha, 0, n)
        pts = list(n * alpha.midpoint_float() - fl)
    else:
        raise DomainError("need --input or --alpha with --nmax")
    rep = equidist.discrepancy(pts)
    return _jsonl_report(args, [{
        "record": "discrepancy",
        "N": rep.count,
        "value": float(rep.value),
        "witness": [float(rep.witness[0]), float(rep.witness[1])],
        "kind": rep.kind,
    }])


def _cmd_weyl(args) -> int:
    coeffs = [c.strip() for c in args.beta.split(",")]
    rep = equidist.weyl_dichotomy(coeffs, args.nmax, args.delta, args.lcap)
    rec = {
        "record": "weyl",
        "branch": rep.branch,
        "discrepancy": rep.discrepancy_value,
        "delta": rep.delta,
        "degree": rep.degree,
    }
    if rep.branch == "structured":
        rec["ell"] = rep.ell
        rec["defects"] = {str(j): v for j, v in sorted(rep.defects.items())}
    return _jsonl_report(args, [rec])


def _parse_coeff_table(text: str):
    planes = text.split("|")
    if len(planes) > 1:
        return [[[Fraction(x) for x in row.split(",")] for row in plane.split(";")]
                for plane in planes]
    rows = text.split(";")
    if len(rows) > 1:
        return [[Fraction(x) for x in row.split(",")] for row in rows]
    return [Fraction(x) for x in text.split(",")]


def _cmd_sublevel(args) -> int:
    P = equidist.BoxPolynomial.from_table(_parse_coeff_table(args.coeffs))
    rng = None
    if args.method == "montecarlo":
        if args.seed is None:
            raise DomainError("montecarlo requires --seed")
        rng = np.random.default_rng(args.seed)
    rep = equidist.sublevel_measure(P, args.epsilon, args.method, args.budget, rng)
    return _jsonl_report(args, [{
        "record": "sublevel",
        "measure": rep.measure,
        "error_bar": rep.error_bar,
        "method": rep.method,
        "epsilon": rep.epsilon,
        "cells_used": rep.cells_used,
    }])


def _parse_triple(text: str) -> nilheis.HeisElement:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise DomainError("group elements need three coordinates")
    return nilheis.HeisElement.of(*parts)


def _cmd_nil(args) -> int:
    seq = nilheis.NilPolySeq(_parse_triple(args.g0), _parse_triple(args.g1),
                             _parse_triple(args.g2))
    points = nilheis.poly_orbit(seq, args.nmax)
    arr = nilheis.orbit_points_float(points)
    if args.stats:
        freqs = [tuple(int(x) for x in f.split(",")) for f in args.freqs.split(";")]
        stats = nilheis.orbit_equidistribution(arr, freqs, box_level=args.boxlevel)
        return _jsonl_report(args, [{
            "record": "orbit_stats",
            "N": stats.count,
            "frequency_magnitudes": {" ".join(map(str, k)): v
                                     for k, v in sorted(stats.frequency_magnitudes.items())},
            "box_discrepancy": stats.box_discrepancy,
            "box_level": stats.box_level,
        }])
    rows = [
        f"{n},{float(arr[n, 0])!r},{float(arr[n, 1])!r},{float(arr[n, 2])!r}"
        for n in range(len(arr))
    ]
    return _csv_report(args, "n,x1,x2,x3", rows)


def _cmd_mobius(args) -> int:
    table = mobius.mobius_sieve(args.sieve)
    if args.save_table:
        mobius.save_table(table, args.save_table)
    checkpoints = [int(c) for c in args.checkpoints.split(",")]
    # correlation sums run over n = 1..N, so the word is generated from n = 1
    values, origin = _resolve_word_values(args, max(checkpoints), start=1)
    rep = mobius.correlation(values, checkpoints, table, word_origin=origin)
    if args.short:
        N, H, qmax = (int(x) for x in args.short.split(","))
        s_window, _ = _resolve_word_values(args, H, start=0)
        sup = mobius.short_interval_sup(s_window, N, H, qmax, table)
        rep = mobius.CorrelationReport(rep.word_origin, rep.checkpoints, rep.dyadic,
                                       ((N, H, qmax, sup),))
    if args.format == "jsonl":
        recs = [{"record": "correlation", "N": N, "avg": float(f), "exact": fr}
                for N, fr, f in rep.checkpoints]
        recs += [{"record": "short_interval", "N": N, "H": H, "q_max": q, "sup": s}
                 for N, H, q, s in rep.short_records]
        return _jsonl_report(args, recs)
    rows = [f"{N},{f!r}" for N, _, f in rep.checkpoints]
    code = _csv_report(args, "N,avg", rows)
    for N, H, q, s in rep.short_records:
        print(f"short_interval N={N} H={H} q_max={q} sup={s!r}", file=sys.stderr)
    return code


def _cmd_suspension(args) -> int:
    alpha = _const_real(args.alpha)
    poly = [c.strip() for c in args.poly.split(",")]
    sys_ = nilheis.SuspensionSystem.of(alpha, poly)
    rows = []
    for n in range(args.nmax):
        v = nilheis.suspension_eval(sys_, n)
        d = nilheis.suspension_direct(sys_, n)
        rows.append(f"{n},{v.midpoint_float()!r},{d.midpoint_float()!r}")
    return _csv_report(args, "n,value,floor_composition", rows)


if __name__ == "__main__":
    sys.exit(main())
