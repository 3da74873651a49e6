"""Command-line front end.

Exit status is 0 on success, 1 for bad input (including usage errors) and 2
when a numerical routine fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds0, bounds2, codes, decoder, montecarlo
from .channels import AWGNC, BEC, BSC, ChannelModel, parse_channel
from .lp import OPTIMAL

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _g(v) -> str:
    return f"{float(v):.9g}"


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _pairs(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        a, sep, b = item.partition(":")
        if not sep:
            raise InputError(f"pairs look like 3:6,4:8; got {text!r}")
        out.append((int(a), int(b)))
    return out


def resolve_code(args) -> codes.Code:
    """Code from ``--code`` (family spec or file) or from ``--n/--wcol/--wrow``."""
    spec = args.code
    seed = args.seed
    if spec is None:
        if None in (args.n, args.wcol, args.wrow):
            raise InputError("give --code, or all of --n, --wcol and --wrow")
        return codes.build_regular_code(args.n, args.wcol, args.wrow, seed)
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind == "fano":
        return codes.build_pg2q_code(1)
    if kind == "pg":
        return codes.build_pg2q_code(int(rest))
    if kind == "regular":
        n, wc, wr = _ints(rest)
        return codes.build_regular_code(n, wc, wr, seed)
    if kind == "allrows":
        n, wr = _ints(rest)
        return codes.build_all_rows_code(n, wr)
    if kind == "bernoulli":
        n, m, theta = rest.split(",")
        return codes.build_bernoulli_code(int(n), int(m), float(theta), seed)
    path = Path(spec)
    if not path.exists():
        raise InputError(f"unknown code spec or missing file {spec!r}")
    return codes.load_code(path)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _kv(pairs) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


# --- subcommands ------------------------------------------------------------


def cmd_gen_code(args) -> int:
    code = resolve_code(args)
    text = codes.to_json(code) + "\n" if args.format == "json" else codes.to_alist(code)
    _emit(text, args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    code = resolve_code(args)
    gamma = decoder.read_llr_file(args.llr)
    if len(gamma) != code.n:
        raise InputError(f"LLR file has {len(gamma)} entries, code length is {code.n}")
    res = decoder.lp_decode(code, gamma)
    rec = res.to_record(include_omega=args.omega)
    if args.json:
        _emit_json(rec, args.out)
    else:
        lines = [(k, _text(v)) for k, v in rec.items()]
        _emit(_kv(lines), args.out)
    return EXIT_OK


def cmd_bound0(args) -> int:
    ch = parse_channel(args.channel)
    rep = bounds0.asymptotic_condition(ch, args.wrow)
    if args.json:
        _emit_json(rep.to_record(), args.out)
        return EXIT_OK
    verdict = "holds (boundary)" if rep.boundary else ("holds" if rep.condition_holds else "fails")
    lines = [
        ("channel", rep.channel),
        ("w_row", rep.w_row),
        ("lhs", _g(rep.lhs)),
        ("rhs", rep.w_row - 1),
        ("condition", verdict),
    ]
    if rep.eps_ub is not None:
        lines.append(("eps_ub", _g(rep.eps_ub)))
    if rep.sigma_ub is not None:
        lines.append(("sigma_ub", _g(rep.sigma_ub)))
    _emit(_kv(lines), args.out)
    return EXIT_OK


def cmd_awgn_bound(args) -> int:
    sigma, snr = bounds0.awgn_threshold_ub(args.wrow, args.ec, method=args.method, seed=args.seed)
    rec = {"w_row": args.wrow, "Ec": args.ec, "method": args.method, "sigma_star": sigma, "snr_star": snr}
    if args.json:
        _emit_json({k: float(_g(v)) if isinstance(v, float) else v for k, v in rec.items()}, args.out)
    else:
        _emit(_kv((k, _g(v) if isinstance(v, float) else v) for k, v in rec.items()), args.out)
    return EXIT_OK


def cmd_bound2(args) -> int:
    if args.dump:
        cs = bounds2.build_cone_constraints(args.wcol, args.wrow)
        Path(args.dump).write_text(cs.system.to_text())
    if args.eps is not None:
        sol = bounds2.bound2_objective_min(args.wcol, args.wrow, args.eps)
        if sol.status not in (OPTIMAL, "unbounded"):
            raise RuntimeError(f"LP ended with status {sol.status}")
        rec = {"w_col": args.wcol, "w_row": args.wrow, "eps": args.eps, "status": sol.status,
               "value": None if sol.value is None else float(_g(sol.value)),
               "negative": bounds2.is_negative(sol)}
    else:
        rec = bounds2.bsc_threshold_ub2(args.wcol, args.wrow, args.tol, workers=args.threads).to_record()
    if args.json:
        _emit_json(rec, args.out)
    else:
        _emit(_kv((k, _text(v)) for k, v in rec.items()), args.out)
    return EXIT_OK


def _text(v) -> str:
    if isinstance(v, float):
        return _g(v)
    return v if isinstance(v, str) else json.dumps(v)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(str(v) if isinstance(v, int) else _g(v) for v in r))
    return "\n".join(lines) + "\n"


def cmd_fig1(args) -> int:
    pairs = _pairs(args.pairs) if args.pairs else None
    rows = bounds0.fig1_data(pairs)
    grid = bounds0.FIG1_GRID_NOTE if pairs is None else "user pairs"
    if args.json:
        _emit_json({"grid": grid, "rows": [r._asdict() for r in rows]}, args.out)
    else:
        _emit(f"# grid: {grid}\n" + _csv(rows[0]._fields, rows), args.out)
    if args.capacity:
        eps, cap = bounds0.capacity_curve(args.capacity_points)
        Path(args.capacity).write_text(_csv(("eps", "C"), zip(eps, cap)))
    return EXIT_OK


def cmd_fig2(args) -> int:
    rows = bounds0.fig2_data(_ints(args.s))
    if args.json:
        _emit_json({"rows": [r._asdict() for r in rows]}, args.out)
    else:
        _emit(_csv(rows[0]._fields, rows), args.out)
    return EXIT_OK


def cmd_fig3(args) -> int:
    rows = bounds2.fig3_data(_pairs(args.pairs), args.tol, workers=args.threads)
    if args.json:
        _emit_json({"rows": [r._asdict() for r in rows]}, args.out)
    else:
        _emit(_csv(rows[0]._fields, rows), args.out)
    return EXIT_OK


def _channel_at(kind: str, value: float, ec: float) -> ChannelModel:
    if kind in (BSC, BEC):
        return ChannelModel(kind, epsilon=value)
    return ChannelModel.awgn(value, ec)


def cmd_sweep(args) -> int:
    kind = args.channel.lower()
    if kind not in (BSC, BEC, AWGNC):
        raise InputError("sweep --channel takes a channel kind: bsc, bec or awgn")
    grid = _floats(args.grid)
    points = []
    if args.mode == "condition":
        if args.wrow is None or args.n is None:
            raise InputError("condition sweeps need --wrow and --n")
        wcol = args.wcol if args.wcol is not None else 3
        for v in grid:
            ch = _channel_at(kind, v, args.ec)
            pt = montecarlo.estimate_condition_violation(wcol, args.wrow, args.n, ch, args.trials, args.seed,
                                                         workers=args.threads)
            pt.param = _g(v)
            points.append(pt)
    else:
        code = resolve_code(args)
        for v in grid:
            ch = _channel_at(kind, v, args.ec)
            pt = montecarlo.estimate_lp_error_rate(code, ch, args.trials, args.seed, workers=args.threads)
            pt.param = _g(v)
            points.append(pt)
    result = montecarlo.SweepResult(points)
    if args.json:
        recs = []
        for p in points:
            lo, hi = p.ci
            rec = {"param": p.param, "trials": p.trials, "failures": p.failures, "rate": float(_g(p.rate)),
                   "ci_lo": float(_g(lo)), "ci_hi": float(_g(hi)), "decoder_failures": p.decoder_failures}
            if args.timing:
                rec["seconds"] = float(_g(p.seconds))
            recs.append(rec)
        _emit_json({"mode": args.mode, "channel": kind, "points": recs}, args.out)
    else:
        _emit(result.to_csv(timing=args.timing), args.out)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _add_code_flags(p) -> None:
    p.add_argument("--code", help="fano, pg:S, regular:N,WCOL,WROW, allrows:N,WROW, bernoulli:N,M,THETA, or an alist/json path")
    p.add_argument("--n", type=int)
    p.add_argument("--wcol", type=int)
    p.add_argument("--wrow", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--json", action="store_true", help="JSON report instead of text/CSV")
    common.add_argument("--threads", type=int, default=1, help="worker cap (default 1)")

    parser = _Parser(prog="lpbounds", description="LP decoding and LP-threshold bounds for LDPC codes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-code", parents=[common], help="write a parity-check matrix")
    _add_code_flags(p)
    p.add_argument("--format", choices=("alist", "json"), default="alist")
    p.set_defaults(func=cmd_gen_code)

    p = sub.add_parser("decode", parents=[common], help="LP-decode one LLR vector")
    _add_code_flags(p)
    p.add_argument("--llr", required=True, help='JSON array; "inf"/"-inf" strings for infinities')
    p.add_argument("--omega", action="store_true", help="include the LP solution vector")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bound0", parents=[common], help="sign-only asymptotic condition")
    p.add_argument("--wrow", type=int, required=True)
    p.add_argument("--channel", required=True, help="bsc:EPS, bec:EPS or awgn:Ec=E,sigma2=S")
    p.set_defaults(func=cmd_bound0)

    p = sub.add_parser("awgn-bound", parents=[common], help="AWGNC noise level where the sign-only test binds")
    p.add_argument("--wrow", type=int, required=True)
    p.add_argument("--ec", type=float, default=1.0)
    p.add_argument("--method", choices=("closed", "quad", "mc"), default="closed")
    p.set_defaults(func=cmd_awgn_bound)

    p = sub.add_parser("bound2", parents=[common], help="2-neighborhood BSC threshold bound")
    p.add_argument("--wcol", type=int, required=True)
    p.add_argument("--wrow", type=int, required=True)
    p.add_argument("--tol", type=float, default=bounds2.DEFAULT_TOL)
    p.add_argument("--eps", type=float, help="solve the LP at one crossover probability instead")
    p.add_argument("--dump", help="also write the constraint system as text")
    p.set_defaults(func=cmd_bound2)

    p = sub.add_parser("fig1", parents=[common], help="rate and 1/w_row for regular families")
    p.add_argument("--pairs", help="w_col:w_row list, default grid w_col 2..6, w_row w_col+1..20")
    p.add_argument("--capacity", help="also write the BSC capacity curve to this CSV")
    p.add_argument("--capacity-points", type=int, default=101)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", parents=[common], help="rate and 1/(q+1) for PG(2,2^s) codes")
    p.add_argument("--s", default="1,2,3,4")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", parents=[common], help="sign-only and 2-neighborhood bounds per family")
    p.add_argument("--pairs", default="3:4,3:5,3:6")
    p.add_argument("--tol", type=float, default=bounds2.DEFAULT_TOL)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo failure rates over a parameter grid")
    _add_code_flags(p)
    p.add_argument("--mode", choices=("condition", "lp"), default="condition")
    p.add_argument("--channel", default="bsc", help="channel kind swept: bsc, bec (eps) or awgn (sigma2)")
    p.add_argument("--grid", required=True, help="comma-separated channel parameters")
    p.add_argument("--ec", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--timing", action="store_true", help="fill the seconds column (breaks byte-stability)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, OSError, KeyError) as exc:
        print(f"lpbounds: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RuntimeError, ArithmeticError) as exc:
        print(f"lpbounds: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
