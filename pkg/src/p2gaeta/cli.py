"""Command-line entry point.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 unsupported input.
Every flag can also be set through an environment variable with the prefix
``P2GAETA_`` (for example ``P2GAETA_SEED=7``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .chern import ChernCharacter, LogChern, NonPositiveRank, euler, fmt, serre_dual, to_log
from .cones import (
    UnsupportedN,
    dual_curve_certificate,
    eff_primary_edge,
    mov_primary_edge,
    sbld_table,
    table_consistency,
)
from .exceptional import (
    ControllingNotFound,
    UnsupportedRank,
    controlling,
    dlp_threshold,
    endpoints,
    enumerate_exceptionals,
    epsilon,
    is_above_dlp,
)
from .gaeta import (
    InternalInconsistency,
    NotGeneric,
    NotPure,
    OutOfRange,
    decompose_betti,
    gaeta_case,
    gaeta_resolution,
)
from .gradecoh.matrix import NotGenericMatrix
from .gradecoh.points import RetryWithNewSeed

ENV_PREFIX = "P2GAETA_"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2, 3

_NEGATIVE = re.compile(r"^-\d+$|^-\d*\.\d+$|^-\d+/\d+$")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    prime: int = 32003
    seed: int = 0
    trials: int = 3
    output: str = "text"
    depth_cap: int = 64
    max_degree: int = 24
    timing: bool = False

    def __post_init__(self):
        from .gradecoh.field import check_prime

        try:
            check_prime(self.prime)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if self.prime <= 2 * self.max_degree:
            raise UsageError(f"prime {self.prime} must exceed twice the degree guard {self.max_degree}")
        if self.trials < 1:
            raise UsageError("trials must be positive")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")

    def to_json(self) -> dict:
        return {"prime": self.prime, "seed": self.seed, "trials": self.trials}


# -- parsing ---------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_character(values: list[str], chern: bool) -> LogChern:
    if len(values) != 3:
        raise UsageError("a character needs three numbers")
    a, b, c = (_fraction(v) for v in values)
    try:
        if chern:
            return to_log(ChernCharacter(a, b, c))
        return LogChern(a, b, c)
    except (NonPositiveRank, ZeroDivisionError):
        raise UsageError("the rank must be positive") from None


def _env(name: str, default, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    try:
        return kind(raw)
    except ValueError:
        raise UsageError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None


def _allow_negative_fractions(parser: argparse.ArgumentParser):
    # argparse only treats integers and decimals as negative numbers, not -11/3
    parser._negative_number_matcher = _NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting a flag given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--prime", type=int, help="field characteristic (default 32003)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--trials", type=int, help="random trials per check (default 3)")
    common.add_argument("--depth-cap", type=int, help="exceptional search depth (default 64)")
    common.add_argument("--max-degree", type=int, help="refuse checks needing forms above this degree (default 24)")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")

    parser = argparse.ArgumentParser(
        prog="p2gaeta",
        description="Gaeta resolutions, exceptional bundles and divisor cones on the Hilbert scheme of points of P2.",
        epilog="Exit codes: 0 success, 1 verification failed, 2 usage error, 3 unsupported input.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def character_command(name, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("values", nargs=3, metavar="X", help="r mu Delta (or r c1 ch2 with --chern)")
        p.add_argument("--chern", action="store_true", help="read the triple as (r, c1, ch2)")
        return p

    character_command("char", "both coordinate forms, chi, DLP verdict and Serre dual")
    character_command("gaeta", "Gaeta resolution, triangle case and Betti decomposition")
    ctl = character_command("controlling", "controlling exceptional bundle")
    ctl.add_argument("--branch", choices=["primary", "secondary"], default="primary")

    exc = sub.add_parser("exceptional", help="exceptional slope at a dyadic address, or a listing", parents=[common])
    exc.add_argument("address", nargs="?", help="dyadic rational such as 1/2 or 3/4")
    exc.add_argument("--list", type=int, metavar="MAX_RANK", help="list exceptional slopes of rank < MAX_RANK")
    exc.add_argument("--window", nargs=2, default=["0", "1"], metavar=("LO", "HI"))

    cones = sub.add_parser("cones", help="effective and movable edges with the dual-curve certificate",
                           parents=[common])
    cones.add_argument("n", type=int)

    table = sub.add_parser("table", help="stable base locus table with consistency verdicts", parents=[common])
    table.add_argument("n", type=int)

    verify = sub.add_parser("verify", help="finite-field and numeric verifications", parents=[common])
    vsub = verify.add_subparsers(dest="check", required=True)
    tri = vsub.add_parser("interp-tri", help="interpolation for the triangular family", parents=[common])
    tri.add_argument("--r", type=int, nargs="+", default=[3, 4, 5])
    tri.add_argument("--k", type=int, default=None, help="fixed k; default probes k = 1, 2, ... up to --k-max")
    tri.add_argument("--k-max", type=int, default=3)
    tan = vsub.add_parser("interp-tan", help="interpolation for the tangential family", parents=[common])
    tan.add_argument("--s", type=int, nargs="+", default=[2, 3, 4, 5])
    tan.add_argument("--k", type=int, default=None)
    tan.add_argument("--k-max", type=int, default=3)
    tan.add_argument("--route", choices=["auto", "ladder", "kernel"], default="auto")
    qk = vsub.add_parser("qk", help="sections of T(2s-2) vanishing on a (qk) scheme", parents=[common])
    qk.add_argument("--s", type=int, required=True)
    qk.add_argument("--k", type=int, required=True)
    zl = vsub.add_parser("zero-locus", help="Betti table of the zero locus of a section of T(2s-2)",
                         parents=[common])
    zl.add_argument("--s", type=int, nargs="+", default=[2, 3])
    betti = vsub.add_parser("betti", help="Betti diagrams of sampled point configurations", parents=[common])
    betti.add_argument("--n", type=int, required=True)
    betti.add_argument("--stratum", default=None, help="stratum tag; default: every row of the table")
    conj = vsub.add_parser("conjecture", help="block decompositions for orthogonal exceptional pairs",
                           parents=[common])
    conj.add_argument("--max-rank", type=int, default=30)

    for p in [parser, *sub.choices.values(), *vsub.choices.values()]:
        _allow_negative_fractions(p)
    return parser


def make_config(args) -> RunConfig:
    def pick(name, kind, default):
        flag = getattr(args, name, None)
        return flag if flag is not None else _env(name, default, kind)

    return RunConfig(
        prime=pick("prime", int, RunConfig.prime),
        seed=pick("seed", int, RunConfig.seed),
        trials=pick("trials", int, RunConfig.trials),
        output="json" if pick("json", bool, False) else "text",
        depth_cap=pick("depth_cap", int, RunConfig.depth_cap),
        max_degree=pick("max_degree", int, RunConfig.max_degree),
        timing=pick("timing", bool, False),
    )


# -- output --------------------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


class Printer:
    def __init__(self, cfg: RunConfig, out=None):
        self.cfg = cfg
        self.out = out or sys.stdout

    def emit(self, payload: dict, text: str):
        if self.cfg.output == "json":
            print(_dump(payload), file=self.out)
        else:
            print(text, file=self.out)


# -- commands ----------------------------------------------------------------------


def cmd_char(args, cfg: RunConfig, out: Printer) -> int:
    xi = parse_character(args.values, args.chern)
    ch = xi.ch
    chi = euler(ch)
    above = is_above_dlp(xi, cfg.depth_cap)
    dual = serre_dual(xi)
    payload = {
        "log": {"r": fmt(xi.r), "mu": fmt(xi.mu), "delta": fmt(xi.delta)},
        "chern": ch.to_json(),
        "chi": fmt(chi),
        "dlp_threshold": fmt(dlp_threshold(xi.mu, cfg.depth_cap)),
        "above_dlp": above,
        "serre_dual": {"r": fmt(dual.r), "mu": fmt(dual.mu), "delta": fmt(dual.delta)},
    }
    text = "\n".join([
        f"log character   {xi}",
        f"Chern character {ch}",
        f"chi             {fmt(chi)}",
        f"DLP threshold   Delta >= {payload['dlp_threshold']}",
        f"above DLP       {'yes' if above else 'no'}",
        f"Serre dual      {dual}",
    ])
    out.emit(payload, text)
    return EXIT_OK


def cmd_exceptional(args, cfg: RunConfig, out: Printer) -> int:
    if args.list is not None:
        lo, hi = (_fraction(v) for v in args.window)
        items = enumerate_exceptionals(args.list, (lo, hi))
        payload = {"max_rank": args.list, "window": [fmt(lo), fmt(hi)], "slopes": [e.to_json() for e in items]}
        text = "\n".join(f"{fmt(e.slope):>12}  rank {e.rank:<5} address {e.address}" for e in items)
        out.emit(payload, text or "(none)")
        return EXIT_OK
    if args.address is None:
        raise UsageError("give a dyadic address or --list MAX_RANK")
    try:
        e = epsilon(_fraction(args.address))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    left, right = e.address.parents()
    payload = {**e.to_json(), "parents": [str(left), str(right)]}
    text = (f"E at address {e.address}: slope {fmt(e.slope)}, rank {e.rank}, "
            f"Delta {fmt(e.discriminant)}, parents {left} and {right}")
    out.emit(payload, text)
    return EXIT_OK


def cmd_controlling(args, cfg: RunConfig, out: Printer) -> int:
    xi = parse_character(args.values, args.chern)
    c = controlling(xi, args.branch, cfg.depth_cap)
    left, right = endpoints(c)
    payload = {**c.to_json(), "branch": args.branch, "endpoints": [str(left), str(right)]}
    text = "\n".join([
        f"controlling slope gamma = {fmt(c.gamma)} (rank {c.bundle.rank}), E_gamma = E*({c.d}) with mu_E = {fmt(c.base.slope)}",
        f"alpha = {fmt(c.alpha)}, beta = {fmt(c.beta)}",
        f"endpoints {left} < {right}" + (" (on an endpoint)" if c.on_boundary else ""),
    ])
    out.emit(payload, text)
    return EXIT_OK


def cmd_gaeta(args, cfg: RunConfig, out: Printer) -> int:
    xi = parse_character(args.values, args.chern)
    if not is_above_dlp(xi, cfg.depth_cap):
        raise OutOfRange(f"{xi} is not above the DLP curve")
    shape = gaeta_resolution(xi)
    tri = gaeta_case(xi)
    payload = {
        "character": {"r": fmt(xi.r), "mu": fmt(xi.mu), "delta": fmt(xi.delta)},
        "resolution": shape.to_json(),
        "resolution_text": str(shape),
        "case": tri.case.value,
        "controlling_slope": fmt(tri.controlling.gamma),
        "triangle": tri.to_json(),
    }
    lines = [
        f"resolution      0 -> {shape} -> U -> 0",
        f"case            {tri.case.value}",
        f"controlling     gamma = {fmt(tri.controlling.gamma)} (rank {tri.controlling.bundle.rank})",
        f"exceptional     {' + '.join(map(str, tri.left))} -> {' + '.join(map(str, tri.right))}",
    ]
    try:
        model = decompose_betti(xi)
    except (NotGeneric, NotPure) as exc:
        payload["decomposition"] = {"error": str(exc)}
        lines.append(f"decomposition   unavailable: {exc}")
    else:
        payload["decomposition"] = model.to_json()
        nums = model.numbers
        lines.append("numbers         " + ", ".join(f"{k} = {int(nums[k])}" for k in ("n1", "n2", "l1", "l2", "j1", "j2")))
        lines.append(f"B-block         {model.block_B}")
        lines.append(f"A-block         {model.block_A_shape}")
    out.emit(payload, "\n".join(lines))
    return EXIT_OK


def cmd_cones(args, cfg: RunConfig, out: Printer) -> int:
    eff = eff_primary_edge(args.n)
    payload = {"n": args.n, "eff": eff.to_json()}
    lines = [f"eff edge  {eff}"]
    try:
        mov = mov_primary_edge(args.n)
        curve, pairing = dual_curve_certificate(args.n)
    except UnsupportedN as exc:
        payload["mov"] = {"error": str(exc)}
        lines.append(f"mov edge  unsupported: {exc}")
        out.emit(payload, "\n".join(lines))
        return EXIT_UNSUPPORTED
    payload["mov"] = mov.to_json()
    payload["dual_curve"] = {**curve.to_json(), "pairing": fmt(pairing)}
    payload["eff_le_mov"] = eff.h <= mov.divisor.h
    lines += [
        f"mov edge  {mov.divisor}  ({mov.family}, parameter {mov.parameter})",
        f"interpolating bundle  coker({mov.interpolating_shape})",
        f"dual curve  beta = ({fmt(curve.h_deg)}, {fmt(curve.b_half_deg)}), pairing {fmt(pairing)}",
    ]
    out.emit(payload, "\n".join(lines))
    return EXIT_OK if pairing == 0 and eff.h <= mov.divisor.h else EXIT_FAIL


def cmd_table(args, cfg: RunConfig, out: Printer) -> int:
    rows = sbld_table(args.n)
    report = table_consistency(args.n, rows)
    payload = {"rows": [r.to_json() for r in rows], "consistency": report.to_json()}
    lines = []
    for row, slope, wall in zip(rows, report.slopes, report.walls):
        label = row.betti_id + (f" {row.map_pattern}" if row.map_pattern else "")
        interp = str(row.interpolating_shape) if row.interpolating_shape else "-"
        lines.append(f"{label:<17} {row.base_locus:<10} slope {fmt(slope) if slope is not None else '-':>6}"
                     f"  wall {fmt(wall):>6}  {', '.join(row.destabilizers):<28} {interp}"
                     + ("  [erratum]" if row.erratum else ""))
    lines.append("consistent" if report.ok else "violations:\n  " + "\n  ".join(report.violations))
    out.emit(payload, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAIL


# -- verify ------------------------------------------------------------------------


def _guard(cfg: RunConfig, degree: int, what: str):
    if degree > cfg.max_degree:
        raise OutOfRange(f"{what} needs forms of degree {degree}, above the guard {cfg.max_degree}")


def _check_line(out: Printer, cfg: RunConfig, name: str, params: dict, passed: bool, result: dict, seconds: float):
    payload = {"check": name, "params": params, "seed": cfg.seed, "prime": cfg.prime,
               "passed": passed, "result": result}
    if cfg.timing:
        payload["seconds"] = round(seconds, 3)
    text = f"[{'PASS' if passed else 'FAIL'}] {name} {_dump(params)} {_dump(result)}"
    if cfg.timing:
        text += f" ({seconds:.2f}s)"
    out.emit(payload, text)


def cmd_verify(args, cfg: RunConfig, out: Printer) -> int:
    from . import gradecoh as gc
    from .cones import conjecture_check

    results: list[bool] = []
    p, seed = cfg.prime, cfg.seed

    def record(name, params, passed, result, start):
        results.append(bool(passed))
        _check_line(out, cfg, name, params, bool(passed), result, time.perf_counter() - start)

    def skip(params, reason):
        out.emit({"check": args.check, "params": params, "passed": None, "skipped": reason},
                 f"[SKIP] {args.check} {_dump(params)} {reason}")

    if args.check in ("interp-tri", "interp-tan"):
        tri = args.check == "interp-tri"
        fn = gc.verify_interpolation_triangular if tri else gc.verify_interpolation_tangential
        extra = {} if tri else {"route": args.route}
        for v in (args.r if tri else args.s):
            _guard(cfg, v - 1 if tri else 2 * v + 2, f"{'r' if tri else 's'} = {v}")
            start = time.perf_counter()
            kw = {"seed": seed, "trials": cfg.trials, "p": p, **extra}
            if args.k is not None:
                k, res = args.k, fn(v, args.k, **kw)
                k = k if res else None
            else:
                k, res = gc.minimal_k(fn, v, args.k_max, **kw)
            data = res.to_json()
            data.pop("seconds", None)
            data["minimal_k"] = k
            record(args.check, {("r" if tri else "s"): v, **extra}, res.passed, data, start)
    elif args.check == "qk":
        _guard(cfg, 2 * args.s + 2, f"s = {args.s}")
        counts = []
        start = time.perf_counter()
        for t in range(cfg.trials):
            counts.append(gc.qk_section_count(args.s, args.k, seed + t, p))
        record("qk", {"s": args.s, "k": args.k}, all(c == args.k for c in counts),
               {"h0": counts, "expected": args.k}, start)
    elif args.check == "zero-locus":
        for s in args.s:
            _guard(cfg, 4 * s - 1, f"s = {s}")
            start = time.perf_counter()
            gens, table = gc.tangent_section_zero_locus(s, seed, p)
            expected = {(1, -2 * s): 3, (2, -(2 * s + 1)): 1, (2, -(4 * s - 1)): 1}
            got = {f"{pos},{tw}": m for (pos, tw), m in sorted(table.entries.items())}
            record("zero-locus", {"s": s}, table.entries == expected,
                   {"betti": got, "length": 4 * s * s - 2 * s + 1, "degrees": [g.degree for g in gens]}, start)
    elif args.check == "betti":
        _guard(cfg, args.n, f"n = {args.n}")
        rows = sbld_table(args.n)
        targets = []
        for row in rows:
            stratum = "general" if row.base_locus.startswith("P2[") else row.base_locus
            if args.stratum is None or args.stratum == stratum:
                if stratum not in [s for s, _ in targets]:
                    targets.append((stratum, row))
        if not targets:
            raise UsageError(f"no table row with stratum {args.stratum!r} for n = {args.n}")
        for stratum, row in targets:
            start = time.perf_counter()
            params = {"n": args.n, "stratum": stratum, "expected": row.betti_id}
            try:
                hits = sum(
                    gc.ideal_betti(gc.sample_points(stratum, args.n, seed + t, p)) == row.betti_shape.betti
                    for t in range(cfg.trials)
                )
            except gc.Infeasible as exc:
                skip(params, str(exc))
                continue
            record("betti", params, hits == cfg.trials, {"agree": hits, "trials": cfg.trials}, start)
    elif args.check == "conjecture":
        start = time.perf_counter()
        reports = conjecture_check(args.max_rank)
        found = sum(r.decomposition_found for r in reports)
        by_factor: dict[str, int] = {}
        for r in reports:
            if r.factor:
                by_factor[r.factor] = by_factor.get(r.factor, 0) + 1
        missing = [{"gamma": fmt(r.gamma.slope), "d": r.d, "n": r.n} for r in reports if not r.decomposition_found]
        record("conjecture", {"max_rank": args.max_rank}, found == len(reports),
               {"instances": len(reports), "found": found, "by_factor": by_factor, "missing": missing}, start)
    return EXIT_OK if all(results) else EXIT_FAIL


COMMANDS = {
    "char": cmd_char,
    "exceptional": cmd_exceptional,
    "controlling": cmd_controlling,
    "gaeta": cmd_gaeta,
    "cones": cmd_cones,
    "table": cmd_table,
    "verify": cmd_verify,
}

UNSUPPORTED = (UnsupportedN, UnsupportedRank, OutOfRange, NotPure, NotGeneric, ControllingNotFound)
CERTIFICATION_FAILURES = (NotGenericMatrix, RetryWithNewSeed, InternalInconsistency)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        printer = Printer(cfg)
        return COMMANDS[args.command](args, cfg, printer)
    except UsageError as exc:
        print(f"p2gaeta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UNSUPPORTED as exc:
        print(f"p2gaeta: unsupported input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except CERTIFICATION_FAILURES as exc:
        print(f"p2gaeta: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # parameters outside a routine's domain, e.g. k > s
        print(f"p2gaeta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
