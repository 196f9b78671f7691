"""Command-line front end: rate queries, trade-off sweeps, verification runs.

Exit codes: 0 success, 1 invalid input, 2 verification failure.
Flag values override a JSON config file, which overrides defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .baselines import import_external_rates, scheme1_optimize
from .core import format_rational, parse_rational
from .simulator import SchemeInstance, report_lines, verify_demands
from .unequal import RateReport, UnequalConfig, equal_rate_report, rate_ueq

SCHEMES = ("equal", "proposed", "scheme1")

CSV_COLUMNS = [
    "N", "K", "L", "Mhat", "M", "scheme", "rate_rational", "rate_decimal",
    "scenario", "t_int", "alpha", "Fprime", "Mprime", "Rprime", "Phi", "gamma",
]


def _rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return parse_rational(str(value))


def _dec(x: Fraction) -> str:
    return f"{float(x):.12g}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachecast",
        description="Coded-caching rates, sweeps, and bit-exact verification "
        "for systems with two cache sizes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--N", type=int, help="number of files")
        p.add_argument("--K", type=int, help="number of users")
        p.add_argument("--L", type=int, help="number of large-cache users")
        p.add_argument("--M", help="small cache size (rational, units of F)")
        p.add_argument("--Mhat", help="large cache size (rational, units of F)")
        p.add_argument("--scheme", help="|".join(SCHEMES))
        p.add_argument("--config", help="JSON file with default flag values")
        p.add_argument("--seed", type=int, help="RNG seed for file contents")

    p_rate = sub.add_parser("rate", help="rate at a single parameter point")
    add_common(p_rate)
    p_rate.add_argument("--resolution", type=int, help="scheme1 grid resolution")
    p_rate.set_defaults(func=cmd_rate)

    p_sweep = sub.add_parser("sweep", help="rate rows over a parameter grid")
    add_common(p_sweep)
    p_sweep.add_argument("--sweep-axis", dest="sweep_axis", help="M | Mhat | both")
    p_sweep.add_argument("--from", dest="from_", help="axis start (rational)")
    p_sweep.add_argument("--to", help="axis end, inclusive (rational)")
    p_sweep.add_argument("--step", help="axis step (rational)")
    p_sweep.add_argument("--Mhat-factor", dest="mhat_factor",
                         help="set Mhat = factor * M while sweeping M")
    p_sweep.add_argument("--format", help="csv | json")
    p_sweep.add_argument("--external-rates", dest="external_rates",
                         help="table of externally computed rates to attach")
    p_sweep.add_argument("--jobs", type=int, help="worker processes")
    p_sweep.add_argument("--resolution", type=int, help="scheme1 grid resolution")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="bit-exact decode verification")
    add_common(p_verify)
    p_verify.add_argument("--exhaustive", action="store_true", default=None,
                          help="enumerate all N^K demands (default: distinct)")
    p_verify.add_argument("--inject-fault", dest="inject_fault", action="store_true",
                          default=None, help="flip one transmitted bit")
    p_verify.add_argument("--report", help="write per-demand records to this file")
    p_verify.set_defaults(func=cmd_verify)
    return parser


class Options:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace):
        self._args = args
        self._config = {}
        if getattr(args, "config", None):
            with open(args.config) as fh:
                self._config = json.load(fh)

    def get(self, name: str, default=None, cast=None):
        value = getattr(self._args, name, None)
        if value is None:
            value = self._config.get(name.rstrip("_"), default)
        if value is None:
            return None
        return cast(value) if cast else value

    def require(self, name: str, default=None, cast=None):
        value = self.get(name, default, cast)
        if value is None:
            raise ValueError(f"missing required parameter --{name.rstrip('_')}")
        return value


def _point_report(scheme: str, N: int, K: int, L, Mhat, M, resolution: int) -> RateReport:
    if scheme == "equal":
        rep = equal_rate_report(N, K, M)
        return rep
    if scheme == "proposed":
        return rate_ueq(UnequalConfig(N, K, L, Mhat, M))
    if scheme == "scheme1":
        caches = [Mhat] * L + [M] * (K - L)
        _, value = scheme1_optimize(N, K, caches, resolution)
        return RateReport(scheme="scheme1", N=N, K=K, M=M, L=L, Mhat=Mhat, rate=value)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def cmd_rate(opts: Options) -> int:
    N = opts.require("N", cast=int)
    K = opts.require("K", cast=int)
    M = opts.require("M", cast=_rat)
    scheme = opts.get("scheme", "proposed")
    L = opts.get("L", cast=int)
    Mhat = opts.get("Mhat", cast=_rat)
    resolution = opts.get("resolution", 64, int)
    if scheme in ("proposed", "scheme1"):
        if L is None or Mhat is None:
            raise ValueError(f"scheme {scheme} needs --L and --Mhat")
    rep = _point_report(scheme, N, K, L, Mhat, M, resolution)
    print(f"rate {format_rational(rep.rate)} ({_dec(rep.rate)})")
    print(f"scheme={rep.scheme} N={rep.N} K={rep.K} L={rep.L or ''} "
          f"Mhat={'' if rep.Mhat is None else rep.Mhat} M={rep.M}")
    if rep.t is not None:
        print(f"t={rep.t} t_int={rep.t_int} alpha={rep.alpha}")
    if rep.scheme == "proposed":
        print(f"Fprime={rep.Fprime} Mprime={'' if rep.Mprime is None else rep.Mprime} "
              f"Rprime={rep.Rprime}")
        print(f"scenario={rep.scenario} Phi={'' if rep.Phi is None else rep.Phi} "
              f"gamma={'' if rep.gamma is None else rep.gamma}"
              + (" pool_empty" if rep.pool_empty else ""))
    return 0


def _report_row(rep: RateReport, L, Mhat) -> dict[str, str]:
    def fmt(x):
        return "" if x is None else format_rational(x) if isinstance(x, Fraction) else str(x)

    return {
        "N": str(rep.N), "K": str(rep.K), "L": fmt(L), "Mhat": fmt(Mhat),
        "M": format_rational(rep.M), "scheme": rep.scheme,
        "rate_rational": format_rational(rep.rate), "rate_decimal": _dec(rep.rate),
        "scenario": fmt(rep.scenario), "t_int": fmt(rep.t_int),
        "alpha": fmt(rep.alpha), "Fprime": fmt(rep.Fprime),
        "Mprime": fmt(rep.Mprime), "Rprime": fmt(rep.Rprime),
        "Phi": fmt(rep.Phi), "gamma": fmt(rep.gamma),
    }


def _eval_sweep_task(task) -> dict[str, str]:
    scheme, N, K, L, Mhat, M, resolution = task
    rep = _point_report(scheme, N, K, L, Mhat, M, resolution)
    return _report_row(rep, L, Mhat)


def cmd_sweep(opts: Options) -> int:
    N = opts.require("N", cast=int)
    K = opts.require("K", cast=int)
    L = opts.require("L", cast=int)
    axis = opts.get("sweep_axis", "M")
    start = opts.require("from_", cast=_rat)
    stop = opts.require("to", cast=_rat)
    step = opts.require("step", cast=_rat)
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if start < 0 or stop > N:
        raise ValueError(f"sweep range [{start}, {stop}] must lie within [0, {N}]")
    schemes = [s.strip() for s in str(opts.get("scheme", "proposed")).split(",")]
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; expected one of {SCHEMES}")
    mhat_factor = opts.get("mhat_factor", cast=_rat)
    fixed_M = opts.get("M", cast=_rat)
    fixed_Mhat = opts.get("Mhat", cast=_rat)
    resolution = opts.get("resolution", 64, int)
    fmt = opts.get("format", "csv")
    jobs = opts.get("jobs", 1, int)

    axis_values = []
    x = start
    while x <= stop:
        axis_values.append(x)
        x += step
    if not axis_values:
        raise ValueError("empty sweep grid")

    points: list[tuple[Fraction, Fraction]] = []  # (Mhat, M)
    skipped = 0
    if axis == "M":
        for m in axis_values:
            mhat = mhat_factor * m if mhat_factor is not None else (
                fixed_Mhat if fixed_Mhat is not None else m
            )
            if mhat < m or mhat > N:
                skipped += 1
                continue
            points.append((mhat, m))
    elif axis == "Mhat":
        if fixed_M is None:
            raise ValueError("sweeping Mhat needs a fixed --M")
        points = [(mh, fixed_M) for mh in axis_values if mh >= fixed_M]
        skipped = len(axis_values) - len(points)
    elif axis == "both":
        points = [(mh, m) for m in axis_values for mh in axis_values if mh >= m]
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    if skipped:
        print(f"note: skipped {skipped} grid points violating M <= Mhat <= N",
              file=sys.stderr)
    if not points:
        raise ValueError("empty sweep grid")

    tasks = [
        (scheme, N, K, L, mhat, m, resolution)
        for (mhat, m) in points
        for scheme in schemes
    ]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_eval_sweep_task, tasks))
    else:
        rows = [_eval_sweep_task(t) for t in tasks]

    columns = list(CSV_COLUMNS)
    external_path = opts.get("external_rates")
    if external_path:
        table = import_external_rates(external_path)
        columns += ["external", "ratio_external"]
        matched = set()
        worst_ratio = None
        for task, row in zip(tasks, rows):
            scheme, n, k, l, mhat, m, _ = task
            key = (n, k, l, mhat, m)
            row["external"] = row["ratio_external"] = ""
            if key in table:
                matched.add(key)
                ext = table[key]
                row["external"] = format_rational(ext)
                if ext > 0:
                    ratio = parse_rational(row["rate_rational"]) / ext
                    row["ratio_external"] = _dec(ratio)
                    if scheme == "proposed" and (worst_ratio is None or ratio > worst_ratio):
                        worst_ratio = ratio
        for key in table:
            if key not in matched:
                print(f"warning: external rate at {key} matches no grid point; "
                      "row skipped", file=sys.stderr)
        if worst_ratio is not None:
            print(f"max proposed/external ratio: {_dec(worst_ratio)}", file=sys.stderr)

    if fmt == "csv":
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        sys.stdout.write(out.getvalue())
    elif fmt == "json":
        ordered = [{c: row.get(c, "") for c in columns} for row in rows]
        print(json.dumps(ordered, indent=2))
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv or json")
    return 0


def cmd_verify(opts: Options) -> int:
    N = opts.require("N", cast=int)
    K = opts.require("K", cast=int)
    M = opts.require("M", cast=_rat)
    scheme = opts.get("scheme", "proposed")
    if scheme not in ("equal", "proposed"):
        raise ValueError("verification supports the equal and proposed schemes")
    L = opts.get("L", cast=int)
    Mhat = opts.get("Mhat", cast=_rat)
    seed = opts.get("seed", 0, int)
    mode = "exhaustive" if opts.get("exhaustive") else "distinct"
    flip = (0, 0) if opts.get("inject_fault") else None

    inst = SchemeInstance(scheme=scheme, N=N, K=K, M=M, L=L, Mhat=Mhat)
    reports = verify_demands(inst, mode=mode, seed=seed, flip_bit=flip)
    report_path = opts.get("report")
    if report_path:
        with open(report_path, "w") as fh:
            fh.write("\n".join(report_lines(reports)) + "\n")
    failures = [r for r in reports if not r.passed]
    total = len(reports)
    if failures:
        print(f"{total - len(failures)}/{total} demands pass; first failure:")
        print(failures[0].line())
        return 2
    rate = reports[0].measured_load if reports else Fraction(0)
    print(f"{total}/{total} demands pass, load {format_rational(rate)} "
          f"({_dec(rate)}) = formula rate {format_rational(inst.formula_rate)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(Options(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
