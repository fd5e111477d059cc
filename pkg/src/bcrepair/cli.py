"""Command-line front end: ``curve``, ``point``, ``verify`` and ``simulate``.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .flowgraph import SystemParams
from .galois import GF
from .oracle import DEFAULT_BUDGET, BudgetExceeded, oracle_alpha_star
from .repair_sim import (
    build_example2_plan,
    execute_broadcast_repair,
    format_report,
    init_system,
    inject_partial_failure,
    random_file,
    rlnc_repair_round,
    symbol_units,
    verify_any_k,
)
from .tradeoff import (
    OutsideAssumption,
    alpha_star,
    curve_csv,
    default_gamma_grid,
    gamma_star,
    linear_grid,
    mbr_point,
    msr_point,
    sample_curve,
    thm2_params,
)
from .xrational import xr

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    """"1/2", "0.25" or "3" as an exact fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def parse_range(text: str) -> list[int]:
    """"3:6" (inclusive), "4" or "2,3,5"."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad integer range: {text!r}") from exc


def parse_rationals(text: str) -> list[Fraction]:
    return [parse_rational(x) for x in text.split(",") if x.strip()]


# --- sweep configuration ---------------------------------------------------------

@dataclass
class SweepConfig:
    n_range: list[int] = field(default_factory=lambda: list(range(3, 7)))
    k_range: list[int] | None = None  # default 1..n-1
    r_range: list[int] | None = None  # default 1..min(k, n-1)
    rhos: list[Fraction] = field(default_factory=lambda: [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    points: int = 8
    budget: int = DEFAULT_BUDGET
    M: Fraction = Fraction(1)
    include_unassumed: bool = False
    out: str | None = None
    seed: int = 0
    workers: int = 1

    def instances(self) -> list[SystemParams]:
        out = []
        for n in self.n_range:
            ks = self.k_range if self.k_range is not None else range(1, n)
            for k in ks:
                if not 1 <= k < n:
                    continue
                rs = self.r_range if self.r_range is not None else range(1, min(k, n - 1) + 1)
                for r in rs:
                    if not 1 <= r <= min(k, n - 1):
                        continue
                    for rho in self.rhos:
                        out.append(SystemParams.make(n, k, r, rho, self.M))
        return sorted(out, key=lambda p: (p.n, p.k, p.r, p.rho))


_CONFIG_PARSERS = {
    "n_range": parse_range,
    "k_range": parse_range,
    "r_range": parse_range,
    "rhos": parse_rationals,
    "points": int,
    "budget": int,
    "M": parse_rational,
    "include_unassumed": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "out": str,
    "seed": int,
    "workers": int,
}


def load_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_PARSERS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONFIG_PARSERS[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from exc
    return values


# --- verification ---------------------------------------------------------------------

@dataclass
class Verdict:
    params: SystemParams
    status: str  # PASS, FAIL or SKIPPED
    detail: str = ""
    points: int = 0

    def line(self) -> str:
        p = self.params
        return f"{p.n}\t{p.k}\t{p.r}\t{p.rho}\t{self.status}\t{self.points}\t{self.detail}"


def verification_grid(params: SystemParams, points: int) -> list:
    """``points`` values from the minimum-bandwidth point to twice the minimum-storage bandwidth."""
    return linear_grid(mbr_point(params).gamma, msr_point(params).gamma * 2, points)


def verify_instance(params: SystemParams, points: int = 8, budget: int = DEFAULT_BUDGET,
                    include_unassumed: bool = False) -> Verdict:
    if not params.r_divides_k and not include_unassumed:
        try:
            thm2_params(params)
        except OutsideAssumption as exc:
            return Verdict(params, "SKIPPED", str(exc))
    mismatches = []
    grid = verification_grid(params, points)
    try:
        for g in grid:
            a, o = alpha_star(params, g), oracle_alpha_star(params, g, budget=budget)
            if a != o:
                mismatches.append(f"gamma={g}: formula {a} vs oracle {o}")
    except BudgetExceeded as exc:
        return Verdict(params, "SKIPPED", f"budget exceeded: {exc}")
    if mismatches:
        return Verdict(params, "FAIL", "; ".join(mismatches), len(grid))
    return Verdict(params, "PASS", "", len(grid))


def _verify_job(args):
    return verify_instance(*args)


def run_sweep(cfg: SweepConfig) -> list[Verdict]:
    jobs = [(p, cfg.points, cfg.budget, cfg.include_unassumed) for p in cfg.instances()]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            verdicts = list(pool.map(_verify_job, jobs))
    else:
        verdicts = [_verify_job(j) for j in jobs]
    return sorted(verdicts, key=lambda v: (v.params.n, v.params.k, v.params.r, v.params.rho))


# --- commands ----------------------------------------------------------------------------

def _params_from(args) -> SystemParams:
    if (args.n is None) == (args.helpers is None):
        raise UsageError("give exactly one of --n or --helpers")
    n = args.n if args.n is not None else args.helpers + args.r
    try:
        return SystemParams.make(n, args.k, args.r, parse_rational(args.rho), parse_rational(args.M))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_curve(args, out) -> int:
    params = _params_from(args)
    if args.gamma_max is not None:
        grid = linear_grid(mbr_point(params).gamma, xr(parse_rational(args.gamma_max)), args.points)
    else:
        grid = default_gamma_grid(params, args.points)
    text = curve_csv(sample_curve(params, grid))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _fmt(x) -> str:
    return f"{x} ({x.to_decimal()})"


def cmd_point(args, out) -> int:
    params = _params_from(args)
    msr, mbr = msr_point(params), mbr_point(params)
    entries = {
        "params": params.key(),
        "msr_alpha": _fmt(msr.alpha),
        "msr_gamma": _fmt(msr.gamma),
        "mbr_alpha": _fmt(mbr.alpha),
        "mbr_gamma": _fmt(mbr.gamma),
    }
    if args.gamma is not None:
        g = xr(parse_rational(args.gamma))
        if g < 0:
            raise UsageError("gamma must be non-negative")
        a = alpha_star(params, g)
        entries["gamma"] = _fmt(g)
        entries["alpha_star"] = "infeasible" if a.is_infinite else _fmt(a)
    if args.alpha is not None:
        a = xr(parse_rational(args.alpha))
        if a <= 0:
            raise UsageError("alpha must be positive")
        g = gamma_star(params, a)
        entries["alpha"] = _fmt(a)
        entries["gamma_star"] = "infeasible" if g.is_infinite else _fmt(g)
    out.write(format_report("point", entries))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    values = load_config(args.config) if args.config else {}
    for key in ("n_range", "k_range", "r_range"):
        v = getattr(args, key)
        if v is not None:
            values[key] = parse_range(v)
    if args.rhos is not None:
        values["rhos"] = parse_rationals(args.rhos)
    for key in ("points", "budget", "workers", "out"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if args.include_unassumed:
        values["include_unassumed"] = True
    cfg = SweepConfig(**values)
    try:
        verdicts = run_sweep(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lines = ["n\tk\tr\trho\tstatus\tpoints\tdetail"] + [v.line() for v in verdicts]
    counts = {s: sum(v.status == s for v in verdicts) for s in ("PASS", "FAIL", "SKIPPED")}
    lines.append(f"# PASS {counts['PASS']}  FAIL {counts['FAIL']}  SKIPPED {counts['SKIPPED']}")
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    return EXIT_FAIL if counts["FAIL"] else EXIT_OK


def simulate_example2(seed: int, files: int, q: int = 257) -> tuple[dict, bool]:
    rng = random.Random(seed)
    field_ = GF(q)
    params = SystemParams.make(4, 2, 1, Fraction(1, 2))
    cases = ok = 0
    packets = set()
    for _ in range(files):
        W = random_file(field_, 8, 4, rng)
        state = init_system(params, W, 4, field=field_)
        plan = build_example2_plan(state, 1, rng)
        for pair in [(a, b) for a in range(4) for b in range(a + 1, 4)]:
            broken = inject_partial_failure(state, [1], 2, {1: pair})
            repaired = execute_broadcast_repair(broken, plan)
            cases += 1
            if repaired.node_store == state.node_store and verify_any_k(repaired)[0]:
                ok += 1
            packets.add(repaired.bandwidth_log[-1]["packets"])
    frac = Fraction(max(packets), 8) if packets else Fraction(0)
    entries = {
        "mode": "example2",
        "seed": seed,
        "field": str(field_),
        "files": files,
        "lost_pair_cases": cases,
        "exact_recoveries": ok,
        "packets_per_repair": ",".join(str(p) for p in sorted(packets)),
        "bandwidth_fraction_of_file": str(frac),
    }
    return entries, ok == cases and packets <= {3}


def simulate_rlnc(params: SystemParams, alpha, gamma, trials: int, seed: int, q: int = 257,
                  packet_len: int = 1) -> tuple[dict, bool]:
    field_ = GF(q)
    units = symbol_units(params, alpha, gamma)
    passed = 0
    failures = []
    for t in range(trials):
        trial_seed = seed + t
        rng = random.Random(trial_seed)
        state = init_system(params, random_file(field_, units.k_sym, packet_len, rng), units.per_node,
                            field=field_)
        state = inject_partial_failure(state, range(1, params.r + 1), units.lost)
        _, report = rlnc_repair_round(state, units.beta, trial_seed)
        if report.any_k:
            passed += 1
        else:
            failures.append(f"{trial_seed}:{','.join(map(str, report.witness))}")
    entries = {
        "mode": "rlnc",
        "params": params.key(),
        "field": str(field_),
        "alpha": str(xr(alpha)),
        "gamma": str(xr(gamma)),
        "packets": f"k_sym={units.k_sym} per_node={units.per_node} surviving={units.surviving} beta={units.beta}",
        "bandwidth_per_round": str((params.n - params.r) * units.beta * Fraction(params.M) / units.k_sym),
        "seeds": f"{seed}..{seed + trials - 1}" if trials else "none",
        "trials": trials,
        "any_k_passed": passed,
        "failures": " ".join(failures) or "none",
    }
    return entries, passed == trials


def cmd_simulate(args, out) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    if args.mode == "example2":
        entries, ok = simulate_example2(args.seed, args.trials if args.trials_given else 20, args.q)
    else:
        if args.n is None and args.helpers is None:
            raise UsageError("rlnc mode needs --n or --helpers")
        params = _params_from(args)
        if args.gamma is not None:
            gamma = xr(parse_rational(args.gamma))
            alpha = xr(parse_rational(args.alpha)) if args.alpha is not None else alpha_star(params, gamma)
        else:
            pt = mbr_point(params)
            alpha, gamma = pt.alpha, pt.gamma
            if args.alpha is not None:
                alpha = xr(parse_rational(args.alpha))
        if alpha.is_infinite:
            raise UsageError("operating point is infeasible")
        entries, ok = simulate_rlnc(params, alpha, gamma, args.trials, args.seed, args.q)
    text = format_report("simulate", entries)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    return EXIT_OK if ok else EXIT_FAIL


# --- argument parsing ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_params(p, need=True):
    p.add_argument("--n", type=int)
    p.add_argument("--helpers", type=int, help="n - r, as an alternative to --n")
    p.add_argument("--k", type=int, required=need)
    p.add_argument("--r", type=int, required=need)
    p.add_argument("--rho", default="0", help='fraction of storage surviving a failure, "1/2" or "0.5"')
    p.add_argument("--M", default="1", help="file size")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bcrepair", description="Storage / repair-bandwidth trade-off under partial failures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve", help="emit the trade-off curve as CSV")
    _add_params(p)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--gamma-max", help="right end of the bandwidth grid (default: twice the minimum-storage bandwidth)")
    p.add_argument("--out")

    p = sub.add_parser("point", help="corner points and a single feasibility query")
    _add_params(p)
    p.add_argument("--gamma")
    p.add_argument("--alpha")

    p = sub.add_parser("verify", help="closed form against the min-cut oracle over a sweep")
    p.add_argument("--config", help="key = value file mirroring the sweep fields")
    p.add_argument("--n-range", dest="n_range")
    p.add_argument("--k-range", dest="k_range")
    p.add_argument("--r-range", dest="r_range")
    p.add_argument("--rhos")
    p.add_argument("--points", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--include-unassumed", action="store_true",
                   help="also verify non-divisible instances with no branch selector")
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="run a repair simulation")
    p.add_argument("--mode", choices=("example2", "rlnc"), required=True)
    _add_params(p, need=False)
    p.add_argument("--alpha")
    p.add_argument("--gamma")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q", type=int, default=257, help="prime field size")
    p.add_argument("--out")
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "curve":
            return cmd_curve(args, out)
        if args.command == "point":
            return cmd_point(args, out)
        if args.command == "verify":
            return cmd_verify(args, out)
        args.trials_given = args.trials is not None
        if args.trials is None:
            args.trials = 100
        if args.mode == "rlnc" and (args.k is None or args.r is None):
            raise UsageError("rlnc mode needs --k and --r")
        return cmd_simulate(args, out)
    except UsageError as exc:
        print(f"bcrepair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"bcrepair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
