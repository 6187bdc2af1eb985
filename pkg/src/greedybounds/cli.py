"""Command line interface: ``greedybounds verify|greedy|democracy|lebesgue``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

import numpy as np

from .constants import BoundRecord, democracy, dual_democracy, k_constant, lebesgue_bounds
from .greedy import EnumerationBudgetError, greedy_residual, sigma_tilde, sigma_upper
from .harness import CASE_IDS, default_case, emit, load_config, run_cases
from .lorentz import format_coefvec, parse_coefvec
from .spaces import make_space
from . import witnesses as W

RECORD_COLUMNS = ("quantity", "N", "lower", "upper", "upper_source", "window", "witness")


def _num(v) -> str:
    return "" if v is None else f"{float(v):.12g}"


def records_csv(records: List[BoundRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow([r.quantity, r.N, _num(r.lower), _num(r.upper), r.upper_source,
                    r.window or "", r.lower_witness])
    return buf.getvalue()


def _read_vectors(path) -> list:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    return [parse_coefvec(ln) for ln in lines if ln]


# -- subcommands -----------------------------------------------------------------

_VERIFY_KEYS = {"N": int, "window": int, "seed": int, "jobs": int, "format": str, "out": str,
                "timing": lambda s: str(s).lower() in ("1", "true", "yes", "on"),
                "grid": int, "qtol": float, "case": str}


def cmd_verify(args) -> int:
    conf = {}
    if args.config:
        for k, v in load_config(args.config).items():
            if k not in _VERIFY_KEYS:
                raise SystemExit(f"unknown config key {k!r}")
            conf[k] = _VERIFY_KEYS[k](v)
    for k in _VERIFY_KEYS:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            conf[k] = v
    case_id = conf.get("case")
    if case_id is None:
        raise SystemExit("verify: a case id is required")
    ids = CASE_IDS if case_id == "all" else (case_id,)
    params = {}
    if "grid" in conf:
        params["grid"] = conf["grid"]
    if "qtol" in conf:
        params["qtol"] = conf["qtol"]
    try:
        cases = [default_case(c, N_max=conf.get("N"), window=conf.get("window"),
                              seed=conf.get("seed"),
                              params=params if c == "trig" else None) for c in ids]
    except ValueError as exc:
        raise SystemExit(str(exc))
    rows = run_cases(cases, jobs=conf.get("jobs", 1), timing=conf.get("timing", False))
    text = emit(rows, conf.get("format", "csv"), conf.get("out"))
    if conf.get("out") is None:
        sys.stdout.write(text)
    fails = sum(r.status == "fail" for r in rows)
    errors = sum(r.status == "error" for r in rows)
    print(f"{len(rows)} rows, {fails} fail, {errors} error", file=sys.stderr)
    return 1 if fails else 0


def cmd_greedy(args) -> int:
    space = make_space(args.space)
    x = _read_vectors(args.x)
    if len(x) != 1:
        raise SystemExit("--x must hold exactly one coefficient vector")
    x = x[0]
    competitors = _read_vectors(args.competitors) if args.competitors else []
    tie = "enumerate-all" if args.ties == "all" else "lowest-index"
    g = greedy_residual(space, x, args.N, tie)
    res = {
        "space": args.space,
        "N": args.N,
        "norm": space.norm(x),
        "greedy_set": sorted(g.set),
        "greedy_sets_considered": g.all_sets_count,
        "residual": format_coefvec(g.residual),
        "residual_norm": g.residual_norm,
    }
    try:
        st = sigma_tilde(space, x, args.N)
        res["sigma_tilde"] = st.value
        res["sigma_tilde_set"] = sorted(st.best_set)
    except EnumerationBudgetError:
        res["sigma_tilde"] = None
    res["sigma_upper"] = sigma_upper(space, x, args.N, competitors)
    json.dump(res, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


def cmd_democracy(args) -> int:
    space = make_space(args.space)
    rng = np.random.default_rng(args.seed)
    dem = democracy(space, args.window, args.N, mode=args.mode, rng=rng)
    recs = list(dem.records)
    if space.dual_batch is not None or space.dual_upper_batch is not None:
        recs += dual_democracy(space, args.window, args.N, mode=args.mode, rng=rng,
                               primal=dem).records
    sys.stdout.write(records_csv(recs))
    return 0


def _registered_witnesses(space, N_max):
    if space.name == "difference":
        return [w for N in range(1, N_max + 1)
                for w in (W.difference_lebesgue(N), W.difference_lebesgue_tilde(N))]
    return []


def _registered_probes(space, N_max):
    if space.name == "difference":
        return [W.difference_conditionality(N) for N in range(1, N_max + 1)]
    if space.name == "kt" and space.params.get("p", 1) > 1:
        return [W.kt_conditionality(space.params["p"], N) for N in range(1, N_max + 1)]
    return []


def cmd_lebesgue(args) -> int:
    space = make_space(args.space)
    recs = k_constant(space, args.N, _registered_probes(space, args.N))
    recs += lebesgue_bounds(space, args.N, _registered_witnesses(space, args.N))
    sys.stdout.write(records_csv(recs))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greedybounds",
                                 description="Two-sided bounds for greedy-type constants.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a registered verification case")
    v.add_argument("case", nargs="?", help=f"one of {', '.join(CASE_IDS)} or 'all'")
    v.add_argument("--N", type=int)
    v.add_argument("--window", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--out")
    v.add_argument("--format", choices=("csv", "json"))
    v.add_argument("--timing", action="store_true", help="fill the runtime_ms column")
    v.add_argument("--grid", type=int, help="quadrature grid for the trig case")
    v.add_argument("--qtol", type=float, help="quadrature tolerance for the trig case")
    v.add_argument("--config", help="flat key=value file; command line flags win")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("greedy", help="greedy approximant and error bounds for one vector")
    g.add_argument("--space", required=True)
    g.add_argument("--x", required=True, help="file with a coefficient vector 'i:v, ...'")
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--ties", choices=("lowest", "all"), default="lowest")
    g.add_argument("--competitors", help="file with one competitor vector per line")
    g.set_defaults(func=cmd_greedy)

    d = sub.add_parser("democracy", help="window democracy records as CSV")
    d.add_argument("--space", required=True)
    d.add_argument("--window", type=int, default=12)
    d.add_argument("--N", type=int, default=6)
    d.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_democracy)

    lb = sub.add_parser("lebesgue", help="K, L and Ltilde bounds as CSV")
    lb.add_argument("--space", required=True)
    lb.add_argument("--N", type=int, required=True)
    lb.set_defaults(func=cmd_lebesgue)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, EnumerationBudgetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
